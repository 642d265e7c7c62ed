use crate::error::{domain, structural, Result};
use crate::noise::EpsilonNoise;
use crate::rough::DiscretePath;
use crate::time_grid::TimeGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Interp {
    /// Linear between samples.
    Linear,
    /// Constant slope of a piecewise-linear path on each cell.
    Slope,
}

/// Time-dependent noise coefficients `v_i(t)` of the transport field
/// `Σ_i v_i(t) e_i`, read off a uniform sample grid.
#[derive(Clone, Debug)]
pub struct NoiseForcing {
    grid: TimeGrid,
    step: f64,
    rows: Vec<Vec<f64>>,
    amp: f64,
    interp: Interp,
}

impl NoiseForcing {
    /// `ε^{H−1} w^ε(t)`, linearly interpolated.
    pub fn from_epsilon_noise(noise: &EpsilonNoise) -> Result<Self> {
        let amp = noise.epsilon.powf(noise.w.spectrum.hurst - 1.0);
        Self::linear(noise.w.grid.clone(), noise.w.w.clone(), amp)
    }

    pub fn linear(grid: TimeGrid, rows: Vec<Vec<f64>>, amp: f64) -> Result<Self> {
        Self::build(grid, rows, amp, Interp::Linear)
    }

    /// Derivative of the piecewise-linear interpolation of `path`.
    pub fn path_slope(path: &DiscretePath) -> Result<Self> {
        let rows = (0..path.dim()).map(|i| path.component(i)).collect();
        Self::build(path.grid().clone(), rows, 1.0, Interp::Slope)
    }

    /// No forcing, `m` components.
    pub fn zero(horizon: f64, m: usize) -> Self {
        let grid = TimeGrid::uniform(0.0, horizon, 1);
        Self { step: horizon, rows: vec![vec![0.0; 2]; m], grid, amp: 0.0, interp: Interp::Linear }
    }

    fn build(grid: TimeGrid, rows: Vec<Vec<f64>>, amp: f64, interp: Interp) -> Result<Self> {
        let step = grid.require_uniform()?;
        if rows.iter().any(|r| r.len() != grid.len()) {
            return Err(structural("forcing rows must match the sample grid"));
        }
        if grid.len() < 2 {
            return Err(domain("forcing needs at least two samples"));
        }
        Ok(Self { grid, step, rows, amp, interp })
    }

    pub fn components(&self) -> usize {
        self.rows.len()
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn sample_step(&self) -> f64 {
        self.step
    }

    /// Coefficients at `t`, taking the cell to the right of `t` when
    /// `from_right` and to the left otherwise.
    pub fn eval(&self, t: f64, from_right: bool, out: &mut [f64]) {
        let x = (t - self.grid.start()) / self.step;
        let cells = self.grid.intervals();
        let k = if from_right { (x + 1e-9).floor() } else { (x - 1e-9).ceil() - 1.0 };
        let k = (k.max(0.0) as usize).min(cells - 1);
        let theta = x - k as f64;
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = self.amp
                * match self.interp {
                    Interp::Linear => row[k] + (row[k + 1] - row[k]) * theta,
                    Interp::Slope => (row[k + 1] - row[k]) / self.step,
                };
        }
    }

    pub fn covers(&self, start: f64, end: f64) -> bool {
        self.grid.start() <= start + 1e-12 && self.grid.end() >= end - 1e-9 * end.abs().max(1.0)
    }
}
