use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spectral::TorusGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Integrating-factor Heun for the ε-system.
    EpsilonSystemRk2,
    /// Davie scheme for the limit rough equation.
    LimitDavie,
}

/// Time-stepping parameters.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub nu: f64,
    pub grid: TorusGrid,
    pub dt: f64,
    pub horizon: f64,
    /// Noise samples per step expected by the ε-system stepper.
    pub substeps: usize,
    pub scheme: Scheme,
    /// Switch for `−Π(u·∇u)`; off gives the linear test mode.
    pub nonlinear: bool,
    /// Store every `record_stride`-th state.
    pub record_stride: usize,
    /// Bound on `dt · sup|v| · k_max` for the advecting field.
    pub cfl_limit: f64,
    /// Bound on `sup|Z_(s,t)| · k_max` for one Davie step. The truncated
    /// exponential `1 + A¹ + A²` amplifies a mode by at most `1 + θ⁴/4`.
    pub driver_cfl_limit: f64,
}

impl SolverConfig {
    /// `ν = 0.1`, `T = 1`, `d = 2`, `N = 32`, `dt = 2^-11`.
    pub fn default_for(scheme: Scheme) -> Self {
        Self {
            nu: 0.1,
            grid: TorusGrid::default_2d(),
            dt: 1.0 / 2048.0,
            horizon: 1.0,
            substeps: 1,
            scheme,
            nonlinear: true,
            record_stride: 1,
            cfl_limit: 1.0,
            driver_cfl_limit: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(domain(format!("viscosity must be non-negative, got {}", self.nu)));
        }
        if !(self.dt > 0.0 && self.horizon > 0.0) {
            return Err(domain("time step and horizon must be positive"));
        }
        let steps = self.horizon / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps {
            return Err(domain(format!("horizon {} is not a whole number of steps {}", self.horizon, self.dt)));
        }
        if self.substeps == 0 || self.record_stride == 0 {
            return Err(domain("substeps and record stride must be at least 1"));
        }
        if self.steps() % self.record_stride != 0 {
            return Err(domain("record stride must divide the number of steps"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// `dt · N² · ν`; the integrating factor removes the restriction it
    /// would impose on an explicit scheme.
    pub fn stiffness(&self) -> f64 {
        let n = self.grid.modes_per_axis() as f64;
        self.dt * n * n * self.nu
    }
}
