use serde::{Deserialize, Serialize};

use crate::spectral::FourierField;
use crate::time_grid::TimeGrid;

/// Recorded solution states with the energy budget.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<FourierField>,
    /// `‖u_t‖²` at recorded times.
    pub energy: Vec<f64>,
    /// `2ν ∫_0^t ‖∇u‖²` at recorded times (trapezoid over every step).
    pub dissipation: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &FourierField {
        self.states.last().expect("non-empty trajectory")
    }

    /// Every `stride`-th state.
    pub fn strided(&self, stride: usize) -> crate::Result<Trajectory> {
        let grid = self.grid.stride(stride)?;
        let pick = |v: &[f64]| v.iter().step_by(stride).copied().collect::<Vec<f64>>();
        Ok(Trajectory {
            grid,
            states: self.states.iter().step_by(stride).cloned().collect(),
            energy: pick(&self.energy),
            dissipation: pick(&self.dissipation),
        })
    }
}

/// Run metadata written next to checkpoints.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config_hash: String,
    pub seed: u64,
    pub noise_hash: String,
    pub scheme: String,
    pub dt: f64,
    pub steps: usize,
}
