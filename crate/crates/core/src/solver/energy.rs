use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{domain, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `max_t |‖u_t‖² + 2ν∫₀ᵗ‖∇u‖² − ‖u₀‖²| / ‖u₀‖²`.
    pub max_defect: f64,
    pub final_defect: f64,
    /// `max_t ‖u_t‖ / ‖u₀‖`.
    pub max_growth: f64,
}

pub fn energy_audit(traj: &Trajectory) -> Result<EnergyReport> {
    let e0 = traj.energy[0];
    if !(e0 > 0.0) {
        return Err(domain("energy audit needs a nonzero initial state"));
    }
    let defects: Vec<f64> = traj
        .energy
        .iter()
        .zip(&traj.dissipation)
        .map(|(e, d)| (e + d - e0).abs() / e0)
        .collect();
    Ok(EnergyReport {
        max_defect: defects.iter().copied().fold(0.0, f64::max),
        final_defect: *defects.last().unwrap(),
        max_growth: traj.energy.iter().map(|e| (e / e0).sqrt()).fold(0.0, f64::max),
    })
}

/// Ratio of the maximal energy defects of a run and its `dt/2` refinement.
pub fn richardson_ratio(coarse: &Trajectory, fine: &Trajectory) -> Result<f64> {
    let a = energy_audit(coarse)?.max_defect;
    let b = energy_audit(fine)?.max_defect;
    if b == 0.0 {
        return Err(domain("refined run has zero defect"));
    }
    Ok(a / b)
}
