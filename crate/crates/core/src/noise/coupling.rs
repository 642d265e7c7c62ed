use serde::{Deserialize, Serialize};

use super::fbm::{sample_fbm, FbmPath};
use super::fou::{coupling_defect, fou_from_driving, limit_path, rescale_and_integrate, FouEnsemble};
use super::NoiseSpectrum;
use crate::error::{domain, Error, Result};
use crate::rough::DiscretePath;
use crate::time_grid::TimeGrid;

/// Sizing of a coupled multi-ε noise sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    /// Scales to realize; the fine grid resolves the smallest.
    pub eps: Vec<f64>,
    pub horizon: f64,
    /// Step of the unrescaled process at the smallest ε.
    pub unit_step: f64,
    pub burn_in_factor: f64,
    /// Cap on stored fBM samples (points × components).
    pub memory_cap: usize,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            eps: (2..=6).map(|k| 0.5f64.powi(k)).collect(),
            horizon: 1.0,
            unit_step: 1.0 / 32.0,
            burn_in_factor: 10.0,
            memory_cap: 1 << 26,
        }
    }
}

/// One fBM sample `B^H` on a fine grid that drives `w^ε` for every ε and the
/// limit path `B = M^{-1}Q^{1/2} B^H`.
///
/// For each ε the unrescaled process runs on the dilated driver
/// `B̂_u = ε^{-H} B^H_{εu}`, so `w^ε` and `X^ε` share the fine grid on
/// `[0, T]` regardless of ε.
#[derive(Clone, Debug)]
pub struct CoupledNoise {
    spectrum: NoiseSpectrum,
    fbm: FbmPath,
    step: f64,
    burn_in_factor: f64,
}

/// `X^ε` and `w^ε` for one scale.
#[derive(Clone, Debug)]
pub struct EpsilonNoise {
    pub epsilon: f64,
    pub x: DiscretePath,
    pub w: FouEnsemble,
}

impl EpsilonNoise {
    pub fn coupling_defect(&self) -> Result<f64> {
        coupling_defect(&self.x, &self.w)
    }
}

impl CoupledNoise {
    pub fn sample(spectrum: &NoiseSpectrum, cfg: &CouplingConfig, seed: u64) -> Result<Self> {
        if cfg.eps.is_empty() || cfg.eps.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return Err(domain("epsilon list must be non-empty with entries in (0, 1]"));
        }
        if !(cfg.horizon > 0.0 && cfg.unit_step > 0.0) {
            return Err(domain("horizon and unit step must be positive"));
        }
        let eps_min = cfg.eps.iter().copied().fold(f64::INFINITY, f64::min);
        let eps_max = cfg.eps.iter().copied().fold(0.0, f64::max);
        let step = eps_min * cfg.unit_step;
        // whole blocks of 64 so that dyadic subsampling stays aligned
        let burn = ((eps_max * cfg.burn_in_factor / spectrum.c_min() / step).ceil() as usize).next_multiple_of(64);
        let main = (cfg.horizon / step).round() as usize;
        if ((main as f64) * step - cfg.horizon).abs() > 1e-9 * cfg.horizon {
            return Err(domain("horizon must be a whole number of fine steps"));
        }
        let points = (burn + main + 1) * spectrum.len();
        if points > cfg.memory_cap {
            return Err(Error::Resource(format!(
                "fine noise grid needs {points} samples, memory cap is {}",
                cfg.memory_cap
            )));
        }
        let grid = TimeGrid::uniform(-(burn as f64) * step, main as f64 * step, burn + main);
        let fbm = sample_fbm(spectrum.hurst, &grid, spectrum.len(), seed)?;
        Ok(Self { spectrum: spectrum.clone(), fbm, step, burn_in_factor: cfg.burn_in_factor })
    }

    pub fn spectrum(&self) -> &NoiseSpectrum {
        &self.spectrum
    }

    pub fn fine_step(&self) -> f64 {
        self.step
    }

    pub fn fbm(&self) -> &FbmPath {
        &self.fbm
    }

    /// Fine grid on `[0, T]`.
    pub fn grid(&self) -> TimeGrid {
        TimeGrid::new(self.fbm.grid.times()[self.fbm.anchor..].to_vec()).expect("sub-grid")
    }

    /// The same realization seen on every `factor`-th fine point.
    pub fn subsampled(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.fbm.anchor % factor != 0 || self.fbm.grid.intervals() % factor != 0 {
            return Err(domain("subsampling factor must divide burn-in and horizon"));
        }
        let grid = self.fbm.grid.stride(factor)?;
        let values = self
            .fbm
            .values
            .iter()
            .map(|row| row.iter().step_by(factor).copied().collect())
            .collect();
        let fbm = FbmPath { grid, hurst: self.fbm.hurst, values, anchor: self.fbm.anchor / factor };
        Ok(Self { spectrum: self.spectrum.clone(), fbm, step: self.step * factor as f64, burn_in_factor: self.burn_in_factor })
    }

    /// Limit path `B` on the fine grid.
    pub fn limit(&self) -> Result<DiscretePath> {
        let rows: Vec<Vec<f64>> = self.fbm.values.iter().map(|r| r[self.fbm.anchor..].to_vec()).collect();
        DiscretePath::from_components(self.grid(), &rows)?.scaled(&self.spectrum.limit_scale())
    }

    pub fn realize(&self, epsilon: f64) -> Result<EpsilonNoise> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(domain(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        let burn = (epsilon * self.burn_in_factor / self.spectrum.c_min() / self.step).ceil() as usize;
        if burn > self.fbm.anchor {
            return Err(domain(format!("epsilon {epsilon} exceeds the burn-in covered by this sample")));
        }
        let start = self.fbm.anchor - burn;
        let dilate = epsilon.powf(-self.spectrum.hurst);
        let times: Vec<f64> = self.fbm.grid.times()[start..].iter().map(|t| t / epsilon).collect();
        let values = self
            .fbm
            .values
            .iter()
            .map(|row| row[start..].iter().map(|v| v * dilate).collect())
            .collect();
        let driver = FbmPath { grid: TimeGrid::new(times)?, hurst: self.fbm.hurst, values, anchor: burn };
        let ens = fou_from_driving(&self.spectrum, &driver, 1)?;
        let (x, w) = rescale_and_integrate(&ens, epsilon)?;
        Ok(EpsilonNoise { epsilon, x, w })
    }

    /// Limit path reconstructed through a realized ensemble (for checks).
    pub fn limit_via(&self, noise: &EpsilonNoise) -> Result<DiscretePath> {
        limit_path(&noise.w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_identity_holds_to_trapezoid_accuracy() {
        let spec = NoiseSpectrum::power_law(0.4, 4, 3.0).unwrap();
        let cfg = CouplingConfig { eps: vec![0.25, 0.125], unit_step: 1.0 / 32.0, ..Default::default() };
        let noise = CoupledNoise::sample(&spec, &cfg, 3).unwrap();
        for &e in &cfg.eps {
            let r = noise.realize(e).unwrap();
            assert!(r.coupling_defect().unwrap() < 1e-2);
            let b = noise.limit_via(&r).unwrap();
            assert!(b.sub(&noise.limit().unwrap()).unwrap().sup_norm() < 1e-12);
        }
    }

    #[test]
    fn memory_cap_is_enforced() {
        let spec = NoiseSpectrum::default_for(0.4).unwrap();
        let cfg = CouplingConfig { memory_cap: 1000, ..Default::default() };
        assert!(matches!(CoupledNoise::sample(&spec, &cfg, 0), Err(Error::Resource(_))));
    }
}
