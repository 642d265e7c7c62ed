use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spectral::{ModeBasis, TorusGrid};

/// Diagonal spectrum of the fast process: `Q e_i = λ_i e_i`, `M e_i = c_i e_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpectrum {
    pub hurst: f64,
    pub lambda: Vec<f64>,
    pub c: Vec<f64>,
    /// Decay exponent `q` in `λ_i ≤ λ_1 i^{-q}`, recorded for the trace check.
    pub lambda_decay: f64,
}

impl NoiseSpectrum {
    /// `λ_i = i^{-q}`, `c_i = 1 + i/(1+i)`.
    pub fn power_law(hurst: f64, components: usize, lambda_decay: f64) -> Result<Self> {
        let lambda = (1..=components).map(|i| (i as f64).powf(-lambda_decay)).collect();
        let c = (1..=components).map(|i| 1.0 + i as f64 / (1.0 + i as f64)).collect();
        Self::new(hurst, lambda, c, lambda_decay)
    }

    /// Sixteen components with cubic decay.
    pub fn default_for(hurst: f64) -> Result<Self> {
        Self::power_law(hurst, 16, 3.0)
    }

    pub fn new(hurst: f64, lambda: Vec<f64>, c: Vec<f64>, lambda_decay: f64) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(domain(format!("Hurst index must lie in (0, 1), got {hurst}")));
        }
        if lambda.is_empty() || lambda.len() != c.len() {
            return Err(domain("spectrum needs matching, non-empty lambda and c lists"));
        }
        if lambda.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
            return Err(domain("Q eigenvalues must be finite and non-negative"));
        }
        if c.iter().any(|&ci| !(ci > 0.0 && ci.is_finite())) {
            return Err(domain("M eigenvalues must be finite and positive"));
        }
        if c.windows(2).any(|w| w[1] < w[0]) {
            return Err(domain("M eigenvalues must be nondecreasing"));
        }
        let s = Self { hurst, lambda, c, lambda_decay };
        if 2.0 * hurst * lambda_decay <= 1.0 {
            log::warn!(
                "2Hq = {:.3} <= 1: the truncated trace of Q^H diverges as components are added",
                2.0 * hurst * lambda_decay
            );
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn c_min(&self) -> f64 {
        self.c[0]
    }

    pub fn c_max(&self) -> f64 {
        *self.c.last().unwrap()
    }

    /// Diagonal of `M^{-1} Q^{1/2}`.
    pub fn limit_scale(&self) -> Vec<f64> {
        self.lambda.iter().zip(&self.c).map(|(l, c)| l.sqrt() / c).collect()
    }

    /// Stationary variances `C_H λ_i / c_i^{2H}`.
    pub fn stationary_variances(&self) -> Result<Vec<f64>> {
        let ch = super::ch_constant(self.hurst)?;
        Ok(self
            .lambda
            .iter()
            .zip(&self.c)
            .map(|(l, c)| ch * l / c.powf(2.0 * self.hurst))
            .collect())
    }

    /// Checks the range in which the homogenisation limit holds,
    /// `H ∈ (1/3, 1)`, `H ≠ 1/2`.
    pub fn check_theorem_range(&self) -> Result<()> {
        let h = self.hurst;
        if !(h > 1.0 / 3.0 && h < 1.0) || (h - 0.5).abs() < 1e-12 {
            return Err(domain(format!("Hurst index {h} outside (1/3, 1) \\ {{1/2}}")));
        }
        Ok(())
    }

    /// Relative tail `Σ_{i>m} i^{-2Hq} / Σ_{i≤m} λ_i^{2H}` estimated by the
    /// integral bound.
    pub fn trace_tail_estimate(&self) -> f64 {
        let e = 2.0 * self.hurst * self.lambda_decay;
        if e <= 1.0 {
            return f64::INFINITY;
        }
        let m = self.len() as f64;
        let head: f64 = self.lambda.iter().map(|l| l.powf(2.0 * self.hurst)).sum();
        m.powf(1.0 - e) / (e - 1.0) / head
    }

    /// Mode fields `e_i` for this spectrum on `grid`.
    pub fn mode_map(&self, grid: &TorusGrid) -> Result<ModeBasis> {
        ModeBasis::lowest(grid, self.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spectrum_bounds() {
        let s = NoiseSpectrum::default_for(0.4).unwrap();
        assert_eq!(s.len(), 16);
        assert!((s.c_min() - 1.5).abs() < 1e-15 && s.c_max() < 2.0);
        assert!(s.trace_tail_estimate() < 0.1);
        assert!(s.check_theorem_range().is_ok());
        assert!(NoiseSpectrum::default_for(0.5).unwrap().check_theorem_range().is_err());
        assert!(NoiseSpectrum::new(0.4, vec![1.0], vec![2.0, 1.0], 3.0).is_err());
    }
}
