use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TorusGrid;
use crate::error::{structural, Result};

/// Sobolev index `r` of the scale `‖u‖_{H^r} = (Σ_{k≠0} |k|^{2r} |û(k)|²)^{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevLevel(pub f64);

impl SobolevLevel {
    pub const L2: SobolevLevel = SobolevLevel(0.0);

    pub fn exponent(self) -> f64 {
        self.0
    }
}

/// Vector field on the torus held as truncated Fourier amplitudes,
/// `u(x) = Σ_k û(k) e^{i k·x}`.
///
/// Coefficients are stored component-major: component `c` occupies the
/// slice `[c·N^d, (c+1)·N^d)` in the grid's flat wavevector order. The inner
/// product is the normalised `L²` pairing `⟨u, v⟩ = Σ_k û(k)·conj(v̂(k))`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl FourierField {
    pub fn zeros(grid: &TorusGrid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.dim() * grid.points()],
        }
    }

    pub fn from_coeffs(grid: &TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.dim() * grid.points() {
            return Err(structural(format!(
                "coefficient layout has {} entries, grid expects {} components x {} modes",
                coeffs.len(),
                grid.dim(),
                grid.points()
            )));
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    /// Constant field `v`. Only meaningful as a transport direction; state
    /// fields are always mean-zero.
    pub fn uniform(grid: &TorusGrid, v: &[f64]) -> Result<Self> {
        if v.len() != grid.dim() {
            return Err(structural("uniform field needs one entry per component"));
        }
        let mut f = Self::zeros(grid);
        let p = grid.points();
        for (c, &vc) in v.iter().enumerate() {
            f.coeffs[c * p] = Complex64::new(vc, 0.0);
        }
        Ok(f)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let p = self.grid.points();
        &self.coeffs[c * p..(c + 1) * p]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let p = self.grid.points();
        &mut self.coeffs[c * p..(c + 1) * p]
    }

    /// Amplitude vector `û(k)`.
    pub fn coeff(&self, k: &[i64]) -> Option<Vec<Complex64>> {
        let flat = self.grid.flat_index(k)?;
        let p = self.grid.points();
        Some((0..self.grid.dim()).map(|c| self.coeffs[c * p + flat]).collect())
    }

    pub fn set_coeff(&mut self, k: &[i64], amp: &[Complex64]) -> Result<()> {
        let flat = self
            .grid
            .flat_index(k)
            .ok_or_else(|| structural(format!("wavevector {k:?} not representable on this grid")))?;
        if amp.len() != self.grid.dim() {
            return Err(structural("amplitude needs one entry per component"));
        }
        let p = self.grid.points();
        for (c, a) in amp.iter().enumerate() {
            self.coeffs[c * p + flat] = *a;
        }
        Ok(())
    }

    /// Sets `û(k) = amp` and `û(-k) = conj(amp)`, keeping the field real.
    pub fn set_mode_pair(&mut self, k: &[i64], amp: &[Complex64]) -> Result<()> {
        self.set_coeff(k, amp)?;
        let neg: Vec<i64> = k.iter().map(|x| -x).collect();
        let conj: Vec<Complex64> = amp.iter().map(|a| a.conj()).collect();
        self.set_coeff(&neg, &conj)
    }

    pub fn same_grid(&self, other: &FourierField) -> Result<()> {
        if self.grid != other.grid {
            return Err(structural(format!(
                "grid mismatch: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// Real part of `Σ û·conj(v̂)`.
    pub fn inner(&self, other: &FourierField) -> f64 {
        debug_assert!(self.grid == other.grid);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &FourierField) {
        debug_assert!(self.grid == other.grid);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * alpha;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.coeffs {
            *a *= alpha;
        }
    }

    /// Zero mode amplitude.
    pub fn mean(&self) -> Vec<Complex64> {
        let p = self.grid.points();
        (0..self.grid.dim()).map(|c| self.coeffs[c * p]).collect()
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean().iter().all(|m| m.norm() == 0.0)
    }

    /// Largest `|û(-k) - conj(û(k))|`.
    pub fn reality_defect(&self) -> f64 {
        let p = self.grid.points();
        let mut worst: f64 = 0.0;
        for c in 0..self.grid.dim() {
            for flat in 0..p {
                let neg = self.grid.negate_index(flat);
                let d = (self.coeffs[c * p + neg] - self.coeffs[c * p + flat].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest `|k·û(k)| / |û(k)|` over nonzero modes.
    pub fn divergence_defect(&self) -> f64 {
        let p = self.grid.points();
        let d = self.grid.dim();
        let mut worst: f64 = 0.0;
        for flat in 1..p {
            let k = self.grid.wavevector(flat);
            let mut div = Complex64::new(0.0, 0.0);
            let mut mag = 0.0;
            for c in 0..d {
                let a = self.coeffs[c * p + flat];
                div += a * k[c] as f64;
                mag += a.norm_sqr();
            }
            if mag > 0.0 {
                worst = worst.max(div.norm() / (mag.sqrt() * self.grid.k2(flat).sqrt()));
            }
        }
        worst
    }

    /// Zeroes every mode outside the dealiasing band.
    pub fn truncate_to_band(&mut self) {
        let p = self.grid.points();
        let mask = self.grid.band_mask().to_vec();
        for c in 0..self.grid.dim() {
            for (flat, keep) in mask.iter().enumerate() {
                if !keep {
                    self.coeffs[c * p + flat] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// True when all energy sits inside the dealiasing band.
    pub fn is_band_limited(&self) -> bool {
        let p = self.grid.points();
        (0..self.grid.dim()).all(|c| {
            (0..p).all(|flat| self.grid.in_band(flat) || self.coeffs[c * p + flat].norm() == 0.0)
        })
    }

    /// Wavevector indices carrying nonzero amplitude in any component.
    pub fn support(&self) -> Vec<usize> {
        let p = self.grid.points();
        (0..p)
            .filter(|&flat| (0..self.grid.dim()).any(|c| self.coeffs[c * p + flat].norm() != 0.0))
            .collect()
    }

    /// Component values on the physical grid `x_j = 2πj/N`.
    pub fn to_physical(&self) -> Vec<Vec<f64>> {
        (0..self.grid.dim())
            .map(|c| {
                let mut buf = self.component(c).to_vec();
                self.grid.fft(&mut buf, true);
                buf.into_iter().map(|z| z.re).collect()
            })
            .collect()
    }

    pub fn from_physical(grid: &TorusGrid, values: &[Vec<f64>]) -> Result<Self> {
        if values.len() != grid.dim() || values.iter().any(|v| v.len() != grid.points()) {
            return Err(structural("physical values do not match the grid layout"));
        }
        let mut coeffs = Vec::with_capacity(grid.dim() * grid.points());
        for comp in values {
            let mut buf: Vec<Complex64> = comp.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            grid.fft(&mut buf, false);
            coeffs.extend(buf);
        }
        Self::from_coeffs(grid, coeffs)
    }

    /// Random real, mean-zero, divergence-free field supported in the
    /// dealiasing band, with amplitudes damped by `(1 + |k|²)^{-decay/2}`.
    pub fn random_band_limited<R: Rng + ?Sized>(grid: &TorusGrid, rng: &mut R, decay: f64) -> Self {
        let p = grid.points();
        let d = grid.dim();
        let mut f = Self::zeros(grid);
        for flat in 1..p {
            if !grid.in_band(flat) {
                continue;
            }
            let neg = grid.negate_index(flat);
            if neg < flat {
                continue;
            }
            let weight = (1.0 + grid.k2(flat)).powf(-decay / 2.0);
            for c in 0..d {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let a = Complex64::new(re, im) * weight;
                f.coeffs[c * p + flat] = a;
                f.coeffs[c * p + neg] = a.conj();
            }
        }
        super::leray_project(&f)
    }
}

impl Add for &FourierField {
    type Output = FourierField;
    fn add(self, rhs: &FourierField) -> FourierField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &FourierField {
    type Output = FourierField;
    fn sub(self, rhs: &FourierField) -> FourierField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &FourierField {
    type Output = FourierField;
    fn mul(self, rhs: f64) -> FourierField {
        let mut out = self.clone();
        out.scale(rhs);
        out
    }
}

impl Neg for &FourierField {
    type Output = FourierField;
    fn neg(self) -> FourierField {
        self * -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn random_fields_satisfy_invariants() {
        let g = TorusGrid::default_2d();
        let f = FourierField::random_band_limited(&g, &mut stream_rng(1, 0), 1.0);
        assert!(f.reality_defect() < 1e-15);
        assert!(f.is_mean_zero());
        assert!(f.divergence_defect() < 1e-12);
        assert!(f.is_band_limited());
    }

    #[test]
    fn physical_round_trip_is_real() {
        let g = TorusGrid::new(2, 16, 2.0 / 3.0).unwrap();
        let f = FourierField::random_band_limited(&g, &mut stream_rng(2, 0), 0.0);
        let phys = f.to_physical();
        let back = FourierField::from_physical(&g, &phys).unwrap();
        assert!((&back - &f).norm_l2() < 1e-13);
    }

    #[test]
    fn layout_mismatch_is_structural() {
        let g = TorusGrid::new(2, 8, 1.0).unwrap();
        assert!(FourierField::from_coeffs(&g, vec![Complex64::new(0.0, 0.0); 64]).is_err());
    }
}
