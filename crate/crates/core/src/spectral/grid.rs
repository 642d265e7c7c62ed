use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{domain, Result};

struct Tables {
    /// Wavevector of each flat index, unused axes zero.
    kvec: Vec<[i64; 3]>,
    k2: Vec<f64>,
    /// Modes retained by the 2/3-type truncation (and never the Nyquist plane).
    band: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Periodic grid on `[0, 2π)^d` with `N` modes per axis.
///
/// Flat indices run over `N^d` wavevectors in FFT order, last axis fastest;
/// index `j` on an axis stands for wavenumber `j` if `j < N/2` and `j - N`
/// otherwise.
#[derive(Clone)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
    dealias_fraction: f64,
    tables: Arc<Tables>,
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .field("dealias_fraction", &self.dealias_fraction)
            .finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.dealias_fraction == other.dealias_fraction
    }
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize, dealias_fraction: f64) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(domain(format!("torus dimension must be 2 or 3, got {dim}")));
        }
        if n < 4 || n % 2 != 0 {
            return Err(domain(format!("modes per axis must be even and at least 4, got {n}")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(domain(format!("dealias fraction must lie in (0, 1], got {dealias_fraction}")));
        }
        let points = n.pow(dim as u32);
        let cutoff = dealias_fraction * n as f64 / 2.0;
        let half = (n / 2) as i64;
        let wave = |j: usize| -> i64 {
            let j = j as i64;
            if j < half {
                j
            } else {
                j - n as i64
            }
        };
        let mut kvec = Vec::with_capacity(points);
        let mut k2 = Vec::with_capacity(points);
        let mut band = Vec::with_capacity(points);
        for flat in 0..points {
            let mut k = [0i64; 3];
            let mut rem = flat;
            for axis in (0..dim).rev() {
                k[axis] = wave(rem % n);
                rem /= n;
            }
            let in_band = k[..dim]
                .iter()
                .all(|&kj| kj != -half && (kj.abs() as f64) <= cutoff + 1e-12);
            kvec.push(k);
            k2.push(k.iter().map(|&kj| (kj * kj) as f64).sum());
            band.push(in_band);
        }
        let mut planner = FftPlanner::new();
        let tables = Tables {
            kvec,
            k2,
            band,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        };
        Ok(Self { dim, n, dealias_fraction, tables: Arc::new(tables) })
    }

    /// `d = 2`, `N = 32`, 2/3 dealiasing.
    pub fn default_2d() -> Self {
        Self::new(2, 32, 2.0 / 3.0).expect("valid default grid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes_per_axis(&self) -> usize {
        self.n
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Number of wavevectors `N^d`.
    pub fn points(&self) -> usize {
        self.tables.k2.len()
    }

    pub fn wavevector(&self, flat: usize) -> [i64; 3] {
        self.tables.kvec[flat]
    }

    pub fn k2(&self, flat: usize) -> f64 {
        self.tables.k2[flat]
    }

    pub fn k2_table(&self) -> &[f64] {
        &self.tables.k2
    }

    pub fn in_band(&self, flat: usize) -> bool {
        self.tables.band[flat]
    }

    pub fn band_mask(&self) -> &[bool] {
        &self.tables.band
    }

    /// Largest `|k_j|` kept by the truncation.
    pub fn band_limit(&self) -> i64 {
        ((self.dealias_fraction * self.n as f64 / 2.0) + 1e-12).floor() as i64
    }

    /// Flat index of a wavevector, `None` if it is not representable.
    pub fn flat_index(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        let half = (self.n / 2) as i64;
        let mut flat = 0usize;
        for &kj in k {
            if kj < -half || kj >= half {
                return None;
            }
            let j = if kj < 0 { kj + self.n as i64 } else { kj } as usize;
            flat = flat * self.n + j;
        }
        Some(flat)
    }

    /// Flat index of `-k` for the wavevector at `flat`.
    pub fn negate_index(&self, flat: usize) -> usize {
        let k = self.tables.kvec[flat];
        let mut out = 0usize;
        for axis in 0..self.dim {
            let j = (-k[axis]).rem_euclid(self.n as i64) as usize;
            out = out * self.n + j;
        }
        out
    }

    /// Flat index of `k + q` with periodic wrap-around.
    pub fn add_index(&self, a: usize, b: usize) -> usize {
        let ka = self.tables.kvec[a];
        let kb = self.tables.kvec[b];
        let mut out = 0usize;
        for axis in 0..self.dim {
            let j = (ka[axis] + kb[axis]).rem_euclid(self.n as i64) as usize;
            out = out * self.n + j;
        }
        out
    }

    /// In-place `d`-dimensional FFT. The forward transform is normalised by
    /// `1/N^d` so that coefficients are the Fourier amplitudes of the field.
    pub(crate) fn fft(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.tables.inverse } else { &self.tables.forward };
        let total = self.points();
        debug_assert_eq!(data.len(), total);
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = stride * n;
            for base in (0..total).step_by(block) {
                for offset in 0..stride {
                    let start = base + offset;
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = data[start + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[start + j * stride] = *v;
                    }
                }
            }
        }
        if !inverse {
            let norm = 1.0 / total as f64;
            for v in data.iter_mut() {
                *v *= norm;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(TorusGrid::new(1, 8, 0.5).is_err());
        assert!(TorusGrid::new(2, 7, 0.5).is_err());
        assert!(TorusGrid::new(2, 8, 0.0).is_err());
        assert!(TorusGrid::new(3, 8, 2.0 / 3.0).is_ok());
    }

    #[test]
    fn index_round_trip() {
        let g = TorusGrid::new(3, 8, 2.0 / 3.0).unwrap();
        for flat in 0..g.points() {
            let k = g.wavevector(flat);
            assert_eq!(g.flat_index(&k[..3]), Some(flat));
            let neg = g.negate_index(flat);
            let kn = g.wavevector(neg);
            for a in 0..3 {
                assert_eq!((k[a] + kn[a]).rem_euclid(8), 0);
            }
        }
        assert_eq!(g.band_limit(), 2);
    }

    #[test]
    fn fft_round_trip() {
        let g = TorusGrid::new(2, 8, 1.0).unwrap();
        let orig: Vec<Complex64> = (0..64).map(|i| Complex64::new(i as f64, (i * i % 7) as f64)).collect();
        let mut data = orig.clone();
        g.fft(&mut data, false);
        g.fft(&mut data, true);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
