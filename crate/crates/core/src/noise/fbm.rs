use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::{label, stream_rng};
use crate::time_grid::TimeGrid;

/// Largest sample count for the dense Cholesky fallback.
pub const CHOLESKY_LIMIT: usize = 1 << 12;

/// Sample of independent fractional Brownian motions on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FbmPath {
    pub grid: TimeGrid,
    pub hurst: f64,
    /// `values[i][k]` is component `i` at grid point `k`.
    pub values: Vec<Vec<f64>>,
    /// Grid index where every component vanishes.
    pub anchor: usize,
}

impl FbmPath {
    pub fn components(&self) -> usize {
        self.values.len()
    }

    pub fn increment(&self, i: usize, a: usize, b: usize) -> f64 {
        self.values[i][b] - self.values[i][a]
    }
}

/// Autocovariance of unit-step fractional Gaussian noise.
pub fn fgn_autocovariance(hurst: f64, lag: usize) -> f64 {
    let k = lag as f64;
    let h2 = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

enum Method {
    Circulant { sqrt_eig: Vec<f64>, fft: Arc<dyn Fft<f64>> },
    Cholesky { factor: DMatrix<f64> },
}

/// Exact sampler of `n` consecutive unit-step fractional Gaussian noise
/// increments.
///
/// Uses circulant embedding of size `2n`; each complex draw yields two
/// independent samples. When the embedding has a negative eigenvalue the
/// sampler falls back to a dense Cholesky factor (only for `n ≤ 4096`).
pub struct FgnSampler {
    n: usize,
    hurst: f64,
    method: Method,
}

impl FgnSampler {
    pub fn new(hurst: f64, n: usize) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(domain(format!("Hurst index must lie in (0, 1), got {hurst}")));
        }
        if n == 0 {
            return Err(domain("need at least one increment"));
        }
        let size = 2 * n;
        let mut row: Vec<Complex64> = (0..size)
            .map(|j| {
                let lag = if j <= n { j } else { size - j };
                Complex64::new(fgn_autocovariance(hurst, lag), 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(size);
        fft.process(&mut row);
        let max = row.iter().map(|z| z.re).fold(0.0, f64::max);
        let min = row.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        if min < -1e-10 * max {
            log::warn!("circulant embedding not non-negative (min eigenvalue {min:e}); falling back to Cholesky");
            return Self::cholesky(hurst, n);
        }
        let sqrt_eig = row.iter().map(|z| (z.re.max(0.0) / size as f64).sqrt()).collect();
        Ok(Self { n, hurst, method: Method::Circulant { sqrt_eig, fft } })
    }

    /// Dense Cholesky sampler.
    pub fn cholesky(hurst: f64, n: usize) -> Result<Self> {
        if n > CHOLESKY_LIMIT {
            return Err(Error::Resource(format!(
                "Cholesky fallback limited to {CHOLESKY_LIMIT} increments, {n} requested"
            )));
        }
        let cov = DMatrix::from_fn(n, n, |i, j| fgn_autocovariance(hurst, i.abs_diff(j)));
        let factor = cov
            .cholesky()
            .ok_or_else(|| Error::Convergence("fGN covariance not positive definite".into()))?
            .l();
        Ok(Self { n, hurst, method: Method::Cholesky { factor } })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn is_circulant(&self) -> bool {
        matches!(self.method, Method::Circulant { .. })
    }

    /// Two independent unit-step fGN sequences.
    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        match &self.method {
            Method::Circulant { sqrt_eig, fft } => {
                let mut buf: Vec<Complex64> = sqrt_eig
                    .iter()
                    .map(|&s| {
                        let a: f64 = rng.sample(StandardNormal);
                        let b: f64 = rng.sample(StandardNormal);
                        Complex64::new(a * s, b * s)
                    })
                    .collect();
                fft.process(&mut buf);
                let re = buf[..self.n].iter().map(|z| z.re).collect();
                let im = buf[..self.n].iter().map(|z| z.im).collect();
                (re, im)
            }
            Method::Cholesky { factor } => {
                let mut draw = || {
                    let z = DVector::from_fn(self.n, |_, _| rng.sample::<f64, _>(StandardNormal));
                    (factor * z).iter().copied().collect::<Vec<f64>>()
                };
                let a = draw();
                let b = draw();
                (a, b)
            }
        }
    }
}

/// Samples `components` independent fBMs with Hurst index `hurst` on a
/// uniform grid.
///
/// Paths vanish at `t = 0` when it lies on the grid, otherwise at the grid
/// start. Components `2j` and `2j+1` share the RNG stream `j` of `seed`.
pub fn sample_fbm(hurst: f64, grid: &TimeGrid, components: usize, seed: u64) -> Result<FbmPath> {
    let dt = grid
        .uniform_step()
        .ok_or_else(|| domain("fBM sampling needs a uniform time grid"))?;
    let n = grid.intervals();
    let sampler = FgnSampler::new(hurst, n.max(1))?;
    sample_fbm_with(&sampler, grid, dt, components, seed)
}

/// As [`sample_fbm`] with a prepared sampler (reused across replicas).
pub fn sample_fbm_with(
    sampler: &FgnSampler,
    grid: &TimeGrid,
    dt: f64,
    components: usize,
    seed: u64,
) -> Result<FbmPath> {
    let n = grid.intervals();
    if sampler.len() != n.max(1) {
        return Err(domain("sampler length does not match the grid"));
    }
    let scale = dt.powf(sampler.hurst());
    let anchor = grid.index_of(0.0).unwrap_or(0);
    let mut values = Vec::with_capacity(components);
    for pair in 0..components.div_ceil(2) {
        let mut rng = stream_rng(seed, label(0, pair as u64));
        let (a, b) = sampler.sample_pair(&mut rng);
        for incs in [a, b] {
            if values.len() == components {
                break;
            }
            let mut path = Vec::with_capacity(n + 1);
            let mut acc = 0.0;
            path.push(0.0);
            for x in incs.iter().take(n) {
                acc += x * scale;
                path.push(acc);
            }
            let base = path[anchor];
            for v in &mut path {
                *v -= base;
            }
            values.push(path);
        }
    }
    Ok(FbmPath { grid: grid.clone(), hurst: sampler.hurst(), values, anchor })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_autocovariance_is_white() {
        assert_eq!(fgn_autocovariance(0.5, 0), 1.0);
        assert!(fgn_autocovariance(0.5, 3).abs() < 1e-15);
    }

    #[test]
    fn cholesky_and_circulant_have_same_second_moments() {
        // compare sample covariance of lag-1 products against the exact value
        let h = 0.35;
        let n = 16;
        for sampler in [FgnSampler::new(h, n).unwrap(), FgnSampler::cholesky(h, n).unwrap()] {
            let mut rng = stream_rng(4, 0);
            let reps = 20000;
            let (mut c0, mut c1) = (0.0, 0.0);
            for _ in 0..reps {
                let (a, b) = sampler.sample_pair(&mut rng);
                for x in [a, b] {
                    c0 += x[5] * x[5];
                    c1 += x[5] * x[6];
                }
            }
            let m = 2.0 * reps as f64;
            assert!((c0 / m - 1.0).abs() < 0.05);
            assert!((c1 / m - fgn_autocovariance(h, 1)).abs() < 0.05);
        }
    }

    #[test]
    fn anchored_at_zero_and_deterministic() {
        let g = TimeGrid::uniform(-1.0, 1.0, 64);
        let a = sample_fbm(0.4, &g, 3, 11).unwrap();
        let b = sample_fbm(0.4, &g, 3, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.anchor, 32);
        assert!(a.values.iter().all(|v| v[32] == 0.0));
        assert!(sample_fbm(0.4, &TimeGrid::new(vec![0.0, 0.1, 0.3]).unwrap(), 1, 0).is_err());
    }
}
