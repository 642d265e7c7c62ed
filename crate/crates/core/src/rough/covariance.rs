use serde::{Deserialize, Serialize};

use crate::error::{domain, structural, Error, Result};
use crate::time_grid::{tri_index, tri_len, TimeGrid};

/// Covariance of increments `R(u,v,u′,v′) = E[Y_{u,v} Y_{u′,v′}]` on grid
/// pairs, stored densely over packed pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceTable {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl CovarianceTable {
    pub fn from_fn(grid: &TimeGrid, f: impl Fn(f64, f64, f64, f64) -> f64) -> Self {
        let n = grid.len();
        let len = tri_len(n);
        let t = grid.times();
        let mut values = vec![0.0; len * len];
        for u in 0..n {
            for v in u..n {
                let a = tri_index(n, u, v);
                for up in 0..n {
                    for vp in up..n {
                        values[a * len + tri_index(n, up, vp)] = f(t[u], t[v], t[up], t[vp]);
                    }
                }
            }
        }
        Self { grid: grid.clone(), values }
    }

    /// Empirical covariance from sample paths on the grid.
    pub fn from_samples(grid: &TimeGrid, samples: &[Vec<f64>], min_samples: usize) -> Result<Self> {
        if samples.len() < min_samples {
            return Err(Error::InsufficientSamples { needed: min_samples, got: samples.len() });
        }
        let n = grid.len();
        if samples.iter().any(|s| s.len() != n) {
            return Err(structural("sample paths do not match the grid"));
        }
        let len = tri_len(n);
        let mut values = vec![0.0; len * len];
        let mut inc = vec![0.0; len];
        for s in samples {
            for u in 0..n {
                for v in u..n {
                    inc[tri_index(n, u, v)] = s[v] - s[u];
                }
            }
            for a in 0..len {
                if inc[a] == 0.0 {
                    continue;
                }
                let row = &mut values[a * len..(a + 1) * len];
                for (r, b) in row.iter_mut().zip(&inc) {
                    *r += inc[a] * b;
                }
            }
        }
        let k = samples.len() as f64;
        for v in &mut values {
            *v /= k;
        }
        Ok(Self { grid: grid.clone(), values })
    }

    /// Increments of fractional Brownian motion.
    pub fn fbm(grid: &TimeGrid, hurst: f64) -> Self {
        let h2 = 2.0 * hurst;
        Self::from_fn(grid, |u, v, up, vp| {
            0.5 * ((v - up).abs().powf(h2) + (u - vp).abs().powf(h2) - (v - vp).abs().powf(h2) - (u - up).abs().powf(h2))
        })
    }

    /// Increments of Brownian motion: overlap lengths.
    pub fn brownian(grid: &TimeGrid) -> Self {
        Self::from_fn(grid, |u, v, up, vp| (v.min(vp) - u.max(up)).max(0.0))
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn get(&self, u: usize, v: usize, up: usize, vp: usize) -> f64 {
        let n = self.grid.len();
        let len = tri_len(n);
        self.values[tri_index(n, u, v) * len + tri_index(n, up, vp)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Grid `ρ`-variation norm of a covariance table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CovarianceNorm {
    pub value: f64,
    /// True when the supremum over partition pairs was computed exactly.
    pub exact: bool,
}

/// Largest grid size for which [`covariance_grid_norm`] enumerates partitions.
pub const EXACT_COVARIANCE_POINTS: usize = 14;

/// `sup_{P,P′} (Σ_{[u,v]∈P} Σ_{[u′,v′]∈P′} |R(u,v,u′,v′)|^ρ)^{1/ρ}` over grid
/// partitions.
///
/// For a fixed `P` the inner supremum over `P′` is a one-dimensional dynamic
/// program. Up to [`EXACT_COVARIANCE_POINTS`] grid points every `P` is
/// enumerated, which makes the value exact. Beyond that the norm is a lower
/// bound obtained by alternating the dynamic program between the two
/// partitions from several starting partitions.
pub fn covariance_grid_norm(r: &CovarianceTable, rho: f64) -> Result<CovarianceNorm> {
    if !(rho >= 1.0) {
        return Err(domain(format!("covariance variation exponent must be at least 1, got {rho}")));
    }
    let n = r.grid.len();
    if n < 2 {
        return Ok(CovarianceNorm { value: 0.0, exact: true });
    }
    let len = tri_len(n);
    let pw: Vec<f64> = r.values.iter().map(|v| v.abs().powf(rho)).collect();
    let best_response = |p: &[usize]| -> (f64, Vec<usize>) {
        let weight = |up: usize, vp: usize| -> f64 {
            let b = tri_index(n, up, vp);
            p.windows(2).map(|w| pw[tri_index(n, w[0], w[1]) * len + b]).sum()
        };
        partition_dp(n, weight)
    };
    if n <= EXACT_COVARIANCE_POINTS {
        let interior = n - 2;
        let mut best: f64 = 0.0;
        for mask in 0u32..(1u32 << interior) {
            let mut p = vec![0];
            p.extend((0..interior).filter(|b| mask >> b & 1 == 1).map(|b| b + 1));
            p.push(n - 1);
            best = best.max(best_response(&p).0);
        }
        return Ok(CovarianceNorm { value: best.powf(1.0 / rho), exact: true });
    }
    log::info!("covariance norm on {n} points: alternating partition search (lower bound)");
    let mut starts: Vec<Vec<usize>> = vec![(0..n).collect(), vec![0, n - 1]];
    let mut step = 2;
    while step < n - 1 {
        let mut p: Vec<usize> = (0..n).step_by(step).collect();
        if *p.last().unwrap() != n - 1 {
            p.push(n - 1);
        }
        starts.push(p);
        step *= 2;
    }
    let mut best: f64 = 0.0;
    for start in starts {
        let mut p = start;
        let mut val = 0.0;
        for _ in 0..50 {
            let (v, q) = best_response(&p);
            if v <= val * (1.0 + 1e-14) {
                break;
            }
            val = v;
            p = q;
        }
        best = best.max(val);
    }
    Ok(CovarianceNorm { value: best.powf(1.0 / rho), exact: false })
}

/// Maximum of `Σ weight(u,v)` over partitions of `0..n` and the maximiser.
fn partition_dp(n: usize, weight: impl Fn(usize, usize) -> f64) -> (f64, Vec<usize>) {
    let mut best = vec![0.0f64; n];
    let mut arg = vec![0usize; n];
    for j in 1..n {
        let mut b = f64::NEG_INFINITY;
        for i in 0..j {
            let v = best[i] + weight(i, j);
            if v > b {
                b = v;
                arg[j] = i;
            }
        }
        best[j] = b;
    }
    let mut p = vec![n - 1];
    let mut k = n - 1;
    while k > 0 {
        k = arg[k];
        p.push(k);
    }
    p.reverse();
    (best[n - 1], p)
}

/// Outcome of [`coutin_qian_check`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoutinQianReport {
    /// Smallest `c` with `E|Y_{s,t}|² ≤ c |t−s|^{2H}` on the grid.
    pub c_variance: f64,
    /// Smallest `c` with `|E Y_{s,s+h} Y_{t,t+h}| ≤ c |t−s|^{2H−2} h²` over
    /// grid triples with `0 < h ≤ t − s`.
    pub c_correlation: f64,
    pub c_h: f64,
    pub pass: bool,
    /// `(s, t, h)` attaining the larger constant when the check fails.
    pub violating: Option<(f64, f64, f64)>,
}

/// Checks the two Coutin-Qian conditions against a covariance table and
/// accepts when the admissible constant stays below `cap`.
pub fn coutin_qian_check(r: &CovarianceTable, hurst: f64, cap: f64) -> Result<CoutinQianReport> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(domain(format!("Hurst index must lie in (0, 1), got {hurst}")));
    }
    let t = r.grid.times();
    let n = t.len();
    let mut c1: f64 = 0.0;
    let mut arg1 = (0.0, 0.0, 0.0);
    for s in 0..n {
        for u in s + 1..n {
            let v = r.get(s, u, s, u) / (t[u] - t[s]).powf(2.0 * hurst);
            if v > c1 {
                c1 = v;
                arg1 = (t[s], t[u], t[u] - t[s]);
            }
        }
    }
    let mut c2: f64 = 0.0;
    let mut arg2 = (0.0, 0.0, 0.0);
    for s in 0..n {
        for tt in s + 1..n {
            let gap = t[tt] - t[s];
            for hs in 1..n - tt {
                let h = t[s + hs] - t[s];
                if h > gap * (1.0 + 1e-12) {
                    break;
                }
                let ht = t[tt + hs] - t[tt];
                if (ht - h).abs() > 1e-9 * h {
                    continue;
                }
                let v = r.get(s, s + hs, tt, tt + hs).abs() / (gap.powf(2.0 * hurst - 2.0) * h * h);
                if v > c2 {
                    c2 = v;
                    arg2 = (t[s], t[tt], h);
                }
            }
        }
    }
    let c_h = c1.max(c2);
    let pass = c_h.is_finite() && c_h <= cap;
    let violating = (!pass).then_some(if c1 >= c2 { arg1 } else { arg2 });
    Ok(CoutinQianReport { c_variance: c1, c_correlation: c2, c_h, pass, violating })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_norm_is_horizon() {
        let g = TimeGrid::uniform(0.0, 2.0, 8);
        let v = covariance_grid_norm(&CovarianceTable::brownian(&g), 1.0).unwrap();
        assert!(v.exact && (v.value - 2.0).abs() < 1e-12);
        let big = TimeGrid::uniform(0.0, 2.0, 20);
        let w = covariance_grid_norm(&CovarianceTable::brownian(&big), 1.0).unwrap();
        assert!(!w.exact && (w.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_covariance() {
        let g = TimeGrid::uniform(0.0, 1.0, 5);
        let z = CovarianceTable::from_fn(&g, |_, _, _, _| 0.0);
        assert_eq!(covariance_grid_norm(&z, 1.5).unwrap().value, 0.0);
        assert!(covariance_grid_norm(&z, 0.5).is_err());
    }

    #[test]
    fn fbm_passes_coutin_qian() {
        let g = TimeGrid::uniform(0.0, 1.0, 16);
        let rep = coutin_qian_check(&CovarianceTable::fbm(&g, 0.4), 0.4, 10.0).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.c_variance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_samples() {
        let g = TimeGrid::uniform(0.0, 1.0, 3);
        let err = CovarianceTable::from_samples(&g, &[vec![0.0; 4]], 10).unwrap_err();
        assert!(matches!(err, Error::InsufficientSamples { needed: 10, got: 1 }));
    }
}
