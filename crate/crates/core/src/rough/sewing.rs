use super::{ControlFn, NormTag, TwoParamProcess};
use crate::error::{domain, structural, Error, Result};
use crate::quad::wynn_epsilon;
use crate::time_grid::TimeGrid;

/// Result of sewing a grid germ.
#[derive(Clone, Debug)]
pub struct SewingOutput {
    /// `I_{t_k}` with `I_{t_0} = 0`.
    pub integral: Vec<f64>,
    /// `I♮_{s,t} = I_{s,t} − Ξ_{s,t}`.
    pub remainder: TwoParamProcess,
    /// `max |δΞ_{s,u,t}| / ω(s,t)^a`.
    pub beta: f64,
    pub exponent: f64,
    /// Sewing constant `2^a ζ(a)`.
    pub constant: f64,
    /// `max |I♮_{s,t}| / (C β ω(s,t)^a)`; at most 1 when the bound holds.
    pub bound_ratio: f64,
    /// Exponent of `|δΞ|` against `ω` fitted over the finest dyadic scales,
    /// `None` when the germ is additive.
    pub fitted_exponent: Option<f64>,
}

impl SewingOutput {
    pub fn certified(&self) -> bool {
        self.bound_ratio <= 1.0 + 1e-9
    }
}

/// `ζ(a)` for `a > 1` by Euler-Maclaurin.
pub fn zeta(a: f64) -> f64 {
    let k = 64.0f64;
    let head: f64 = (1..64).map(|j| (j as f64).powf(-a)).sum();
    let tail = k.powf(1.0 - a) / (a - 1.0) + 0.5 * k.powf(-a) + a * k.powf(-a - 1.0) / 12.0;
    head + tail
}

/// Constant in `|I♮_{s,t}| ≤ C(a) β ω(s,t)^a` obtained by successive removal
/// of partition points.
pub fn sewing_constant(a: f64) -> f64 {
    2f64.powf(a) * zeta(a)
}

/// `δΞ_{s,u,t} = Ξ_{s,t} − Ξ_{s,u} − Ξ_{u,t}`.
pub fn delta(germ: &TwoParamProcess, s: usize, u: usize, t: usize) -> f64 {
    germ.get(s, t) - germ.get(s, u) - germ.get(u, t)
}

/// Sews a scalar germ given on all grid pairs.
///
/// On a grid the compensated sums over finer and finer partitions end at the
/// partition into adjacent intervals, so `I_{t_k} = Σ_{j<k} Ξ_{t_j,t_{j+1}}`.
/// The output records `β`, the remainder and whether the sewing bound holds.
pub fn sewing(germ: &TwoParamProcess, a: f64, omega: &ControlFn) -> Result<SewingOutput> {
    if germ.tag() != NormTag::Scalar {
        return Err(structural("sewing needs signed scalar increments"));
    }
    if !germ.grid().same_as(omega.grid()) {
        return Err(structural("germ and control live on different grids"));
    }
    if !(a > 1.0) {
        return Err(domain(format!("sewing exponent must exceed 1, got {a}")));
    }
    let n = germ.len();
    let scale = germ.max_norm().max(f64::MIN_POSITIVE);
    let noise_floor = 1e-13 * scale;
    let mut beta: f64 = 0.0;
    for s in 0..n {
        for t in s + 2..n {
            let w = omega.get(s, t).powf(a);
            for u in s + 1..t {
                let d = delta(germ, s, u, t).abs();
                if d <= noise_floor {
                    continue;
                }
                if w == 0.0 {
                    return Err(Error::Convergence(format!(
                        "germ defect {d:e} on ({s}, {u}, {t}) where the control vanishes"
                    )));
                }
                beta = beta.max(d / w);
            }
        }
    }
    let fit = fit_defect_exponent(germ, omega, noise_floor);
    if let Some((f, se)) = fit {
        if f + FIT_SIGMAS * se <= 1.0 {
            return Err(Error::Convergence(format!(
                "germ defect scales like ω^{f:.3} (standard error {se:.3}); refinement does not converge"
            )));
        }
    }
    let fitted = fit.map(|(f, _)| f);
    let mut integral = vec![0.0; n];
    for k in 1..n {
        integral[k] = integral[k - 1] + germ.get(k - 1, k);
    }
    let remainder = TwoParamProcess::from_fn(germ.grid(), NormTag::Scalar, |i, j| {
        integral[j] - integral[i] - germ.get(i, j)
    });
    let constant = sewing_constant(a);
    let mut bound_ratio: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = remainder.norm(i, j);
            if r <= noise_floor {
                continue;
            }
            let b = constant * beta * omega.get(i, j).powf(a);
            bound_ratio = bound_ratio.max(if b > 0.0 { r / b } else { f64::INFINITY });
        }
    }
    Ok(SewingOutput { integral, remainder, beta, exponent: a, constant, bound_ratio, fitted_exponent: fitted })
}

const FIT_LEVELS: usize = 3;
/// A fitted exponent counts as at most 1 only this many standard errors
/// below it.
const FIT_SIGMAS: f64 = 2.0;

/// Slope of the level log-means of `|δΞ|` against `ln ω` and its standard
/// error from the spread within each level.
fn fit_defect_exponent(germ: &TwoParamProcess, omega: &ControlFn, floor: f64) -> Option<(f64, f64)> {
    let n = germ.len();
    let mut pts = Vec::new();
    let mut len = 2;
    while len < n {
        // log-means: level means of |δΞ| are dominated by a few large defects
        let (mut dsum, mut dsq, mut wsum, mut count) = (0.0, 0.0, 0.0, 0usize);
        let mut s = 0;
        while s + len < n {
            let d = delta(germ, s, s + len / 2, s + len).abs();
            let w = omega.get(s, s + len);
            if d > floor && w > 0.0 {
                dsum += d.ln();
                dsq += d.ln() * d.ln();
                wsum += w.ln();
                count += 1;
            }
            s += len / 2;
        }
        if count > 0 {
            let c = count as f64;
            let mean = dsum / c;
            let var_of_mean = (dsq / c - mean * mean).max(0.0) / c;
            pts.push((wsum / c, mean, var_of_mean));
        }
        len *= 2;
    }
    log::debug!("defect level means (ln ω, ln |δΞ|): {pts:?}");
    // only the finest levels reflect the small-scale behaviour that decides
    // convergence of the refinements
    pts.truncate(FIT_LEVELS);
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let se = pts.iter().map(|p| ((p.0 - mx) / sxx).powi(2) * p.2).sum::<f64>().sqrt();
    Some((sxy / sxx, se))
}

/// Options for [`sew_continuous`].
#[derive(Clone, Copy, Debug)]
pub struct RefinementOptions {
    pub max_levels: usize,
    pub rel_tol: f64,
    /// Pieces per refinement (2 gives dyadic refinement).
    pub base: usize,
}

impl Default for RefinementOptions {
    fn default() -> Self {
        Self { max_levels: 20, rel_tol: 1e-10, base: 2 }
    }
}

/// Sews a germ defined for all times: on each grid interval the compensated
/// sums over `base^ℓ` equal pieces are accelerated with Wynn's epsilon
/// algorithm until two successive estimates agree to `rel_tol` (relative to
/// the largest germ value seen) or `max_levels` is reached.
pub fn sew_continuous(
    germ: impl Fn(f64, f64) -> f64,
    grid: &TimeGrid,
    opts: RefinementOptions,
) -> Result<Vec<f64>> {
    if opts.base < 2 {
        return Err(domain("refinement base must be at least 2"));
    }
    let t = grid.times();
    let mut out = vec![0.0; t.len()];
    for k in 1..t.len() {
        let (s, e) = (t[k - 1], t[k]);
        let mut sums = Vec::new();
        let mut scale: f64 = 0.0;
        let mut prev_est = f64::NAN;
        let mut pieces = 1usize;
        let mut done = None;
        for level in 0..=opts.max_levels {
            let h = (e - s) / pieces as f64;
            let mut acc = 0.0;
            for j in 0..pieces {
                let v = germ(s + j as f64 * h, if j + 1 == pieces { e } else { s + (j + 1) as f64 * h });
                scale = scale.max(v.abs());
                acc += v;
            }
            sums.push(acc);
            let est = if sums.len() >= 3 { wynn_epsilon(&sums).0 } else { acc };
            let tol = opts.rel_tol * scale.max(f64::MIN_POSITIVE);
            if level >= 2 && (est - prev_est).abs() <= tol {
                done = Some(est);
                break;
            }
            prev_est = est;
            pieces *= opts.base;
        }
        let value = match done {
            Some(v) => v,
            None => {
                let l = sums.len();
                let d1 = (sums[l - 1] - sums[l - 2]).abs();
                let d0 = (sums[l - 2] - sums[l - 3]).abs();
                let fitted = 1.0 + (d0 / d1).ln() / (opts.base as f64).ln();
                return Err(Error::Convergence(format!(
                    "compensated sums on [{s}, {e}] not converged after {} levels; fitted defect exponent {fitted:.3}",
                    opts.max_levels
                )));
            }
        };
        out[k] = out[k - 1] + value;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn additive_germ_is_its_own_integral() {
        let g = TimeGrid::uniform(0.0, 1.0, 16);
        let f = |t: f64| (3.0 * t).sin() + t * t;
        let germ = TwoParamProcess::from_fn(&g, NormTag::Scalar, |i, j| f(g.at(j)) - f(g.at(i)));
        let out = sewing(&germ, 2.0, &ControlFn::linear(&g, 1.0).unwrap()).unwrap();
        for k in 0..g.len() {
            assert!((out.integral[k] - (f(g.at(k)) - f(0.0))).abs() < 1e-14);
        }
        assert!(out.remainder.max_norm() < 1e-14);
        assert!(out.fitted_exponent.is_none());
    }

    #[test]
    fn pure_remainder_germ_continuous() {
        let g = TimeGrid::uniform(0.0, 1.0, 4);
        let i = sew_continuous(|s, t| (t - s).powi(2), &g, RefinementOptions::default()).unwrap();
        assert!(i.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn sublinear_germ_is_rejected() {
        let g = TimeGrid::uniform(0.0, 1.0, 32);
        let germ = TwoParamProcess::from_fn(&g, NormTag::Scalar, |i, j| (g.at(j) - g.at(i)).sqrt());
        let err = sewing(&germ, 1.5, &ControlFn::linear(&g, 1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Convergence(_)));
        assert!(sewing(&germ, 1.0, &ControlFn::linear(&g, 1.0).unwrap()).is_err());
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-10);
    }
}
