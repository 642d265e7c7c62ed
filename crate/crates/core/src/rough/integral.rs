use super::sewing::{sewing, SewingOutput};
use super::{p_variation, ControlFn, DiscretePath, Level2Area, NormTag, TwoParamProcess};
use crate::error::{domain, structural, Result};
use crate::time_grid::TimeGrid;

/// Rough integral `∫ y dZ` of a controlled pair against a level-2 lift.
#[derive(Clone, Debug)]
pub struct RoughIntegral {
    /// `∫_0^{t_k} y dZ` on the lift grid.
    pub path: Vec<f64>,
    /// Sewing diagnostics on the check grid.
    pub sewing: SewingOutput,
    pub check_grid: TimeGrid,
    /// `‖R^y‖_{1/(2α)-var}` of `R^y_{s,t} = y_{s,t} − y′_s Z_{s,t}` on the
    /// check grid.
    pub controlled_remainder_variation: f64,
}

/// Germ `Ξ_{s,t} = Σ_j y^j_s Z^j_{s,t} + Σ_{i,j} y′^{ij}_s 𝕏^{ij}_{s,t}` with
/// `y′^{ij} = ∂y^j/∂Z^i` stored row-major.
pub fn integral_germ(y: &DiscretePath, yprime: &DiscretePath, z: &Level2Area, s: usize, t: usize) -> f64 {
    let m = z.dim();
    let ys = y.point(s);
    let yp = yprime.point(s);
    let inc = z.increment(s, t);
    let area = z.area(s, t);
    let mut acc = 0.0;
    for j in 0..m {
        acc += ys[j] * inc[j];
    }
    for k in 0..m * m {
        acc += yp[k] * area[k];
    }
    acc
}

/// Compensated-sum rough integral.
///
/// The integral is the limit of compensated sums, which on the lift grid is
/// the sum of adjacent germs. `β`, the sewing remainder and the controlledness
/// of `(y, y′)` are checked on a sub-grid of at most `check_points` points
/// (every grid point when the grid is small enough).
pub fn rough_integral(
    y: &DiscretePath,
    yprime: &DiscretePath,
    z: &Level2Area,
    alpha: f64,
    check_points: usize,
) -> Result<RoughIntegral> {
    let m = z.dim();
    if y.dim() != m || yprime.dim() != m * m {
        return Err(structural(format!(
            "controlled pair has dimensions ({}, {}), lift needs ({m}, {})",
            y.dim(),
            yprime.dim(),
            m * m
        )));
    }
    if !y.grid().same_as(z.grid()) {
        return Err(structural("integrand and lift live on different grids"));
    }
    if !yprime.grid().same_as(z.grid()) {
        return Err(structural("Gubinelli derivative and lift live on different grids"));
    }
    if !(alpha > 1.0 / 3.0 && alpha <= 1.0) {
        return Err(domain(format!("roughness exponent {alpha} outside (1/3, 1]")));
    }
    let n = z.len();
    let mut path = vec![0.0; n];
    for k in 1..n {
        path[k] = path[k - 1] + integral_germ(y, yprime, z, k - 1, k);
    }
    let stride = check_stride(n, check_points.max(2));
    let check_grid = z.grid().stride(stride)?;
    let idx: Vec<usize> = (0..check_grid.len()).map(|k| k * stride).collect();
    let germ = TwoParamProcess::from_fn(&check_grid, NormTag::Scalar, |i, j| integral_germ(y, yprime, z, idx[i], idx[j]));
    // Pin the sewn path to the fine-grid sums so the remainder measures the
    // gap between the compensated limit and the coarse germ.
    let fine = TwoParamProcess::from_fn(&check_grid, NormTag::Scalar, |i, j| path[idx[j]] - path[idx[i]]);
    let omega = ControlFn::linear(&check_grid, 1.0)?;
    let mut sewn = sewing(&germ, 3.0 * alpha, &omega)?;
    sewn.integral = idx.iter().map(|&k| path[k]).collect();
    sewn.remainder = TwoParamProcess::from_fn(&check_grid, NormTag::Scalar, |i, j| fine.get(i, j) - germ.get(i, j));
    let floor = 1e-13 * germ.max_norm().max(f64::MIN_POSITIVE);
    let mut ratio: f64 = 0.0;
    for i in 0..check_grid.len() {
        for j in i + 1..check_grid.len() {
            let b = sewn.constant * sewn.beta * omega.get(i, j).powf(sewn.exponent);
            let r = sewn.remainder.norm(i, j);
            if r > floor {
                ratio = ratio.max(if b > 0.0 { r / b } else { f64::INFINITY });
            }
        }
    }
    sewn.bound_ratio = ratio;
    let rem = TwoParamProcess::from_fn(&check_grid, NormTag::Euclidean, |i, j| {
        let (s, t) = (idx[i], idx[j]);
        let inc = z.increment(s, t);
        let yp = yprime.point(s);
        let mut acc = 0.0;
        for jj in 0..m {
            let mut r = y.point(t)[jj] - y.point(s)[jj];
            for ii in 0..m {
                r -= yp[ii * m + jj] * inc[ii];
            }
            acc += r * r;
        }
        acc.sqrt()
    });
    let controlled_remainder_variation = p_variation(&rem, 1.0 / (2.0 * alpha.min(0.5)))?;
    Ok(RoughIntegral { path, sewing: sewn, check_grid, controlled_remainder_variation })
}

/// Largest divisor of `n − 1` giving at most `max_points` points.
pub(crate) fn check_stride(n: usize, max_points: usize) -> usize {
    let intervals = n.saturating_sub(1).max(1);
    (1..=intervals)
        .find(|s| intervals % s == 0 && intervals / s < max_points)
        .unwrap_or(intervals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rough::lift_piecewise_linear;

    #[test]
    fn constant_integrand_gives_increment() {
        let g = TimeGrid::uniform(0.0, 1.0, 32);
        let pts: Vec<Vec<f64>> = g.times().iter().map(|t| vec![(5.0 * t).sin(), t.powf(0.7)]).collect();
        let z = lift_piecewise_linear(&DiscretePath::from_points(g.clone(), &pts).unwrap());
        let kappa = [1.5, -2.0];
        let y = DiscretePath::from_points(g.clone(), &vec![kappa.to_vec(); g.len()]).unwrap();
        let yp = DiscretePath::zeros(g.clone(), 4);
        let r = rough_integral(&y, &yp, &z, 0.4, 17).unwrap();
        for k in 0..g.len() {
            let inc = z.increment(0, k);
            assert!((r.path[k] - kappa[0] * inc[0] - kappa[1] * inc[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn stride_choice() {
        assert_eq!(check_stride(2049, 65), 32);
        assert_eq!(check_stride(17, 65), 1);
    }
}
