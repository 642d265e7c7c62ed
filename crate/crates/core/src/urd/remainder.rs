use rayon::prelude::*;

use super::driver::{a1_from_modes, a2_from_modes, mode_operators, DriverPair};
use crate::error::{structural, Result};
use crate::rough::TwoParamProcess;
use crate::spectral::{laplacian, nonlinearity_b, sobolev_norm, FourierField, SobolevLevel};
use crate::time_grid::TimeGrid;

/// Deterministic part `F(u) = νΔu − Π(u·∇u)` of the equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Drift {
    pub nu: f64,
    pub nonlinear: bool,
}

impl Drift {
    pub fn eval(&self, u: &FourierField) -> Result<FourierField> {
        let mut f = laplacian(u);
        f.scale(self.nu);
        if self.nonlinear {
            f.axpy(1.0, &nonlinearity_b(u, u)?);
        }
        Ok(f)
    }
}

const FULL_TRIPLE_POINTS: usize = 24;

/// `R^u` on the grid together with the relative gap between
/// `δR^u_{s,r,t}` and `A¹_{r,t}u_{s,r}`, over all grid triples on small
/// grids and over the triples with `r = s + 1` or `r` the midpoint otherwise.
#[derive(Clone, Debug)]
pub struct RemainderReport {
    pub process: TwoParamProcess,
    pub delta_defect: f64,
}

fn check_states(grid: &TimeGrid, states: &[FourierField]) -> Result<()> {
    if grid.len() != states.len() {
        return Err(structural(format!(
            "{} states on a grid of {} points",
            states.len(),
            grid.len()
        )));
    }
    Ok(())
}

/// `R^u_{s,t} = u_{s,t} − A¹_{s,t}u_s`.
pub(crate) fn remainder_field(d: &DriverPair, idx: &[usize], states: &[FourierField], tu: &[FourierField], i: usize, j: usize) -> FourierField {
    let mut r = &states[j] - &states[i];
    r.axpy(-1.0, &a1_from_modes(&d.lift().increment(idx[i], idx[j]), tu, d.basis().grid()));
    r
}

fn all_mode_operators(d: &DriverPair, states: &[FourierField]) -> Result<Vec<Vec<FourierField>>> {
    states.par_iter().map(|u| mode_operators(d.basis(), u)).collect()
}

/// Remainder `R^u_{s,t} = u_{s,t} − A¹_{s,t}u_s` in `H^{-2}` for states on a
/// sub-grid of the driver grid.
pub fn remainder_compute(grid: &TimeGrid, states: &[FourierField], d: &DriverPair) -> Result<RemainderReport> {
    check_states(grid, states)?;
    let idx = d.lift().base().grid_indices(grid)?;
    let tu = all_mode_operators(d, states)?;
    let level = SobolevLevel(-2.0);
    let n = grid.len();
    let fields: Vec<Vec<Option<FourierField>>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| (j > i).then(|| remainder_field(d, &idx, states, &tu[i], i, j))).collect())
        .collect();
    let process = TwoParamProcess::from_field_fn(grid, level, |i, j| fields[i][j].clone().unwrap());
    let scale = process.max_norm().max(f64::MIN_POSITIVE);
    let mut defect: f64 = 0.0;
    for s in 0..n {
        for t in s + 2..n {
            let mids: Vec<usize> = if n <= FULL_TRIPLE_POINTS { (s + 1..t).collect() } else { vec![s + 1, (s + t) / 2] };
            for r in mids {
                let mut x = fields[s][t].clone().unwrap();
                x.axpy(-1.0, fields[s][r].as_ref().unwrap());
                x.axpy(-1.0, fields[r][t].as_ref().unwrap());
                let du = &states[r] - &states[s];
                x.axpy(-1.0, &d.a1(idx[r], idx[t], &du)?);
                defect = defect.max(sobolev_norm(&x, level));
            }
        }
    }
    Ok(RemainderReport { process, delta_defect: defect / scale })
}

/// `‖R^u_{s,t} − R^v_{s,t}‖_{H^{-2}}` for two trajectories on the same grid,
/// each with its own driver.
pub fn remainder_difference(
    grid: &TimeGrid,
    u: &[FourierField],
    du: &DriverPair,
    v: &[FourierField],
    dv: &DriverPair,
) -> Result<TwoParamProcess> {
    check_states(grid, u)?;
    check_states(grid, v)?;
    let iu = du.lift().base().grid_indices(grid)?;
    let iv = dv.lift().base().grid_indices(grid)?;
    let tu = all_mode_operators(du, u)?;
    let tv = all_mode_operators(dv, v)?;
    let n = grid.len();
    let level = SobolevLevel(-2.0);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j <= i {
                        return 0.0;
                    }
                    let a = remainder_field(du, &iu, u, &tu[i], i, j);
                    let b = remainder_field(dv, &iv, v, &tv[i], i, j);
                    sobolev_norm(&(&a - &b), level)
                })
                .collect()
        })
        .collect();
    Ok(TwoParamProcess::from_fn(grid, crate::rough::NormTag::Sobolev(level), |i, j| rows[i][j]))
}

/// Trapezoid prefix `∫_0^{t_k} F(u_r) dr` over the fine trajectory, kept at
/// every `stride`-th point, and `F(u_k)` at every point.
pub(crate) fn drift_prefix(
    grid: &TimeGrid,
    states: &[FourierField],
    drift: Drift,
    stride: usize,
) -> Result<(Vec<FourierField>, Vec<FourierField>)> {
    let f: Vec<FourierField> = states.par_iter().map(|u| drift.eval(u)).collect::<Result<_>>()?;
    let t = grid.times();
    let mut acc = FourierField::zeros(states[0].grid());
    let mut kept = vec![acc.clone()];
    for k in 1..states.len() {
        let h = 0.5 * (t[k] - t[k - 1]);
        acc.axpy(h, &f[k - 1]);
        acc.axpy(h, &f[k]);
        if k % stride == 0 {
            kept.push(acc.clone());
        }
    }
    Ok((kept, f))
}

/// Residual `u♮_{s,t} = u_{s,t} − ∫_s^t F(u) dr − A¹_{s,t}u_s − A²_{s,t}u_s`
/// in `H^{-3}` on every `stride`-th point of the trajectory grid; the drift
/// integral uses every trajectory point.
pub fn residual_compute(
    grid: &TimeGrid,
    states: &[FourierField],
    d: &DriverPair,
    drift: Drift,
    stride: usize,
) -> Result<TwoParamProcess> {
    check_states(grid, states)?;
    let coarse = grid.stride(stride)?;
    let (prefix, _) = drift_prefix(grid, states, drift, stride)?;
    let picked: Vec<FourierField> = states.iter().step_by(stride).cloned().collect();
    residual_on(&coarse, &picked, &prefix, d)
}

pub(crate) fn residual_on(
    grid: &TimeGrid,
    states: &[FourierField],
    prefix: &[FourierField],
    d: &DriverPair,
) -> Result<TwoParamProcess> {
    let idx = d.lift().base().grid_indices(grid)?;
    let tu = all_mode_operators(d, states)?;
    let n = grid.len();
    let level = SobolevLevel(-3.0);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j <= i {
                        return Ok(0.0);
                    }
                    let mut r = remainder_field(d, &idx, states, &tu[i], i, j);
                    r.axpy(-1.0, &prefix[j]);
                    r.axpy(1.0, &prefix[i]);
                    r.axpy(-1.0, &a2_from_modes(d.basis(), &d.lift().area(idx[i], idx[j]), &tu[i])?);
                    Ok(sobolev_norm(&r, level))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(TwoParamProcess::from_fn(grid, crate::rough::NormTag::Sobolev(level), |i, j| rows[i][j]))
}
