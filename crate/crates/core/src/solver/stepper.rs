use log::debug;

use super::{NoiseForcing, Scheme, SolverConfig, Trajectory};
use crate::error::{domain, structural, Error, Result};
use crate::spectral::{
    heat_in_place, laplacian, nonlinearity_b, sobolev_norm, transport_apply, FourierField, ModeBasis, SobolevLevel, TorusGrid,
};
use crate::time_grid::TimeGrid;
use crate::urd::{a1_from_modes, a2_from_modes, mode_operators, DriverPair};

const FIXED_POINT_TOL: f64 = 1e-14;
const FIXED_POINT_MAX: usize = 60;

/// Largest pointwise speed component on the collocation grid.
fn sup_bound(h: &FourierField) -> f64 {
    h.to_physical().iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
}

fn check_cfl(adv: &FourierField, dt: f64, cfg: &SolverConfig) -> Result<()> {
    let number = dt * sup_bound(adv) * cfg.grid.band_limit() as f64;
    if number > cfg.cfl_limit {
        return Err(domain(format!(
            "CFL violation: dt·sup|v|·k_max = {number:.3e} exceeds the bound {}",
            cfg.cfl_limit
        )));
    }
    Ok(())
}

/// `Σ_i scale·coeffs_i e_i`.
pub fn noise_field(basis: &ModeBasis, coeffs: &[f64]) -> Result<FourierField> {
    basis.combine(coeffs)
}

/// `−Π[(u·∇)u] − Π[(v·∇)u]` with the nonlinear part switchable.
fn transport_terms(u: &FourierField, v: &FourierField, cfg: &SolverConfig) -> Result<(FourierField, FourierField)> {
    let adv = if cfg.nonlinear { u + v } else { v.clone() };
    check_cfl(&adv, cfg.dt, cfg)?;
    Ok((transport_apply(&adv, u)?, adv))
}

/// One integrating-factor Heun step of
/// `∂_t u = νΔu − Π(u·∇u) − Π(v(t)·∇u)` from `t` to `t + dt`.
pub fn step_epsilon_system(
    u: &FourierField,
    t: f64,
    cfg: &SolverConfig,
    forcing: &NoiseForcing,
    basis: &ModeBasis,
) -> Result<FourierField> {
    let dt = cfg.dt;
    let mut c = vec![0.0; forcing.components()];
    forcing.eval(t, true, &mut c);
    let v0 = noise_field(basis, &c)?;
    forcing.eval(t + dt, false, &mut c);
    let v1 = noise_field(basis, &c)?;

    let (n0, _) = transport_terms(u, &v0, cfg)?;
    let mut pred = u.clone();
    pred.axpy(dt, &n0);
    heat_in_place(&mut pred, cfg.nu, dt);
    let (n1, _) = transport_terms(&pred, &v1, cfg)?;

    let mut out = u.clone();
    out.axpy(0.5 * dt, &n0);
    heat_in_place(&mut out, cfg.nu, dt);
    out.axpy(0.5 * dt, &n1);
    Ok(out)
}

fn drift(u: &FourierField, cfg: &SolverConfig) -> Result<FourierField> {
    let mut f = laplacian(u);
    f.scale(cfg.nu);
    if cfg.nonlinear {
        f.axpy(1.0, &nonlinearity_b(u, u)?);
    }
    Ok(f)
}

/// One Davie step `u₁ = u₀ + A¹u₀ + A²u₀ + dt/2 (F(u₀) + F(u₁))` with
/// `F(u) = νΔu − Π(u·∇u)`; the viscous part is solved exactly and the
/// nonlinear part by fixed-point iteration.
pub fn step_limit_davie(
    u: &FourierField,
    z_inc: &[f64],
    area: &[f64],
    basis: &ModeBasis,
    cfg: &SolverConfig,
) -> Result<FourierField> {
    let dt = cfg.dt;
    let h = basis.combine(z_inc)?;
    let drive = sup_bound(&h) * cfg.grid.band_limit() as f64;
    if drive > cfg.driver_cfl_limit {
        return Err(domain(format!(
            "CFL violation: |Z_(s,t)|·k_max = {drive:.3e} exceeds the bound {}",
            cfg.driver_cfl_limit
        )));
    }
    if cfg.nonlinear {
        check_cfl(u, dt, cfg)?;
    }
    let tu = mode_operators(basis, u)?;
    let mut base = u.clone();
    base.axpy(1.0, &a1_from_modes(z_inc, &tu, basis.grid()));
    base.axpy(1.0, &a2_from_modes(basis, area, &tu)?);
    base.axpy(0.5 * dt, &drift(u, cfg)?);

    let solve_viscous = |f: &mut FourierField| {
        let grid = f.grid().clone();
        for c in 0..grid.dim() {
            for (flat, a) in f.component_mut(c).iter_mut().enumerate() {
                *a /= 1.0 + 0.5 * dt * cfg.nu * grid.k2(flat);
            }
        }
    };
    let mut next = base.clone();
    solve_viscous(&mut next);
    if !cfg.nonlinear {
        return Ok(next);
    }
    let scale = base.norm_l2().max(f64::MIN_POSITIVE);
    for it in 0..FIXED_POINT_MAX {
        let mut cand = base.clone();
        cand.axpy(0.5 * dt, &nonlinearity_b(&next, &next)?);
        solve_viscous(&mut cand);
        let change = (&cand - &next).norm_l2() / scale;
        next = cand;
        if change <= FIXED_POINT_TOL {
            debug!("davie fixed point converged after {} iterations", it + 1);
            return Ok(next);
        }
    }
    Err(Error::Convergence(format!(
        "implicit trapezoid did not converge in {FIXED_POINT_MAX} iterations"
    )))
}

fn dissipation_rate(u: &FourierField, nu: f64) -> f64 {
    2.0 * nu * sobolev_norm(u, SobolevLevel(1.0)).powi(2)
}

struct Recorder {
    stride: usize,
    nu: f64,
    times: Vec<f64>,
    states: Vec<FourierField>,
    energy: Vec<f64>,
    dissipation: Vec<f64>,
    acc: f64,
    last_rate: f64,
}

impl Recorder {
    fn new(u0: &FourierField, cfg: &SolverConfig) -> Self {
        let e = u0.norm_l2().powi(2);
        Self {
            stride: cfg.record_stride,
            nu: cfg.nu,
            times: vec![0.0],
            states: vec![u0.clone()],
            energy: vec![e],
            dissipation: vec![0.0],
            acc: 0.0,
            last_rate: dissipation_rate(u0, cfg.nu),
        }
    }

    fn push(&mut self, step: usize, t: f64, dt: f64, u: &FourierField) {
        let rate = dissipation_rate(u, self.nu);
        self.acc += 0.5 * dt * (rate + self.last_rate);
        self.last_rate = rate;
        if step % self.stride == 0 {
            self.times.push(t);
            self.states.push(u.clone());
            self.energy.push(u.norm_l2().powi(2));
            self.dissipation.push(self.acc);
        }
    }

    fn finish(self) -> Result<Trajectory> {
        Ok(Trajectory { grid: TimeGrid::new(self.times)?, states: self.states, energy: self.energy, dissipation: self.dissipation })
    }
}

fn check_initial(u0: &FourierField, cfg: &SolverConfig) -> Result<()> {
    if u0.grid() != &cfg.grid {
        return Err(structural("initial field lives on a different spatial grid"));
    }
    if !u0.is_mean_zero() || u0.divergence_defect() > 1e-10 * u0.max_abs().max(1.0) {
        return Err(domain("initial field must be mean-zero and divergence-free"));
    }
    Ok(())
}

/// Integrates the ε-system over `[0, T]`.
pub fn run_epsilon_system(
    cfg: &SolverConfig,
    u0: &FourierField,
    forcing: &NoiseForcing,
    basis: &ModeBasis,
) -> Result<Trajectory> {
    cfg.validate()?;
    if cfg.scheme != Scheme::EpsilonSystemRk2 {
        return Err(domain("configuration selects the Davie scheme"));
    }
    check_initial(u0, cfg)?;
    if forcing.components() != basis.len() {
        return Err(structural(format!(
            "forcing has {} components, mode map has {}",
            forcing.components(),
            basis.len()
        )));
    }
    if basis.grid() != &cfg.grid {
        return Err(structural("mode map lives on a different spatial grid"));
    }
    if !forcing.covers(0.0, cfg.horizon) {
        return Err(structural("forcing does not cover the horizon"));
    }
    let mut rec = Recorder::new(u0, cfg);
    let mut u = u0.clone();
    for step in 1..=cfg.steps() {
        let t0 = (step - 1) as f64 * cfg.dt;
        u = step_epsilon_system(&u, t0, cfg, forcing, basis)?;
        rec.push(step, step as f64 * cfg.dt, cfg.dt, &u);
    }
    rec.finish()
}

/// Integrates the limit equation with the Davie scheme on the steps of
/// `cfg`, which must be a sub-grid of the driver grid.
pub fn run_limit_davie(cfg: &SolverConfig, u0: &FourierField, driver: &DriverPair) -> Result<Trajectory> {
    cfg.validate()?;
    if cfg.scheme != Scheme::LimitDavie {
        return Err(domain("configuration selects the ε-system scheme"));
    }
    check_initial(u0, cfg)?;
    if driver.basis().grid() != &cfg.grid {
        return Err(structural("driver mode map lives on a different spatial grid"));
    }
    let steps = cfg.steps();
    let step_grid = TimeGrid::uniform(0.0, cfg.horizon, steps);
    let idx = driver.lift().base().grid_indices(&step_grid)?;
    let lift = driver.lift();
    let mut rec = Recorder::new(u0, cfg);
    let mut u = u0.clone();
    for step in 1..=steps {
        let (a, b) = (idx[step - 1], idx[step]);
        u = step_limit_davie(&u, &lift.increment(a, b), &lift.area(a, b), driver.basis(), cfg)?;
        rec.push(step, step as f64 * cfg.dt, cfg.dt, &u);
    }
    rec.finish()
}

/// Fixed low-mode divergence-free field with `‖u₀‖ = 1`.
pub fn default_initial_field(grid: &TorusGrid) -> Result<FourierField> {
    let basis = ModeBasis::lowest(grid, 6)?;
    let mut u = basis.combine(&[1.0, -0.6, 0.8, 0.3, -0.5, 0.4])?;
    let n = u.norm_l2();
    u.scale(1.0 / n);
    Ok(u)
}
