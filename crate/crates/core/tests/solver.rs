use roughflow::noise::{sample_fbm, NoiseSpectrum};
use roughflow::rough::{lift_piecewise_linear, DiscretePath, Level2Area};
use roughflow::solver::{
    default_initial_field, energy_audit, noise_field, run_epsilon_system, run_limit_davie, step_epsilon_system,
    step_limit_davie, NoiseForcing, Scheme, SolverConfig,
};
use roughflow::spectral::{heat_propagate, laplacian, nonlinearity_b, transport_apply, FourierField, ModeBasis, TorusGrid};
use roughflow::urd::DriverPair;
use roughflow::{Error, TimeGrid};
use rustfft::num_complex::Complex64;

fn gap(a: &FourierField, b: &FourierField) -> f64 {
    let mut d = a.clone();
    d.axpy(-1.0, b);
    d.norm_l2()
}

fn translation(grid: &TorusGrid, dir: [f64; 2]) -> ModeBasis {
    ModeBasis::from_fields(grid, vec![FourierField::uniform(grid, &dir).unwrap()]).unwrap()
}

#[test]
fn linear_mode_decays_exactly() {
    let mut cfg = SolverConfig::default_for(Scheme::EpsilonSystemRk2);
    cfg.nonlinear = false;
    cfg.horizon = 0.25;
    let basis = ModeBasis::lowest(&cfg.grid, 4).unwrap();
    let u0 = default_initial_field(&cfg.grid).unwrap();
    let traj = run_epsilon_system(&cfg, &u0, &NoiseForcing::zero(cfg.horizon, 4), &basis).unwrap();
    assert!(gap(traj.last(), &heat_propagate(&u0, cfg.nu, 0.25)) < 1e-12);
    let mut one = cfg.clone();
    one.horizon = one.dt;
    let audit = energy_audit(&run_epsilon_system(&one, &u0, &NoiseForcing::zero(one.horizon, 4), &basis).unwrap()).unwrap();
    assert!(audit.max_defect < 1e-12);
}

#[test]
fn zero_driver_davie_step_matches_the_deterministic_step() {
    let cfg_e = SolverConfig::default_for(Scheme::EpsilonSystemRk2);
    let cfg_d = SolverConfig::default_for(Scheme::LimitDavie);
    let basis = ModeBasis::lowest(&cfg_e.grid, 4).unwrap();
    let mut u = default_initial_field(&cfg_e.grid).unwrap();
    let forcing = NoiseForcing::zero(1.0, 4);
    for _ in 0..8 {
        let a = step_epsilon_system(&u, 0.0, &cfg_e, &forcing, &basis).unwrap();
        let b = step_limit_davie(&u, &[0.0; 4], &[0.0; 16], &basis, &cfg_d).unwrap();
        assert!(gap(&a, &b) < 1e-10, "{:e}", gap(&a, &b));
        u = b;
    }
}

#[test]
fn translation_driver_matches_characteristics() {
    let mut cfg = SolverConfig::default_for(Scheme::LimitDavie);
    cfg.nu = 0.0;
    cfg.nonlinear = false;
    let dir = [0.6, 0.8];
    let basis = translation(&cfg.grid, dir);
    let fine = TimeGrid::uniform(0.0, 1.0, 2048);
    let fbm = sample_fbm(0.4, &fine, 1, 21).unwrap();
    let path = DiscretePath::from_components(fine, &[fbm.values[0].iter().map(|x| 0.3 * x).collect()]).unwrap();
    let zt = path.point(2048)[0] - path.point(0)[0];
    let driver = DriverPair::new(lift_piecewise_linear(&path), basis).unwrap();
    let u0 = default_initial_field(&cfg.grid).unwrap();
    let traj = run_limit_davie(&cfg, &u0, &driver).unwrap();
    // T u = −(c·∇)u, so u_t(x) = u_0(x − Z_t c)
    let grid = &cfg.grid;
    let mut want = u0.clone();
    let p = grid.points();
    for c in 0..2 {
        for flat in 0..p {
            let k = grid.wavevector(flat);
            let theta = (k[0] as f64 * dir[0] + k[1] as f64 * dir[1]) * zt;
            want.component_mut(c)[flat] *= Complex64::from_polar(1.0, -theta);
        }
    }
    assert!(gap(traj.last(), &want) < 1e-4, "{:e}", gap(traj.last(), &want));
}

/// Classical RK4 for a frozen transport field.
fn rk4_reference(u0: &FourierField, v: &FourierField, nu: f64, dt: f64, steps: usize) -> FourierField {
    let rhs = |u: &FourierField| {
        let mut f = laplacian(u);
        f.scale(nu);
        f.axpy(1.0, &nonlinearity_b(u, u).unwrap());
        f.axpy(1.0, &transport_apply(v, u).unwrap());
        f
    };
    let mut u = u0.clone();
    for _ in 0..steps {
        let k1 = rhs(&u);
        let k2 = rhs(&(&u + &(&k1 * (dt / 2.0))));
        let k3 = rhs(&(&u + &(&k2 * (dt / 2.0))));
        let k4 = rhs(&(&u + &(&k3 * dt)));
        let mut incr = k1;
        incr.axpy(2.0, &k2);
        incr.axpy(2.0, &k3);
        incr.axpy(1.0, &k4);
        u.axpy(dt / 6.0, &incr);
    }
    u
}

#[test]
fn frozen_noise_matches_a_fine_rk4_reference() {
    let mut cfg = SolverConfig::default_for(Scheme::EpsilonSystemRk2);
    cfg.horizon = 0.125;
    let spec = NoiseSpectrum::default_for(0.4).unwrap();
    let basis = spec.mode_map(&cfg.grid).unwrap();
    let coeffs: Vec<f64> = (0..16).map(|i| 0.05 * ((i as f64) * 0.7).cos()).collect();
    let rows: Vec<Vec<f64>> = coeffs.iter().map(|&c| vec![c, c]).collect();
    let forcing = NoiseForcing::linear(TimeGrid::uniform(0.0, cfg.horizon, 1), rows, 1.0).unwrap();
    let u0 = default_initial_field(&cfg.grid).unwrap();
    let traj = run_epsilon_system(&cfg, &u0, &forcing, &basis).unwrap();
    let v = noise_field(&basis, &coeffs).unwrap();
    let steps = (cfg.horizon / cfg.dt) as usize * 16;
    let reference = rk4_reference(&u0, &v, cfg.nu, cfg.dt / 16.0, steps);
    assert!(gap(traj.last(), &reference) < 1e-6, "{:e}", gap(traj.last(), &reference));
}

#[test]
fn davie_self_convergence_on_a_fixed_driver() {
    let spec = NoiseSpectrum::default_for(0.4).unwrap();
    let mut cfg = SolverConfig::default_for(Scheme::LimitDavie);
    cfg.horizon = 0.25;
    // a rough sample on 64 cells, refined linearly: the lift is unchanged
    // and every Davie step below sees a smooth driver inside one cell
    let coarse = TimeGrid::uniform(0.0, 0.25, 64);
    let fbm = sample_fbm(0.4, &coarse, 16, 5).unwrap();
    let refined: Vec<Vec<f64>> = fbm
        .values
        .iter()
        .map(|v| (0..=2048).map(|k| {
            let (c, r) = (k / 32, (k % 32) as f64 / 32.0);
            if c == 64 { v[64] } else { v[c] + r * (v[c + 1] - v[c]) }
        }).collect())
        .collect();
    let fine = TimeGrid::uniform(0.0, 0.25, 2048);
    let b = DiscretePath::from_components(fine, &refined).unwrap().scaled(&spec.limit_scale()).unwrap();
    let driver = DriverPair::new(lift_piecewise_linear(&b), spec.mode_map(&cfg.grid).unwrap()).unwrap();
    let u0 = default_initial_field(&cfg.grid).unwrap();
    let mut finals = Vec::new();
    for dt in [0.25 / 256.0, 0.25 / 512.0, 0.25 / 1024.0, 0.25 / 2048.0] {
        cfg.dt = dt;
        cfg.record_stride = (0.25 / dt).round() as usize;
        finals.push(run_limit_davie(&cfg, &u0, &driver).unwrap().last().clone());
    }
    let d: Vec<f64> = finals.windows(2).map(|w| gap(&w[0], &w[1])).collect();
    for w in d.windows(2) {
        assert!(w[0] / w[1] >= 2.0, "{d:?}");
    }
}

#[test]
fn cfl_violation_names_the_bound() {
    let cfg = SolverConfig::default_for(Scheme::LimitDavie);
    let basis = translation(&cfg.grid, [1.0, 0.0]);
    let u0 = default_initial_field(&cfg.grid).unwrap();
    let err = step_limit_davie(&u0, &[1.0], &[0.5], &basis, &cfg).unwrap_err();
    match err {
        Error::Domain(msg) => assert!(msg.contains("CFL") && msg.contains('2'), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
    let lift = Level2Area::zero(TimeGrid::uniform(0.0, 1.0, 4), 1);
    let short = DriverPair::new(lift, basis).unwrap();
    assert!(run_limit_davie(&cfg, &u0, &short).is_err());
}
