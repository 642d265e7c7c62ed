//! Acceptance suite. Prints one line per criterion and exits nonzero if a
//! criterion fails that is not listed in `OPEN`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use roughflow::experiment::{run_theorem_a, run_theorem_b, ExperimentConfig};
use roughflow::noise::{
    fast_path_covariance, CoupledNoise, CouplingConfig, NoiseSpectrum, StationaryFouSampler,
};
use roughflow::rough::{
    coutin_qian_check, lift_piecewise_linear, p_variation, partition_variation, DiscretePath, NormTag, TwoParamProcess,
};
use roughflow::solver::{
    default_initial_field, energy_audit, richardson_ratio, run_epsilon_system, run_limit_davie, NoiseForcing, Scheme,
    SolverConfig, Trajectory,
};
use roughflow::spectral::{nonlinearity_b, normalized_test_fields, FourierField, ModeBasis, TorusGrid};
use roughflow::urd::{
    certify_solution, driver_norm_probe, remainder_compute, residual_compute, CertifyOptions, Drift, DriverPair,
};
use roughflow::{Result, TimeGrid};

mod common;
use common::{brute_force_power, convolution_oracle};

/// Criteria with a recorded open gap: reported, not enforced.
const OPEN: &[usize] = &[6];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::MIN, f64::max);
    let lo = v.iter().copied().fold(f64::MAX, f64::min);
    hi / lo
}

/// Least-squares slope of `y` against `x`.
fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn fou_variance() -> Result<Outcome> {
    let reps = 10_000u64;
    let mut worst: f64 = 0.0;
    for (k, h) in [0.35, 0.4, 0.45].into_iter().enumerate() {
        let spec = NoiseSpectrum::default_for(h)?;
        let dt = 0.1 / spec.c_max();
        // four points per replica, each 5/c_min apart
        let gap = (5.0 / spec.c_min() / dt).ceil() as usize;
        let grid = TimeGrid::uniform(0.0, (3 * gap) as f64 * dt, 3 * gap);
        let sampler = StationaryFouSampler::new(&spec, &grid, 4, 10.0)?;
        let m = spec.len();
        let sums = (0..reps)
            .into_par_iter()
            .map(|r| -> Result<Vec<f64>> {
                let ens = sampler.sample(r + k as u64 * reps)?;
                Ok((0..m).map(|i| (0..4).map(|j| ens.w[i][j * gap].powi(2)).sum()).collect())
            })
            .try_reduce(|| vec![0.0; m], |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()))?;
        let want = spec.stationary_variances()?;
        for (s, w) in sums.iter().zip(&want) {
            worst = worst.max(rel(s / (4 * reps) as f64, *w));
        }
    }
    Ok(Outcome::new(worst <= 0.03, format!("max relative variance error {:.2}%", 100.0 * worst)))
}

fn coupling_identity() -> Result<Outcome> {
    let spec = NoiseSpectrum::default_for(0.4)?;
    let cfg = CouplingConfig { eps: (2..=6).map(|k| 2f64.powi(-k)).collect(), unit_step: 1.0 / 64.0, ..Default::default() };
    let mut ratios = Vec::new();
    for seed in 1..=3 {
        let fine = CoupledNoise::sample(&spec, &cfg, seed)?;
        let coarse = fine.subsampled(2)?;
        for &e in &cfg.eps {
            ratios.push(coarse.realize(e)?.coupling_defect()? / fine.realize(e)?.coupling_defect()?);
        }
    }
    let worst = ratios.iter().map(|r| (r - 4.0).abs()).fold(0.0, f64::max);
    let (lo, hi) = (ratios.iter().copied().fold(f64::MAX, f64::min), ratios.iter().copied().fold(0.0, f64::max));
    Ok(Outcome::new(worst <= 0.5, format!("halving ratios in [{lo:.3}, {hi:.3}]")))
}

fn lift_sweep_config() -> ExperimentConfig {
    ExperimentConfig { replicas: 64, batch: 8, eps: (2..=8).map(|k| 2f64.powi(-k)).collect(), ..Default::default() }
}

fn lift_sweep() -> Result<(Outcome, Outcome)> {
    let cfg = lift_sweep_config();
    let rec = run_theorem_a(&cfg)?;
    let s = &rec.summary;
    let slope = s["first_level"]["slope"].as_f64().unwrap();
    let share = s["second_level"]["monotone_share"].as_f64().unwrap();
    let chen = s["chen_defect_max"].as_f64().unwrap();
    let first = Outcome::new(
        (slope - cfg.hurst).abs() <= 0.15,
        format!("first-level slope {slope:.3} against H = {}", cfg.hurst),
    );
    let second = Outcome::new(
        share >= 0.9 && chen <= 1e-12,
        format!("monotone share {share:.3}, max Chen defect {chen:.1e}"),
    );
    Ok((first, second))
}

fn coutin_qian() -> Result<Outcome> {
    let spec = NoiseSpectrum::default_for(0.4)?;
    let eps: Vec<f64> = (2..=6).map(|k| 2f64.powi(-k)).collect();
    let obs = TimeGrid::uniform(0.0, 1.0, 16);
    let spreads: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let c: Vec<f64> = eps
                .iter()
                .map(|&e| Ok(coutin_qian_check(&fast_path_covariance(&spec, i, e, &obs)?, spec.hurst, 10.0)?.c_h))
                .collect::<Result<_>>()?;
            Ok(spread(&c))
        })
        .collect::<Result<_>>()?;
    let worst = spreads.iter().copied().fold(0.0, f64::max);
    Ok(Outcome::new(worst <= 2.0, format!("largest max/min of c_H over ε, all components: {worst:.3}")))
}

fn energy() -> Result<Outcome> {
    let cfg = ExperimentConfig::default();
    let spec = cfg.spectrum()?;
    let noise = CoupledNoise::sample(&spec, &cfg.coupling(), cfg.seed)?;
    let mut sc = cfg.solver(Scheme::EpsilonSystemRk2)?;
    sc.record_stride = 16;
    let basis = spec.mode_map(&sc.grid)?;
    let u0 = default_initial_field(&sc.grid)?;
    let run = |sc: &SolverConfig, e: f64| -> Result<Trajectory> {
        run_epsilon_system(sc, &u0, &NoiseForcing::from_epsilon_noise(&noise.realize(e)?)?, &basis)
    };
    let runs: Vec<Trajectory> = cfg.eps.par_iter().map(|&e| run(&sc, e)).collect::<Result<_>>()?;
    let defects: Vec<f64> = runs.iter().map(|t| Ok(energy_audit(t)?.max_defect)).collect::<Result<_>>()?;
    let mut half = sc.clone();
    half.dt /= 2.0;
    half.record_stride *= 2;
    let ratio = richardson_ratio(&runs[0], &run(&half, cfg.eps[0])?)?;
    let worst = defects.iter().copied().fold(0.0, f64::max);
    let uniform = spread(&defects);
    let ok = [worst <= 1e-4, (ratio - 4.0).abs() <= 0.5, uniform <= 2.0];
    Ok(Outcome::new(
        ok.iter().all(|&b| b),
        format!(
            "max defect {worst:.2e} [{}], Richardson ratio {ratio:.2} [{}], max/min over ε {uniform:.1} [{}]",
            verdict(ok[0]),
            verdict(ok[1]),
            verdict(ok[2])
        ),
    ))
}

fn nonlinearity_algebra() -> Result<Outcome> {
    let grid = TorusGrid::default_2d();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut skew: f64 = 0.0;
    for _ in 0..100 {
        let [u, v, w] = [(); 3].map(|_| FourierField::random_band_limited(&grid, &mut rng, 1.0));
        let (buv, buw) = (nonlinearity_b(&u, &v)?, nonlinearity_b(&u, &w)?);
        let scale = buv.norm_l2() * w.norm_l2() + buw.norm_l2() * v.norm_l2();
        skew = skew.max((buv.inner(&w) + buw.inner(&v)).abs() / scale);
        skew = skew.max(buv.inner(&v).abs() / (buv.norm_l2() * v.norm_l2()));
    }
    let small = TorusGrid::new(2, 8, 2.0 / 3.0)?;
    let mut oracle: f64 = 0.0;
    for _ in 0..4 {
        let u = FourierField::random_band_limited(&small, &mut rng, 1.0);
        let v = FourierField::random_band_limited(&small, &mut rng, 1.0);
        let want = convolution_oracle(&u, &v);
        let mut d = nonlinearity_b(&u, &v)?;
        d.axpy(-1.0, &want);
        oracle = oracle.max(d.norm_l2() / want.norm_l2());
    }
    Ok(Outcome::new(
        skew <= 1e-10 && oracle <= 1e-12,
        format!("skewness defect {skew:.1e}, convolution oracle gap {oracle:.1e}"),
    ))
}

fn random_path(points: usize, dim: usize, rng: &mut ChaCha8Rng) -> Result<DiscretePath> {
    let mut data = vec![0.0; dim];
    for k in 1..points {
        for i in 0..dim {
            let prev = data[(k - 1) * dim + i];
            data.push(prev + rng.random_range(-0.3..0.3));
        }
    }
    DiscretePath::new(TimeGrid::uniform(0.0, 1.0, points - 1), dim, data)
}

fn driver_algebra() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid = TorusGrid::new(2, 16, 2.0 / 3.0)?;
    let basis = ModeBasis::lowest(&grid, 6)?;
    let mut chen: f64 = 0.0;
    for _ in 0..4 {
        let d = DriverPair::new(lift_piecewise_linear(&random_path(9, 6, &mut rng)?), basis.clone())?;
        let (d1, d2) = d.chen_defects(&FourierField::random_band_limited(&grid, &mut rng, 1.5))?;
        chen = chen.max(d1).max(d2);
    }
    let lift = lift_piecewise_linear(&random_path(9, 8, &mut rng)?);
    let mut ratios = Vec::new();
    for n in [16, 32] {
        let g = TorusGrid::new(2, n, 2.0 / 3.0)?;
        let r = driver_norm_probe(&DriverPair::new(lift.clone(), ModeBasis::lowest(&g, 8)?)?, 1, 32, 1.0, 0.34, 2)?;
        ratios.push((r.a1_ratio, r.a2_ratio));
    }
    let stab = spread(&[ratios[0].0, ratios[1].0]).max(spread(&[ratios[0].1, ratios[1].1]));
    Ok(Outcome::new(
        chen <= 1e-10 && stab <= 2.0,
        format!("Chen defects {chen:.1e}, operator ratio change under N-doubling {stab:.3}"),
    ))
}

/// A smooth sixteen-component driver sampled on `[0, 1/4]` with step `1/4096`.
fn smooth_driver(spec: &NoiseSpectrum, grid: &TorusGrid) -> Result<DriverPair> {
    let fine = TimeGrid::uniform(0.0, 0.25, 1024);
    let rows: Vec<Vec<f64>> = (0..spec.len())
        .map(|i| {
            let freq = (1 + i % 3) as f64 * std::f64::consts::TAU;
            fine.times().iter().map(|t| 0.2 * (freq * t + i as f64).sin()).collect()
        })
        .collect();
    let path = DiscretePath::from_components(fine, &rows)?;
    DriverPair::new(lift_piecewise_linear(&path), spec.mode_map(grid)?)
}

fn smooth_config(nu: f64, nonlinear: bool) -> SolverConfig {
    let mut cfg = SolverConfig::default_for(Scheme::LimitDavie);
    cfg.nu = nu;
    cfg.nonlinear = nonlinear;
    cfg.horizon = 0.25;
    cfg.dt = 1.0 / 4096.0;
    cfg
}

fn residual_scaling() -> Result<Outcome> {
    let spec = NoiseSpectrum::default_for(0.4)?;
    let cfg = smooth_config(0.0, false);
    let driver = smooth_driver(&spec, &cfg.grid)?;
    let traj = run_limit_davie(&cfg, &default_initial_field(&cfg.grid)?, &driver)?;
    let stride = 8;
    let coarse = traj.grid.stride(stride)?;
    let picked: Vec<FourierField> = traj.states.iter().step_by(stride).cloned().collect();
    let rem = remainder_compute(&coarse, &picked, &driver)?.process;
    let res = residual_compute(&traj.grid, &traj.states, &driver, Drift { nu: 0.0, nonlinear: false }, stride)?;
    let h = coarse.at(1) - coarse.at(0);
    let lags = [1usize, 2, 4, 8, 16];
    let x: Vec<f64> = lags.iter().map(|&l| (l as f64 * h).ln()).collect();
    let log_mean = |a: &TwoParamProcess, lag: usize| {
        let m = a.len() - lag;
        (0..m).map(|s| a.norm(s, s + lag).ln()).sum::<f64>() / m as f64
    };
    let r: Vec<f64> = lags.iter().map(|&l| log_mean(&rem, l)).collect();
    let q: Vec<f64> = lags.iter().map(|&l| log_mean(&res, l)).collect();
    let (sr, sq) = (ols_slope(&x, &r), ols_slope(&x, &q));
    Ok(Outcome::new(
        (sr - 2.0).abs() <= 0.2 && (sq - 3.0).abs() <= 0.3,
        format!("remainder exponent {sr:.3}, residual exponent {sq:.3}"),
    ))
}

fn equivalence() -> Result<Outcome> {
    let spec = NoiseSpectrum::default_for(0.4)?;
    let cfg = smooth_config(0.1, true);
    let phis = normalized_test_fields(&cfg.grid, 8, 3.0)?;
    let opts = CertifyOptions::default();
    let u0 = default_initial_field(&cfg.grid)?;
    let driver = smooth_driver(&spec, &cfg.grid)?;
    let traj = run_limit_davie(&cfg, &u0, &driver)?;
    let smooth = certify_solution(&traj.grid, &traj.states, &driver, &phis, &opts)?;
    let weak = smooth.defects.weak_form;
    let mut certs = vec![smooth];
    let mut rough = cfg.clone();
    rough.dt = 1.0 / 1024.0;
    let coupling = CouplingConfig { horizon: 0.25, ..Default::default() };
    for seed in 1..=4 {
        let noise = CoupledNoise::sample(&spec, &coupling, seed)?;
        let d = DriverPair::new(lift_piecewise_linear(&noise.limit()?), spec.mode_map(&rough.grid)?)?;
        let t = run_limit_davie(&rough, &u0, &d)?;
        certs.push(certify_solution(&t.grid, &t.states, &d, &phis, &opts)?);
    }
    let passing: Vec<f64> = certs.iter().filter(|c| c.passed()).map(|c| c.norms.covering_ratio).collect();
    let worst = passing.iter().copied().fold(0.0, f64::max);
    Ok(Outcome::new(
        !passing.is_empty() && worst <= 2.0 && weak <= 1e-8,
        format!(
            "{} of {} trajectories certified, largest covering ratio {worst:.3}, smooth-driver weak defect {weak:.1e}",
            passing.len(),
            certs.len()
        ),
    ))
}

fn solution_sweep() -> Result<Outcome> {
    let rec = run_theorem_b(&ExperimentConfig::default())?;
    let s = &rec.summary;
    Ok(Outcome::new(
        rec.pass,
        format!("monotone shares {}, certificates passed {}", s["monotone_share"], s["certificates_passed"]),
    ))
}

fn variation_engine() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let ps = [0.5, 1.0, 1.5, 2.0, 3.0, 4.0];
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let n = rng.random_range(3..=12);
        let p = ps[k % ps.len()];
        let vals: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = TwoParamProcess::from_fn(&TimeGrid::uniform(0.0, 1.0, n - 1), NormTag::Scalar, |i, j| vals[i * n + j]);
        let want = brute_force_power(&a, p).powf(1.0 / p);
        let got = if p >= 1.0 { p_variation(&a, p)? } else { partition_variation(&a, p)? };
        worst = worst.max((got - want).abs() / want.max(1.0));
    }
    Ok(Outcome::new(worst <= 1e-12, format!("largest gap to exhaustive enumeration {worst:.1e}")))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn report(id: usize, title: &str, start: Instant, out: Result<Outcome>, failed: &mut Vec<usize>) {
    let secs = start.elapsed().as_secs_f64();
    let (pass, detail) = match out {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let note = if !pass && OPEN.contains(&id) { " (open)" } else { "" };
    println!("criterion {id:>2} {}{note}  {title}: {detail} ({secs:.1} s)", verdict(pass));
    if !pass && !OPEN.contains(&id) {
        failed.push(id);
    }
}

fn main() {
    let mut failed = Vec::new();
    let t = Instant::now();
    report(1, "stationary fOU variance", t, fou_variance(), &mut failed);
    let t = Instant::now();
    report(2, "coupling identity", t, coupling_identity(), &mut failed);
    let t = Instant::now();
    match lift_sweep() {
        Ok((first, second)) => {
            report(3, "first-level gap rate", t, Ok(first), &mut failed);
            report(4, "second-level gap monotonicity", t, Ok(second), &mut failed);
        }
        Err(e) => {
            let msg = e.to_string();
            report(3, "first-level gap rate", t, Err(roughflow::Error::Domain(msg.clone())), &mut failed);
            report(4, "second-level gap monotonicity", t, Err(roughflow::Error::Domain(msg)), &mut failed);
        }
    }
    let t = Instant::now();
    report(5, "Coutin-Qian constant", t, coutin_qian(), &mut failed);
    let t = Instant::now();
    report(6, "energy identity", t, energy(), &mut failed);
    let t = Instant::now();
    report(7, "nonlinearity algebra", t, nonlinearity_algebra(), &mut failed);
    let t = Instant::now();
    report(8, "driver algebra", t, driver_algebra(), &mut failed);
    let t = Instant::now();
    report(9, "residual scaling", t, residual_scaling(), &mut failed);
    let t = Instant::now();
    report(10, "certificate equivalence", t, equivalence(), &mut failed);
    let t = Instant::now();
    report(11, "homogenization pipeline", t, solution_sweep(), &mut failed);
    let t = Instant::now();
    report(12, "p-variation engine", t, variation_engine(), &mut failed);
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
