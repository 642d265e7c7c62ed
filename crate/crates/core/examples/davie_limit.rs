//! Solves the limit rough equation with the Davie scheme and checks
//! self-convergence under step halving on a fixed driver.

use roughflow::noise::{CoupledNoise, CouplingConfig, NoiseSpectrum};
use roughflow::rough::lift_piecewise_linear;
use roughflow::solver::{default_initial_field, energy_audit, run_limit_davie, Scheme, SolverConfig};
use roughflow::urd::DriverPair;

fn main() -> roughflow::Result<()> {
    let spec = NoiseSpectrum::default_for(0.4)?;
    let mut cfg = SolverConfig::default_for(Scheme::LimitDavie);
    let noise = CoupledNoise::sample(&spec, &CouplingConfig::default(), 7)?;
    let driver = DriverPair::new(lift_piecewise_linear(&noise.limit()?), spec.mode_map(&cfg.grid)?)?;
    let u0 = default_initial_field(&cfg.grid)?;
    let mut finals = Vec::new();
    for dt in [1.0 / 512.0, 1.0 / 1024.0, 1.0 / 2048.0] {
        cfg.dt = dt;
        cfg.record_stride = (1.0 / dt) as usize;
        let traj = run_limit_davie(&cfg, &u0, &driver)?;
        println!("dt {dt:.2e}: |u_T| {:.5}, energy defect {:.2e}", traj.last().norm_l2(), energy_audit(&traj)?.max_defect);
        finals.push(traj.last().clone());
    }
    for w in finals.windows(2) {
        let mut d = w[1].clone();
        d.axpy(-1.0, &w[0]);
        println!("successive L2 distance {:.3e}", d.norm_l2());
    }
    Ok(())
}
