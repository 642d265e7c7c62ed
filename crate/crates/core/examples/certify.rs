//! Certifies a Davie trajectory: rough integral weak form, remainder Chen
//! relation and variation norms of the solution, remainder and residual.

use roughflow::noise::{CoupledNoise, CouplingConfig, NoiseSpectrum};
use roughflow::rough::lift_piecewise_linear;
use roughflow::solver::{default_initial_field, run_limit_davie, Scheme, SolverConfig};
use roughflow::spectral::normalized_test_fields;
use roughflow::urd::{certify_solution, driver_norm_probe, CertifyOptions, DriverPair};

fn main() -> roughflow::Result<()> {
    let spec = NoiseSpectrum::default_for(0.4)?;
    let cfg = SolverConfig::default_for(Scheme::LimitDavie);
    let noise = CoupledNoise::sample(&spec, &CouplingConfig::default(), 7)?;
    let driver = DriverPair::new(lift_piecewise_linear(&noise.limit()?), spec.mode_map(&cfg.grid)?)?;
    for level in 0..=2 {
        let r = driver_norm_probe(&driver, level, 64, 1.0, 0.34, 1)?;
        println!("driver probe H^-{level}: A1 ratio {:.3}, A2 ratio {:.3}, K {:.3}", r.a1_ratio, r.a2_ratio, r.k);
    }
    let traj = run_limit_davie(&cfg, &default_initial_field(&cfg.grid)?, &driver)?;
    let phis = normalized_test_fields(&cfg.grid, 8, 3.0)?;
    let cert = certify_solution(&traj.grid, &traj.states, &driver, &phis, &CertifyOptions::default())?;
    println!("{}", cert.to_json()?);
    Ok(())
}
