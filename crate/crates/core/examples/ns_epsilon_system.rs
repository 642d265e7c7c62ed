//! Runs the Galerkin ε-system with fOU transport noise for several ε and
//! audits the energy identity.

use roughflow::noise::{CoupledNoise, CouplingConfig, NoiseSpectrum};
use roughflow::solver::{default_initial_field, energy_audit, run_epsilon_system, NoiseForcing, Scheme, SolverConfig};
use roughflow::spectral::{sobolev_norm, SobolevLevel};

fn main() -> roughflow::Result<()> {
    let spec = NoiseSpectrum::default_for(0.4)?;
    let mut cfg = SolverConfig::default_for(Scheme::EpsilonSystemRk2);
    cfg.dt = 1.0 / 4096.0;
    cfg.record_stride = 64;
    let basis = spec.mode_map(&cfg.grid)?;
    let u0 = default_initial_field(&cfg.grid)?;
    let coupling = CouplingConfig { eps: vec![0.25, 0.125, 0.0625], ..Default::default() };
    let noise = CoupledNoise::sample(&spec, &coupling, 4)?;
    for &e in &coupling.eps {
        let forcing = NoiseForcing::from_epsilon_noise(&noise.realize(e)?)?;
        let traj = run_epsilon_system(&cfg, &u0, &forcing, &basis)?;
        let audit = energy_audit(&traj)?;
        println!(
            "eps {e:<7} |u_T| {:.4}  |u_T|_H1 {:.4}  energy defect {:.2e}  max growth {:.6}",
            traj.last().norm_l2(),
            sobolev_norm(traj.last(), SobolevLevel(1.0)),
            audit.max_defect,
            audit.max_growth
        );
    }
    Ok(())
}
