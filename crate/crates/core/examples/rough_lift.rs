//! Builds the coupled lifts `X^ε` and the limit `B`, and prints how their
//! Hölder rough path distance shrinks as ε decreases.

use roughflow::noise::{CoupledNoise, CouplingConfig, NoiseSpectrum};
use roughflow::rough::{first_level_holder_gap, lift_piecewise_linear, rough_distance, second_level_holder_gap};
use roughflow::TimeGrid;

fn main() -> roughflow::Result<()> {
    let spec = NoiseSpectrum::default_for(0.4)?;
    let cfg = CouplingConfig::default();
    let noise = CoupledNoise::sample(&spec, &cfg, 5)?;
    let obs = TimeGrid::uniform(0.0, 1.0, 8);
    let b = lift_piecewise_linear(&noise.limit()?).restrict(&obs)?;
    println!("limit lift: Chen defect {:.1e}, geometricity defect {:.1e}", b.chen_defect(), b.geometricity_defect());
    println!("{:>10} {:>10} {:>10} {:>10}", "eps", "level 1", "level 2", "rho_a");
    for &e in &cfg.eps {
        let x = lift_piecewise_linear(&noise.realize(e)?.x).restrict(&obs)?;
        println!(
            "{e:>10.5} {:>10.4} {:>10.4} {:>10.4}",
            first_level_holder_gap(&x, &b, 0.34)?,
            second_level_holder_gap(&x, &b, 0.34)?,
            rough_distance(&x, &b, 0.34)?
        );
    }
    Ok(())
}
