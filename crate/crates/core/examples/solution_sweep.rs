//! One seed of the solution sweep: ε-system against the Davie limit in
//! sup, variation and remainder distances, plus the limit certificate.

use roughflow::experiment::{theorem_b_seed, ExperimentConfig};

fn main() -> roughflow::Result<()> {
    let cfg = ExperimentConfig::default();
    let out = theorem_b_seed(&cfg, 7)?;
    for (eps, metric, value) in &out.rows {
        println!("{metric:<16} eps {eps:<10.4e} {value:.4e}");
    }
    println!("certificate: {:?} {:?}", out.certificate.verdict, out.certificate.failures);
    Ok(())
}
