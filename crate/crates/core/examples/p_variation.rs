//! p-variation and Hölder norms of a Brownian path, plus the
//! Coutin-Qian constants of the fBM covariance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use roughflow::rough::{coutin_qian_check, holder_norm, p_variation, ControlFn, CovarianceTable, TwoParamProcess};
use roughflow::TimeGrid;

fn main() -> roughflow::Result<()> {
    let n = 256;
    let grid = TimeGrid::uniform(0.0, 1.0, n);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut w = vec![0.0];
    for _ in 0..n {
        let z: f64 = StandardNormal.sample(&mut rng);
        w.push(w.last().unwrap() + z / (n as f64).sqrt());
    }
    let a = TwoParamProcess::from_scalar_path(&grid, &w)?;
    for p in [1.0, 2.0, 2.5, 3.0] {
        println!("{p}-variation: {:.4}", p_variation(&a, p)?);
    }
    println!("0.4-Hölder norm: {:.4}", holder_norm(&a, 0.4)?);
    let omega = ControlFn::from_variation(&a, 2.5)?;
    println!("control superadditivity defect: {:.2e}", omega.superadditivity_defect());

    let coarse = TimeGrid::uniform(0.0, 1.0, 32);
    let cq = coutin_qian_check(&CovarianceTable::fbm(&coarse, 0.4), 0.4, 2.0)?;
    println!("Coutin-Qian: c_variance {:.3}, c_correlation {:.3}, pass {}", cq.c_variance, cq.c_correlation, cq.pass);
    Ok(())
}
