//! Sews a germ known in closed form and computes a rough integral
//! `∫ f(B) dB` against a piecewise-linear lift.

use roughflow::noise::sample_fbm;
use roughflow::rough::{lift_piecewise_linear, rough_integral, sew_continuous, DiscretePath, RefinementOptions};
use roughflow::TimeGrid;

fn main() -> roughflow::Result<()> {
    // Germ of ∫ 2r dr with a cubic defect: the sewn map is t².
    let grid = TimeGrid::uniform(0.0, 1.0, 4);
    let germ = |s: f64, t: f64| t * t - s * s + (t - s).powi(3);
    let sewn = sew_continuous(germ, &grid, RefinementOptions::default())?;
    println!("sewn t^2 on the grid: {sewn:.12?}");

    let n = 512;
    let grid = TimeGrid::uniform(0.0, 1.0, n);
    let fbm = sample_fbm(0.4, &grid, 1, 9)?;
    let b = DiscretePath::from_components(grid.clone(), &fbm.values)?;
    let z = lift_piecewise_linear(&b);
    // y = cos(B), y' = -sin(B): the integral equals sin(B_t) − sin(B_0).
    let y = DiscretePath::from_components(grid.clone(), &[fbm.values[0].iter().map(|x| x.cos()).collect()])?;
    let yp = DiscretePath::from_components(grid.clone(), &[fbm.values[0].iter().map(|x| -x.sin()).collect()])?;
    let out = rough_integral(&y, &yp, &z, 0.36, 129)?;
    let exact = fbm.values[0][n].sin() - fbm.values[0][0].sin();
    println!("rough integral {:.6}, exact {exact:.6}", out.path[n]);
    println!(
        "sewing: beta {:.3e}, exponent {:.3}, bound ratio {:.3}, fitted exponent {:?}",
        out.sewing.beta, out.sewing.exponent, out.sewing.bound_ratio, out.sewing.fitted_exponent
    );
    Ok(())
}
