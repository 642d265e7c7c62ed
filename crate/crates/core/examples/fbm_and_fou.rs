//! Samples fractional Brownian motion and a stationary fOU ensemble, then
//! compares empirical variances with the closed forms.

use roughflow::noise::{fgn_autocovariance, fou_covariance, sample_fbm, NoiseSpectrum, StationaryFouSampler};
use roughflow::TimeGrid;

fn main() -> roughflow::Result<()> {
    let hurst = 0.4;
    let grid = TimeGrid::uniform(0.0, 1.0, 1024);
    let fbm = sample_fbm(hurst, &grid, 200, 11)?;
    let var_end: f64 = fbm.values.iter().map(|v| v[1024] * v[1024]).sum::<f64>() / 200.0;
    println!("fBM: Var B_1 = {var_end:.3} (exact 1), fGn lag-1 autocovariance {:.4}", fgn_autocovariance(hurst, 1));

    let spec = NoiseSpectrum::default_for(hurst)?;
    let long = TimeGrid::uniform(0.0, 200.0, 4000);
    let ens = StationaryFouSampler::new(&spec, &long, 4, 10.0)?.sample(3)?;
    let theory = spec.stationary_variances()?;
    for i in 0..4 {
        let row = &ens.w[i];
        let emp = row.iter().map(|x| x * x).sum::<f64>() / row.len() as f64;
        println!("component {i}: lambda {:.2}, time-average variance {emp:.4}, stationary {:.4}", spec.lambda[i], theory[i]);
    }
    let lag = fou_covariance(1.0, spec.c[0], spec.lambda[0], hurst)?;
    println!("covariance of component 0 at lag 1: {lag:.4}");
    Ok(())
}
