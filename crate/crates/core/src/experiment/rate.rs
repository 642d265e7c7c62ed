use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// One measurement `value(ε)` from one seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub eps: f64,
    pub seed: u64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% bootstrap interval for the slope, resampling seeds.
    pub ci: (f64, f64),
}

fn ols(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| {
        let slope = sxy / sxx;
        (slope, my - slope * mx)
    })
}

const RESAMPLES: usize = 1000;

/// Least squares on `(ln ε, ln value)` with a seed-bootstrap interval.
pub fn fit_rate(points: &[RatePoint], bootstrap_seed: u64) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(domain(format!("rate fit needs at least 4 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|p| !(p.value > 0.0 && p.eps > 0.0)) {
        return Err(domain(format!("rate fit needs positive data, got value {} at ε = {}", p.value, p.eps)));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|p| (p.eps.ln(), p.value.ln())).collect();
    let (slope, intercept) = ols(&logs).ok_or_else(|| domain("rate fit needs at least two distinct ε"))?;

    let mut seeds: Vec<u64> = points.iter().map(|p| p.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    let groups: Vec<Vec<(f64, f64)>> = seeds
        .iter()
        .map(|s| points.iter().zip(&logs).filter(|(p, _)| p.seed == *s).map(|(_, l)| *l).collect())
        .collect();
    let ci = if groups.len() < 2 {
        (slope, slope)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(bootstrap_seed);
        let mut slopes = Vec::with_capacity(RESAMPLES);
        let mut sample = Vec::with_capacity(logs.len());
        for _ in 0..RESAMPLES {
            sample.clear();
            for _ in 0..groups.len() {
                sample.extend_from_slice(&groups[rng.random_range(0..groups.len())]);
            }
            if let Some((s, _)) = ols(&sample) {
                slopes.push(s);
            }
        }
        slopes.sort_by(f64::total_cmp);
        let q = |x: f64| slopes[((slopes.len() - 1) as f64 * x).round() as usize];
        (q(0.025), q(0.975))
    };
    Ok(RateFit { slope, intercept, ci })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(p: f64) -> Vec<RatePoint> {
        (1..=6).map(|k| {
            let eps = 2f64.powi(-k);
            RatePoint { eps, seed: 0, value: 3.0 * eps.powf(p) }
        })
        .collect()
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_rate(&power(0.4), 0).unwrap();
        assert!((fit.slope - 0.4).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn constant_data_has_zero_slope() {
        let fit = fit_rate(&power(0.0), 0).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_data() {
        let mut pts = power(0.4);
        assert!(fit_rate(&pts[..3], 0).is_err());
        pts[2].value = 0.0;
        assert!(fit_rate(&pts, 0).is_err());
    }
}
