use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::fbm::{sample_fbm_with, FbmPath, FgnSampler};
use super::NoiseSpectrum;
use crate::error::{domain, Error, Result};
use crate::quad::{integrate, wynn_epsilon};
use crate::rough::{CovarianceTable, DiscretePath};
use crate::time_grid::TimeGrid;

const QUAD_REL: f64 = 1e-11;

/// Stationary fOU trajectories, one row per spectral component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FouEnsemble {
    pub spectrum: NoiseSpectrum,
    pub grid: TimeGrid,
    /// `w[i][k]` is component `i` at grid point `k`.
    pub w: Vec<Vec<f64>>,
    /// Driving fBM, including the burn-in segment before `t = 0`.
    pub driving: FbmPath,
    /// `None` for the unrescaled process.
    pub epsilon: Option<f64>,
}

impl FouEnsemble {
    pub fn components(&self) -> usize {
        self.w.len()
    }

    /// `w` as a point-major path.
    pub fn as_path(&self) -> Result<DiscretePath> {
        DiscretePath::from_components(self.grid.clone(), &self.w)
    }
}

fn hurst_prefactor(hurst: f64) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(domain(format!("Hurst index must lie in (0, 1), got {hurst}")));
    }
    Ok(libm::tgamma(2.0 * hurst + 1.0) * (PI * hurst).sin() / (2.0 * PI))
}

/// `C_H = Γ(2H+1) sin(πH)/(2π) ∫_ℝ |x|^{1-2H}/(1+x²) dx`, by adaptive
/// quadrature with the tail folded onto `[0, 1]` via `x ↦ 1/x`.
pub fn ch_constant(hurst: f64) -> Result<f64> {
    let pre = hurst_prefactor(hurst)?;
    let e = 1.0 - 2.0 * hurst;
    let head = integrate(|x| x.powf(e) / (1.0 + x * x), 0.0, 1.0, QUAD_REL, 0.0)?;
    let tail = integrate(|y| y.powf(-e) / (1.0 + y * y), 0.0, 1.0, QUAD_REL, 0.0)?;
    Ok(pre * 2.0 * (head.value + tail.value))
}

/// Stationary autocovariance
/// `ν(s) = λ Γ(2H+1) sin(πH)/(2π) ∫_ℝ cos(sx)|x|^{1-2H}/(c²+x²) dx`.
///
/// The oscillatory integral is summed over half-periods between zeros of the
/// cosine and the alternating partial sums are accelerated by Wynn's
/// epsilon algorithm.
pub fn fou_covariance(s: f64, c: f64, lambda: f64, hurst: f64) -> Result<f64> {
    if !(s >= 0.0) || !(c > 0.0) {
        return Err(domain(format!("need s >= 0 and c > 0, got s = {s}, c = {c}")));
    }
    let pre = hurst_prefactor(hurst)?;
    let e = 1.0 - 2.0 * hurst;
    // x = c y
    let scale = c.powf(-2.0 * hurst);
    let a = s * c;
    let f = move |y: f64| (a * y).cos() * y.powf(e) / (1.0 + y * y);
    let integral = if a == 0.0 {
        let head = integrate(f, 0.0, 1.0, QUAD_REL, 0.0)?;
        let tail = integrate(|y| y.powf(-e) / (1.0 + y * y), 0.0, 1.0, QUAD_REL, 0.0)?;
        head.value + tail.value
    } else {
        let first_zero = 0.5 * PI / a;
        let mut total = 0.0;
        let split = first_zero.min(1.0);
        total += integrate(f, 0.0, split, QUAD_REL, 1e-15)?.value;
        if first_zero > 1.0 {
            total += integrate(f, 1.0, first_zero, QUAD_REL, 1e-15)?.value;
        }
        let mut partial = Vec::with_capacity(64);
        partial.push(total);
        for k in 0..48 {
            let lo = (k as f64 + 0.5) * PI / a;
            let hi = lo + PI / a;
            total += integrate(f, lo, hi, QUAD_REL, 1e-16)?.value;
            partial.push(total);
        }
        let (est, err) = wynn_epsilon(&partial);
        if !(err <= 1e-8 * est.abs().max(1e-12)) {
            return Err(Error::Convergence(format!(
                "oscillatory tail did not converge at s = {s}: estimate {est:e}, error {err:e}"
            )));
        }
        est
    };
    Ok(lambda * pre * 2.0 * scale * integral)
}

/// One variation-of-constants step of `dw = -c w dt + √λ dB` per `stride`
/// fine intervals, starting from `w = 0` at the first sample of `b`.
///
/// `∫_s^t e^{-c(t-r)} dB_r = B_{s,t} - c ∫_s^t e^{-c(t-r)} B_{s,r} dr`, with
/// the inner integral evaluated by the composite trapezoid rule on the fine
/// points.
pub(crate) fn voc_path(c: f64, sqrt_lambda: f64, b: &[f64], h: f64, stride: usize) -> Vec<f64> {
    let steps = (b.len() - 1) / stride;
    let decay = (-c * h * stride as f64).exp();
    let weights: Vec<f64> = (0..=stride)
        .map(|j| {
            let w = if j == 0 || j == stride { 0.5 } else { 1.0 };
            w * h * (-c * h * (stride - j) as f64).exp()
        })
        .collect();
    let mut out = Vec::with_capacity(steps + 1);
    let mut w = 0.0;
    out.push(w);
    if sqrt_lambda == 0.0 {
        out.resize(steps + 1, 0.0);
        return out;
    }
    for step in 0..steps {
        let j0 = step * stride;
        let base = b[j0];
        let mut inner = 0.0;
        for j in 1..=stride {
            inner += weights[j] * (b[j0 + j] - base);
        }
        w = decay * w + sqrt_lambda * ((b[j0 + stride] - base) - c * inner);
        out.push(w);
    }
    out
}

/// Runs the fOU recursion on a given driving fBM.
///
/// The recursion starts from zero at the first driving sample and advances
/// `stride` fine intervals per step; the returned ensemble keeps the samples
/// at `t ≥ 0`.
pub fn fou_from_driving(spectrum: &NoiseSpectrum, driving: &FbmPath, stride: usize) -> Result<FouEnsemble> {
    let h = driving
        .grid
        .uniform_step()
        .ok_or_else(|| domain("driving fBM must live on a uniform grid"))?;
    if stride == 0 || driving.anchor % stride != 0 || driving.grid.intervals() % stride != 0 {
        return Err(domain("stride must divide the burn-in and the horizon of the driving grid"));
    }
    if driving.components() != spectrum.len() {
        return Err(crate::error::structural(format!(
            "driving path has {} components, spectrum {}",
            driving.components(),
            spectrum.len()
        )));
    }
    let dt = h * stride as f64;
    let bound = 0.1 / spectrum.c_max();
    if dt > bound * (1.0 + 1e-12) {
        return Err(domain(format!("time step {dt} exceeds the stability bound 0.1/c_max = {bound}")));
    }
    let first = driving.anchor / stride;
    let w = spectrum
        .c
        .iter()
        .zip(&spectrum.lambda)
        .zip(&driving.values)
        .map(|((&c, &l), b)| voc_path(c, l.sqrt(), b, h, stride)[first..].to_vec())
        .collect();
    let times: Vec<f64> = driving.grid.times()[driving.anchor..].iter().step_by(stride).copied().collect();
    Ok(FouEnsemble {
        spectrum: spectrum.clone(),
        grid: TimeGrid::new(times)?,
        w,
        driving: driving.clone(),
        epsilon: None,
    })
}

/// Reusable sampler of stationary fOU ensembles on a fixed output grid.
pub struct StationaryFouSampler {
    spectrum: NoiseSpectrum,
    fine: TimeGrid,
    fine_step: f64,
    substeps: usize,
    fgn: FgnSampler,
}

impl StationaryFouSampler {
    /// `grid` must be uniform and start at 0; burn-in runs from
    /// `-burn_in_factor / c_min` rounded up to a whole output step.
    pub fn new(spectrum: &NoiseSpectrum, grid: &TimeGrid, substeps: usize, burn_in_factor: f64) -> Result<Self> {
        let dt = grid
            .uniform_step()
            .ok_or_else(|| domain("fOU output grid must be uniform"))?;
        if grid.start() != 0.0 {
            return Err(domain("fOU output grid must start at t = 0"));
        }
        let bound = 0.1 / spectrum.c_max();
        if dt > bound * (1.0 + 1e-12) {
            return Err(domain(format!("time step {dt} exceeds the stability bound 0.1/c_max = {bound}")));
        }
        if substeps == 0 || !(burn_in_factor >= 0.0) {
            return Err(domain("need at least one substep and a non-negative burn-in"));
        }
        let burn_steps = (burn_in_factor / spectrum.c_min() / dt).ceil() as usize;
        let intervals = (burn_steps + grid.intervals()) * substeps;
        let fine = TimeGrid::uniform(-(burn_steps as f64) * dt, grid.end(), intervals);
        let fgn = FgnSampler::new(spectrum.hurst, intervals)?;
        Ok(Self { spectrum: spectrum.clone(), fine, fine_step: dt / substeps as f64, substeps, fgn })
    }

    pub fn sample(&self, seed: u64) -> Result<FouEnsemble> {
        let driving = sample_fbm_with(&self.fgn, &self.fine, self.fine_step, self.spectrum.len(), seed)?;
        fou_from_driving(&self.spectrum, &driving, self.substeps)
    }
}

/// Stationary fOU sample with four substeps per output step and burn-in
/// `10 / c_min`.
pub fn fou_stationary_sample(spectrum: &NoiseSpectrum, grid: &TimeGrid, seed: u64) -> Result<FouEnsemble> {
    StationaryFouSampler::new(spectrum, grid, 4, 10.0)?.sample(seed)
}

/// Time dilation `w^ε_t = w_{t/ε}` of an unrescaled ensemble and the
/// integrated fast path `X^ε_{0,t} = ε^{H-1} ∫_0^t w^ε_r dr` (composite
/// trapezoid).
///
/// The driving path of the returned ensemble is `B^H_t = ε^H B̂_{t/ε}`, the
/// fBM that couples `X^ε` to the limit path.
pub fn rescale_and_integrate(ens: &FouEnsemble, epsilon: f64) -> Result<(DiscretePath, FouEnsemble)> {
    if ens.epsilon.is_some() {
        return Err(domain("ensemble is already rescaled"));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(domain(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let h = ens.spectrum.hurst;
    let grid = TimeGrid::new(ens.grid.times().iter().map(|u| u * epsilon).collect())?;
    let x = integrate_fast(&grid, &ens.w, epsilon, h)?;
    let mut driving = ens.driving.clone();
    driving.grid = TimeGrid::new(driving.grid.times().iter().map(|u| u * epsilon).collect())?;
    let s = epsilon.powf(h);
    for row in &mut driving.values {
        for v in row.iter_mut() {
            *v *= s;
        }
    }
    let w_eps = FouEnsemble {
        spectrum: ens.spectrum.clone(),
        grid,
        w: ens.w.clone(),
        driving,
        epsilon: Some(epsilon),
    };
    Ok((x, w_eps))
}

/// `ε^{H-1} ∫_{t_0}^{t} w dr` by the composite trapezoid rule.
pub fn integrate_fast(grid: &TimeGrid, w: &[Vec<f64>], epsilon: f64, hurst: f64) -> Result<DiscretePath> {
    let amp = epsilon.powf(hurst - 1.0);
    let t = grid.times();
    let rows: Vec<Vec<f64>> = w
        .iter()
        .map(|row| {
            let mut acc = 0.0;
            let mut out = Vec::with_capacity(row.len());
            out.push(0.0);
            for k in 1..row.len() {
                acc += 0.5 * (t[k] - t[k - 1]) * (row[k] + row[k - 1]);
                out.push(amp * acc);
            }
            out
        })
        .collect();
    DiscretePath::from_components(grid.clone(), &rows)
}

/// Limit path `B = M^{-1} Q^{1/2} B^H` on the ensemble grid.
pub fn limit_path(ens: &FouEnsemble) -> Result<DiscretePath> {
    let scale = ens.spectrum.limit_scale();
    let all = DiscretePath::from_components(ens.driving.grid.clone(), &ens.driving.values)?;
    all.restrict(&ens.grid)?.scaled(&scale)
}

/// Fast-time step of the autocovariance table behind [`fast_path_covariance`].
const COVARIANCE_STEP: f64 = 1.0 / 64.0;

/// Exact covariance of the increments of component `i` of
/// `X^ε_t = ε^{H−1} ∫_0^t w^ε_r dr` on `grid`.
///
/// `Var X_{0,τ} = 2ε^{2H} ∫_0^{τ/ε} (τ/ε − v) ν_i(v) dv` with the stationary
/// autocovariance `ν_i` tabulated on a fast-time grid and integrated by the
/// trapezoid rule; cross terms follow by polarization.
pub fn fast_path_covariance(
    spectrum: &NoiseSpectrum,
    component: usize,
    epsilon: f64,
    grid: &TimeGrid,
) -> Result<CovarianceTable> {
    if component >= spectrum.len() {
        return Err(domain(format!("component {component} outside a spectrum of {}", spectrum.len())));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(domain(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let (c, lambda, hurst) = (spectrum.c[component], spectrum.lambda[component], spectrum.hurst);
    let span = grid.end() - grid.start();
    let cells = (span / epsilon / COVARIANCE_STEP).ceil() as usize + 1;
    let nu = (0..=cells)
        .map(|k| fou_covariance(k as f64 * COVARIANCE_STEP, c, lambda, hurst))
        .collect::<Result<Vec<f64>>>()?;
    // Φ(x_k) = ∫_0^{x_k} (x_k − v) ν(v) dv = x_k A_k − B_k
    let mut phi = vec![0.0; cells + 1];
    let (mut a, mut b) = (0.0, 0.0);
    for k in 1..=cells {
        let (v0, v1) = ((k - 1) as f64 * COVARIANCE_STEP, k as f64 * COVARIANCE_STEP);
        a += 0.5 * COVARIANCE_STEP * (nu[k - 1] + nu[k]);
        b += 0.5 * COVARIANCE_STEP * (v0 * nu[k - 1] + v1 * nu[k]);
        phi[k] = v1 * a - b;
    }
    let scale = 2.0 * epsilon.powf(2.0 * hurst);
    let var = |tau: f64| {
        let x = tau.abs() / epsilon / COVARIANCE_STEP;
        let k = (x.floor() as usize).min(cells - 1);
        let r = x - k as f64;
        scale * ((1.0 - r) * phi[k] + r * phi[k + 1])
    };
    Ok(CovarianceTable::from_fn(grid, |u, v, up, vp| 0.5 * (var(vp - u) + var(up - v) - var(up - u) - var(vp - v))))
}

/// `max_t |X^ε_{0,t} + ε^H M^{-1} w^ε_{0,t} − M^{-1}Q^{1/2} B^H_{0,t}|`.
pub fn coupling_defect(x: &DiscretePath, w_eps: &FouEnsemble) -> Result<f64> {
    let eps = w_eps
        .epsilon
        .ok_or_else(|| domain("coupling defect needs a rescaled ensemble"))?;
    let b = limit_path(w_eps)?;
    x.compatible(&b)?;
    let s = eps.powf(w_eps.spectrum.hurst);
    let mut worst: f64 = 0.0;
    for k in 0..x.len() {
        let mut acc = 0.0;
        for i in 0..x.dim() {
            let d = x.point(k)[i] + s * (w_eps.w[i][k] - w_eps.w[i][0]) / w_eps.spectrum.c[i]
                - (b.point(k)[i] - b.point(0)[i]);
            acc += d * d;
        }
        worst = worst.max(acc.sqrt());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ch_constant_matches_gamma_closed_form() {
        for h in [0.35, 0.4, 0.45, 0.5, 0.7] {
            let want = libm::tgamma(2.0 * h + 1.0) / 2.0;
            assert!((ch_constant(h).unwrap() - want).abs() < 1e-9 * want, "H = {h}");
        }
        assert!(ch_constant(1.0).is_err());
    }

    #[test]
    fn markov_covariance() {
        for s in [0.0, 0.5, 1.0, 2.0] {
            let v = fou_covariance(s, 1.0, 1.0, 0.5).unwrap();
            assert!((v - 0.5 * (-s as f64).exp()).abs() < 1e-8, "s = {s}: {v}");
        }
    }

    #[test]
    fn fast_path_covariance_of_the_markov_case() {
        let spec = NoiseSpectrum::new(0.5, vec![2.0], vec![1.5], 3.0).unwrap();
        let g = TimeGrid::uniform(0.0, 1.0, 4);
        let eps: f64 = 0.125;
        let table = fast_path_covariance(&spec, 0, eps, &g).unwrap();
        // ν(v) = λ e^{-cv} / (2c)
        let var = |tau: f64| {
            let x = tau / eps;
            eps * 2.0 / 1.5 * (x / 1.5 - (1.0 - (-1.5 * x).exp()) / 2.25)
        };
        for (a, b) in [(0, 1), (0, 4), (1, 3)] {
            let want = var(g.at(b) - g.at(a));
            assert!((table.get(a, b, a, b) - want).abs() < 1e-4 * want, "({a}, {b})");
        }
        assert!(fast_path_covariance(&spec, 1, eps, &g).is_err());
    }

    #[test]
    fn zero_lambda_component_is_silent() {
        let b: Vec<f64> = (0..41).map(|k| (k as f64 * 0.3).sin()).collect();
        assert!(voc_path(1.5, 0.0, &b, 0.01, 4).iter().all(|&w| w == 0.0));
    }

    #[test]
    fn frozen_noise_integrates_linearly() {
        let g = TimeGrid::uniform(0.0, 1.0, 10);
        let eps: f64 = 0.25;
        let x = integrate_fast(&g, &[vec![2.0; 11]], eps, 0.4).unwrap();
        for k in 0..11 {
            let want = eps.powf(-0.6) * 2.0 * g.at(k);
            assert!((x.point(k)[0] - want).abs() < 1e-14);
        }
    }
}
