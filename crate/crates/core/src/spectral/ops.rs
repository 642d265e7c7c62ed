use rustfft::num_complex::Complex64;

use super::{FourierField, SobolevLevel, TorusGrid};
use crate::error::{domain, Result};

/// Supports up to this many wavevectors use the direct convolution in
/// [`transport_apply`].
pub const SPARSE_TRANSPORT_LIMIT: usize = 32;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Leray projection `û(k) ↦ (I − k kᵀ/|k|²) û(k)`; the zero mode is left alone.
pub fn leray_project(f: &FourierField) -> FourierField {
    let mut out = f.clone();
    project_in_place(&mut out);
    out
}

pub(crate) fn project_in_place(f: &mut FourierField) {
    let grid = f.grid().clone();
    let p = grid.points();
    let d = grid.dim();
    let coeffs = f.coeffs_mut();
    for flat in 1..p {
        let k = grid.wavevector(flat);
        let k2 = grid.k2(flat);
        let mut dot = ZERO;
        for c in 0..d {
            dot += coeffs[c * p + flat] * k[c] as f64;
        }
        if dot == ZERO {
            continue;
        }
        let s = dot / k2;
        for c in 0..d {
            coeffs[c * p + flat] -= s * k[c] as f64;
        }
    }
}

/// `(Σ_{k≠0} |k|^{2r} |û(k)|²)^{1/2}`.
pub fn sobolev_norm(f: &FourierField, r: SobolevLevel) -> f64 {
    let grid = f.grid();
    let p = grid.points();
    let k2 = grid.k2_table();
    let mut acc = 0.0;
    for c in 0..grid.dim() {
        let comp = f.component(c);
        for flat in 1..p {
            let a = comp[flat].norm_sqr();
            if a != 0.0 {
                acc += if r.0 == 0.0 { a } else { k2[flat].powf(r.0) * a };
            }
        }
    }
    acc.sqrt()
}

/// Sharp cutoff `J^η`: keeps the modes with `|k| ≤ 1/η`.
pub fn smoothing_apply(f: &FourierField, eta: f64) -> Result<FourierField> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(domain(format!("smoothing parameter must lie in (0, 1], got {eta}")));
    }
    let radius2 = 1.0 / (eta * eta);
    let mut out = f.clone();
    let grid = f.grid().clone();
    let p = grid.points();
    for c in 0..grid.dim() {
        let comp = out.component_mut(c);
        for flat in 0..p {
            if grid.k2(flat) > radius2 * (1.0 + 1e-12) {
                comp[flat] = ZERO;
            }
        }
    }
    Ok(out)
}

/// `Δu`, i.e. multiplication by `−|k|²`.
pub fn laplacian(f: &FourierField) -> FourierField {
    let mut out = f.clone();
    let grid = f.grid().clone();
    let p = grid.points();
    for c in 0..grid.dim() {
        for (flat, a) in out.component_mut(c).iter_mut().enumerate() {
            *a *= -grid.k2(flat);
        }
    }
    debug_assert_eq!(out.coeffs().len(), grid.dim() * p);
    out
}

/// Heat propagator `e^{νΔτ}`.
pub fn heat_propagate(f: &FourierField, nu: f64, tau: f64) -> FourierField {
    let mut out = f.clone();
    heat_in_place(&mut out, nu, tau);
    out
}

pub(crate) fn heat_in_place(f: &mut FourierField, nu: f64, tau: f64) {
    let grid = f.grid().clone();
    for c in 0..grid.dim() {
        for (flat, a) in f.component_mut(c).iter_mut().enumerate() {
            let k2 = grid.k2(flat);
            if k2 != 0.0 {
                *a *= (-nu * k2 * tau).exp();
            }
        }
    }
}

/// Navier-Stokes nonlinearity `b(u, v) = −Π[(u·∇)v]`, dealiased.
pub fn nonlinearity_b(u: &FourierField, v: &FourierField) -> Result<FourierField> {
    u.same_grid(v)?;
    Ok(transport_pseudo_spectral(u, v))
}

/// Transport `−Π[(h·∇)u]`.
///
/// Dispatches to a direct convolution over the support of `h` when it is
/// small (mode fields of the noise), otherwise to the pseudo-spectral
/// product. Both paths truncate inputs and output to the dealiasing band and
/// agree to rounding.
pub fn transport_apply(h: &FourierField, u: &FourierField) -> Result<FourierField> {
    h.same_grid(u)?;
    let support = band_support(h);
    if support.len() <= SPARSE_TRANSPORT_LIMIT {
        Ok(transport_sparse_on(h, &support, u))
    } else {
        Ok(transport_pseudo_spectral(h, u))
    }
}

fn band_support(h: &FourierField) -> Vec<usize> {
    let grid = h.grid();
    h.support().into_iter().filter(|&flat| grid.in_band(flat)).collect()
}

/// Direct convolution form of [`transport_apply`].
pub fn transport_sparse(h: &FourierField, u: &FourierField) -> Result<FourierField> {
    h.same_grid(u)?;
    Ok(transport_sparse_on(h, &band_support(h), u))
}

fn transport_sparse_on(h: &FourierField, support: &[usize], u: &FourierField) -> FourierField {
    let grid = h.grid();
    let d = grid.dim();
    let p = grid.points();
    let limit = grid.band_limit();
    let hc = h.coeffs();
    let uc = u.coeffs();
    let mut out = FourierField::zeros(grid);
    let oc = out.coeffs_mut();
    let u_support: Vec<usize> = u.support().into_iter().filter(|&f| grid.in_band(f)).collect();
    for &fh in support {
        let kh = grid.wavevector(fh);
        let hv: Vec<Complex64> = (0..d).map(|c| hc[c * p + fh]).collect();
        for &fu in &u_support {
            let ku = grid.wavevector(fu);
            let mut k = [0i64; 3];
            let mut ok = true;
            for a in 0..d {
                k[a] = kh[a] + ku[a];
                ok &= k[a].abs() <= limit;
            }
            if !ok {
                continue;
            }
            let target = grid.flat_index(&k[..d]).expect("band wavevector");
            if !grid.in_band(target) {
                continue;
            }
            // (h·∇)u at this pair: Σ_j ĥ_j i ku_j û_c
            let mut hk = ZERO;
            for a in 0..d {
                hk += hv[a] * ku[a] as f64;
            }
            let factor = Complex64::new(0.0, 1.0) * hk;
            for c in 0..d {
                oc[c * p + target] -= factor * uc[c * p + fu];
            }
        }
    }
    project_in_place(&mut out);
    out
}

/// Pseudo-spectral form of [`transport_apply`].
pub fn transport_pseudo_spectral(h: &FourierField, u: &FourierField) -> FourierField {
    let grid = h.grid();
    let d = grid.dim();
    let p = grid.points();
    let mut phys_h = Vec::with_capacity(d);
    for c in 0..d {
        let mut buf = banded(grid, h.component(c));
        grid.fft(&mut buf, true);
        phys_h.push(buf);
    }
    let mut out = Vec::with_capacity(d * p);
    let mut grad = vec![ZERO; p];
    for c in 0..d {
        let uc = banded(grid, u.component(c));
        let mut acc = vec![ZERO; p];
        for (a, ha) in phys_h.iter().enumerate() {
            for (flat, g) in grad.iter_mut().enumerate() {
                *g = uc[flat] * Complex64::new(0.0, grid.wavevector(flat)[a] as f64);
            }
            grid.fft(&mut grad, true);
            for ((s, hv), g) in acc.iter_mut().zip(ha).zip(&grad) {
                *s += hv.re * g.re;
            }
        }
        grid.fft(&mut acc, false);
        for (flat, s) in acc.iter_mut().enumerate() {
            *s = if grid.in_band(flat) { -*s } else { ZERO };
        }
        out.extend(acc);
    }
    let mut f = FourierField::from_coeffs(grid, out).expect("layout");
    project_in_place(&mut f);
    f
}

fn banded(grid: &TorusGrid, comp: &[Complex64]) -> Vec<Complex64> {
    comp.iter()
        .enumerate()
        .map(|(flat, &a)| if grid.in_band(flat) { a } else { ZERO })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn projection_by_hand() {
        let g = TorusGrid::new(2, 8, 1.0).unwrap();
        let mut f = FourierField::zeros(&g);
        f.set_mode_pair(&[1, 0], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let p = leray_project(&f);
        assert_eq!(p.coeff(&[1, 0]).unwrap(), vec![c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn gradients_are_annihilated() {
        let g = TorusGrid::new(3, 8, 2.0 / 3.0).unwrap();
        let mut f = FourierField::zeros(&g);
        let k = [1i64, -2, 1];
        let amp = c(0.3, -0.7);
        let grad: Vec<Complex64> = k.iter().map(|&kj| c(0.0, kj as f64) * amp).collect();
        f.set_mode_pair(&k, &grad).unwrap();
        assert!(leray_project(&f).norm_l2() < 1e-15);
    }

    #[test]
    fn sobolev_two_modes() {
        let g = TorusGrid::new(2, 8, 1.0).unwrap();
        let mut f = FourierField::zeros(&g);
        f.set_coeff(&[0, 1], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        f.set_coeff(&[3, 0], &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let want = (1.0f64 + 1.0 / 9.0).sqrt();
        assert!((sobolev_norm(&f, SobolevLevel(-1.0)) - want).abs() < 1e-15);
    }

    #[test]
    fn smoothing_threshold() {
        let g = TorusGrid::new(2, 16, 1.0).unwrap();
        let mut f = FourierField::zeros(&g);
        f.set_mode_pair(&[4, 0], &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(smoothing_apply(&f, 0.2).unwrap(), f);
        assert_eq!(smoothing_apply(&f, 0.3).unwrap().norm_l2(), 0.0);
        assert!(smoothing_apply(&f, 0.0).is_err());
        assert!(smoothing_apply(&f, 1.5).is_err());
    }

    #[test]
    fn sparse_and_pseudo_spectral_agree() {
        let g = TorusGrid::new(2, 16, 2.0 / 3.0).unwrap();
        let mut rng = stream_rng(5, 0);
        let u = FourierField::random_band_limited(&g, &mut rng, 1.0);
        let mut h = FourierField::zeros(&g);
        h.set_mode_pair(&[2, 1], &[c(-0.5, 0.2), c(1.0, -0.4)]).unwrap();
        let a = transport_sparse(&h, &u).unwrap();
        let b = transport_pseudo_spectral(&h, &u);
        assert!((&a - &b).max_abs() < 1e-13);
    }
}
