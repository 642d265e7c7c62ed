#![allow(dead_code)]

use roughflow::rough::TwoParamProcess;
use roughflow::spectral::FourierField;
use rustfft::num_complex::Complex64;

/// Largest `Σ ‖a_{t_k,t_{k+1}}‖^p` over every partition of the grid.
pub fn brute_force_power(a: &TwoParamProcess, p: f64) -> f64 {
    let n = a.len();
    let interior = n - 2;
    let mut best: f64 = 0.0;
    for mask in 0u32..(1 << interior) {
        let mut pts = vec![0];
        pts.extend((0..interior).filter(|b| mask >> b & 1 == 1).map(|b| b + 1));
        pts.push(n - 1);
        best = best.max(pts.windows(2).map(|w| a.norm(w[0], w[1]).powf(p)).sum());
    }
    best
}

/// `−Π[(u·∇)v]` by summing every interacting wavevector pair.
pub fn convolution_oracle(u: &FourierField, v: &FourierField) -> FourierField {
    let grid = u.grid();
    let d = grid.dim();
    let p = grid.points();
    let mut out = vec![Complex64::new(0.0, 0.0); d * p];
    for fa in (0..p).filter(|&f| grid.in_band(f)) {
        let ka = grid.wavevector(fa);
        for fb in (0..p).filter(|&f| grid.in_band(f)) {
            let kb = grid.wavevector(fb);
            let k: Vec<i64> = (0..d).map(|a| ka[a] + kb[a]).collect();
            let Some(target) = grid.flat_index(&k) else { continue };
            if !grid.in_band(target) {
                continue;
            }
            let mut dot = Complex64::new(0.0, 0.0);
            for a in 0..d {
                dot += u.component(a)[fa] * Complex64::new(0.0, kb[a] as f64);
            }
            for c in 0..d {
                out[c * p + target] -= dot * v.component(c)[fb];
            }
        }
    }
    for flat in 1..p {
        let k = grid.wavevector(flat);
        let k2 = grid.k2(flat);
        let kdot: Complex64 = (0..d).map(|a| out[a * p + flat] * k[a] as f64).sum();
        for c in 0..d {
            out[c * p + flat] -= kdot * (k[c] as f64 / k2);
        }
    }
    for c in 0..d {
        out[c * p] = Complex64::new(0.0, 0.0);
    }
    FourierField::from_coeffs(grid, out).unwrap()
}
