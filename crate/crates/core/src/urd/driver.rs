use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, structural, Result};
use crate::rng::split_seed;
use crate::rough::{ControlFn, Level2Area};
use crate::spectral::{sobolev_norm, transport_apply, transport_sparse, FourierField, ModeBasis, SobolevLevel};

/// Unbounded rough driver built from a level-2 lift whose component `i`
/// drives transport along the mode field `e_i`:
/// `A¹_{s,t} = Σ_i Z^i_{s,t} T_i`, `A²_{s,t} = Σ_{i,j} 𝕏^{ij}_{s,t} T_j T_i`
/// with `T_i u = −Π[(e_i·∇)u]`.
#[derive(Clone, Debug)]
pub struct DriverPair {
    lift: Level2Area,
    basis: ModeBasis,
}

/// `T_i u` for every mode field.
pub fn mode_operators(basis: &ModeBasis, u: &FourierField) -> Result<Vec<FourierField>> {
    basis.fields().map(|e| transport_sparse(e, u)).collect()
}

/// `A¹ u = −Π[(h·∇)u]` with `h = Σ_i z_i e_i`.
pub fn a1_apply(basis: &ModeBasis, z_inc: &[f64], u: &FourierField) -> Result<FourierField> {
    let h = basis.combine(z_inc)?;
    transport_apply(&h, u)
}

/// `A² u = Σ_{i,j} area_{ij} T_j T_i u`.
pub fn a2_apply(basis: &ModeBasis, area: &[f64], u: &FourierField) -> Result<FourierField> {
    let tu = mode_operators(basis, u)?;
    a2_from_modes(basis, area, &tu)
}

pub(crate) fn a2_from_modes(basis: &ModeBasis, area: &[f64], tu: &[FourierField]) -> Result<FourierField> {
    let m = basis.len();
    if area.len() != m * m {
        return Err(structural(format!("area has {} entries, basis needs {}", area.len(), m * m)));
    }
    let mut out = FourierField::zeros(basis.grid());
    let mut v = FourierField::zeros(basis.grid());
    for j in 0..m {
        v.scale(0.0);
        let mut any = false;
        for i in 0..m {
            let a = area[i * m + j];
            if a != 0.0 {
                v.axpy(a, &tu[i]);
                any = true;
            }
        }
        if any {
            out.axpy(1.0, &transport_sparse(basis.field(j), &v)?);
        }
    }
    Ok(out)
}

pub(crate) fn a1_from_modes(z: &[f64], tu: &[FourierField], grid: &crate::spectral::TorusGrid) -> FourierField {
    let mut out = FourierField::zeros(grid);
    for (zi, t) in z.iter().zip(tu) {
        if *zi != 0.0 {
            out.axpy(*zi, t);
        }
    }
    out
}

impl DriverPair {
    pub fn new(lift: Level2Area, basis: ModeBasis) -> Result<Self> {
        if lift.dim() != basis.len() {
            return Err(structural(format!(
                "lift has {} components but the mode map has {} fields",
                lift.dim(),
                basis.len()
            )));
        }
        Ok(Self { lift, basis })
    }

    pub fn lift(&self) -> &Level2Area {
        &self.lift
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn grid(&self) -> &crate::time_grid::TimeGrid {
        self.lift.grid()
    }

    pub fn a1(&self, s: usize, t: usize, u: &FourierField) -> Result<FourierField> {
        a1_apply(&self.basis, &self.lift.increment(s, t), u)
    }

    pub fn a2(&self, s: usize, t: usize, u: &FourierField) -> Result<FourierField> {
        a2_apply(&self.basis, &self.lift.area(s, t), u)
    }

    /// `A¹_{s,t}u + A²_{s,t}u` sharing the `T_i u` evaluations.
    pub fn expansion(&self, s: usize, t: usize, u: &FourierField) -> Result<FourierField> {
        let tu = mode_operators(&self.basis, u)?;
        let mut out = a1_from_modes(&self.lift.increment(s, t), &tu, self.basis.grid());
        out.axpy(1.0, &a2_from_modes(&self.basis, &self.lift.area(s, t), &tu)?);
        Ok(out)
    }

    /// Chen-restricted driver on a sub-grid.
    pub fn restrict(&self, coarse: &crate::time_grid::TimeGrid) -> Result<DriverPair> {
        DriverPair::new(self.lift.restrict(coarse)?, self.basis.clone())
    }

    /// `max ‖δA¹_{s,u,t}φ‖` and `max ‖δA²_{s,u,t}φ − A¹_{u,t}A¹_{s,u}φ‖`
    /// over grid triples, relative to `max(‖A¹_{s,t}φ‖, ‖A²_{s,t}φ‖)`.
    pub fn chen_defects(&self, phi: &FourierField) -> Result<(f64, f64)> {
        let n = self.lift.len();
        let mut a1 = vec![vec![None; n]; n];
        let mut a2 = vec![vec![None; n]; n];
        let mut scale: f64 = f64::MIN_POSITIVE;
        for s in 0..n {
            for t in s + 1..n {
                let x = self.a1(s, t, phi)?;
                let y = self.a2(s, t, phi)?;
                scale = scale.max(x.norm_l2()).max(y.norm_l2());
                a1[s][t] = Some(x);
                a2[s][t] = Some(y);
            }
        }
        let get = |m: &Vec<Vec<Option<FourierField>>>, s: usize, t: usize| m[s][t].clone().unwrap();
        let (mut d1, mut d2): (f64, f64) = (0.0, 0.0);
        for s in 0..n {
            for t in s + 2..n {
                for u in s + 1..t {
                    let mut x = get(&a1, s, t);
                    x.axpy(-1.0, &get(&a1, s, u));
                    x.axpy(-1.0, &get(&a1, u, t));
                    d1 = d1.max(x.norm_l2());
                    let mut y = get(&a2, s, t);
                    y.axpy(-1.0, &get(&a2, s, u));
                    y.axpy(-1.0, &get(&a2, u, t));
                    y.axpy(-1.0, &self.a1(u, t, &get(&a1, s, u))?);
                    d2 = d2.max(y.norm_l2());
                }
            }
        }
        Ok((d1 / scale, d2 / scale))
    }
}

/// Operator-norm ratios of a driver on the truncated space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriverNormReport {
    pub level: u32,
    pub sigma: f64,
    /// `max ‖A¹_{s,t}φ‖_{H^{-(m+1)}} / (‖Z_{s,t}‖_{H^σ} ‖φ‖_{H^{-m}})`.
    pub a1_ratio: f64,
    /// `max ‖A²_{s,t}φ‖_{H^{-(m+2)}} / (‖𝕏_{s,t}‖_{H^σ⊗H^σ} ‖φ‖_{H^{-m}})`.
    pub a2_ratio: f64,
    /// Smallest `K` with `‖A¹_{s,t}‖ ≤ (K|t−s|)^α` and
    /// `‖A²_{s,t}‖ ≤ (K|t−s|)^{2α}` using the measured operator norms.
    pub k: f64,
}

/// Estimates the driver bounds over grid pairs with `trials` random unit
/// `H^{-m}` test fields.
pub fn driver_norm_probe(d: &DriverPair, level: u32, trials: usize, sigma: f64, alpha: f64, seed: u64) -> Result<DriverNormReport> {
    if level > 2 {
        return Err(domain("probe level must be 0, 1 or 2"));
    }
    if trials < 32 {
        return Err(domain(format!("need at least 32 trials, got {trials}")));
    }
    let basis = d.basis();
    let weights: Vec<f64> = basis.fields().map(|e| sobolev_norm(e, SobolevLevel(sigma))).collect();
    let m = basis.len();
    let lo = SobolevLevel(-(level as f64));
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, 0x0b5e));
    let phis: Vec<FourierField> = (0..trials)
        .map(|_| {
            let f = FourierField::random_band_limited(basis.grid(), &mut rng, 0.0);
            let n = sobolev_norm(&f, lo);
            &f * (1.0 / n)
        })
        .collect();
    let tmodes: Vec<Vec<FourierField>> = phis.iter().map(|p| mode_operators(basis, p)).collect::<Result<_>>()?;
    let lift = d.lift();
    let n = lift.len();
    let t = lift.grid().times();
    let (mut r1, mut r2): (f64, f64) = (0.0, 0.0);
    let mut norms = Vec::new();
    for s in 0..n {
        for e in s + 1..n {
            let z = lift.increment(s, e);
            let area = lift.area(s, e);
            let zn = z.iter().zip(&weights).map(|(a, w)| (a * w).powi(2)).sum::<f64>().sqrt();
            let mut an = 0.0;
            for i in 0..m {
                for j in 0..m {
                    an += (area[i * m + j] * weights[i] * weights[j]).powi(2);
                }
            }
            let an = an.sqrt();
            let (mut op1, mut op2): (f64, f64) = (0.0, 0.0);
            for tu in &tmodes {
                let x = a1_from_modes(&z, tu, basis.grid());
                let y = a2_from_modes(basis, &area, tu)?;
                op1 = op1.max(sobolev_norm(&x, SobolevLevel(-(level as f64) - 1.0)));
                op2 = op2.max(sobolev_norm(&y, SobolevLevel(-(level as f64) - 2.0)));
            }
            if zn > 0.0 {
                r1 = r1.max(op1 / zn);
            }
            if an > 0.0 {
                r2 = r2.max(op2 / an);
            }
            norms.push((t[e] - t[s], op1, op2));
        }
    }
    let k = norms
        .iter()
        .map(|&(dt, a, b)| a.powf(1.0 / alpha).max(b.powf(1.0 / (2.0 * alpha))) / dt)
        .fold(0.0, f64::max);
    Ok(DriverNormReport { level, sigma, a1_ratio: r1, a2_ratio: r2, k })
}

/// `ω_A(s,t) = K|t − s|` from a probe report.
pub fn driver_control(report: &DriverNormReport, grid: &crate::time_grid::TimeGrid) -> Result<ControlFn> {
    ControlFn::linear(grid, report.k)
}
