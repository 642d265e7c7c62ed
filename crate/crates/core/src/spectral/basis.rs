use rustfft::num_complex::Complex64;

use super::{FourierField, TorusGrid};
use crate::error::{domain, Result};

/// One real divergence-free mode field `√2 p cos(k·x)` or `√2 p sin(k·x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeField {
    pub wavevector: Vec<i64>,
    pub polarization: Vec<f64>,
    pub sine: bool,
    pub field: FourierField,
}

/// Ordered list of unit-`L²` divergence-free real fields on a grid.
///
/// Wavevectors are taken from the half-space (first nonzero entry positive)
/// inside the dealiasing band and sorted by `|k|²`, then lexicographically.
/// Each wavevector contributes, per polarization, a cosine field followed by
/// a sine field.
#[derive(Clone, Debug)]
pub struct ModeBasis {
    grid: TorusGrid,
    modes: Vec<ModeField>,
}

impl ModeBasis {
    pub fn lowest(grid: &TorusGrid, count: usize) -> Result<Self> {
        let d = grid.dim();
        let mut ks: Vec<Vec<i64>> = (0..grid.points())
            .filter(|&f| grid.in_band(f) && f != 0)
            .map(|f| grid.wavevector(f)[..d].to_vec())
            .filter(|k| k.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0))
            .collect();
        ks.sort_by(|a, b| {
            let na: i64 = a.iter().map(|x| x * x).sum();
            let nb: i64 = b.iter().map(|x| x * x).sum();
            na.cmp(&nb).then_with(|| a.cmp(b))
        });
        let mut modes = Vec::with_capacity(count);
        'outer: for k in ks {
            for pol in polarizations(&k) {
                for sine in [false, true] {
                    if modes.len() == count {
                        break 'outer;
                    }
                    modes.push(ModeField {
                        field: mode_field(grid, &k, &pol, sine)?,
                        wavevector: k.clone(),
                        polarization: pol.clone(),
                        sine,
                    });
                }
            }
        }
        if modes.len() < count {
            return Err(domain(format!(
                "grid band holds only {} divergence-free modes, {count} requested",
                modes.len()
            )));
        }
        Ok(Self { grid: grid.clone(), modes })
    }

    /// Builds a basis from explicit fields (e.g. uniform translations).
    pub fn from_fields(grid: &TorusGrid, fields: Vec<FourierField>) -> Result<Self> {
        let mut modes = Vec::with_capacity(fields.len());
        for f in fields {
            f.same_grid(&FourierField::zeros(grid))?;
            modes.push(ModeField { wavevector: Vec::new(), polarization: Vec::new(), sine: false, field: f });
        }
        Ok(Self { grid: grid.clone(), modes })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mode(&self, i: usize) -> &ModeField {
        &self.modes[i]
    }

    pub fn field(&self, i: usize) -> &FourierField {
        &self.modes[i].field
    }

    pub fn fields(&self) -> impl Iterator<Item = &FourierField> {
        self.modes.iter().map(|m| &m.field)
    }

    /// `Σ_i z_i e_i`.
    pub fn combine(&self, z: &[f64]) -> Result<FourierField> {
        if z.len() != self.len() {
            return Err(crate::error::structural(format!(
                "{} coefficients for a basis of {} fields",
                z.len(),
                self.len()
            )));
        }
        let mut out = FourierField::zeros(&self.grid);
        for (zi, m) in z.iter().zip(&self.modes) {
            if *zi != 0.0 {
                out.axpy(*zi, &m.field);
            }
        }
        Ok(out)
    }
}

fn polarizations(k: &[i64]) -> Vec<Vec<f64>> {
    let kf: Vec<f64> = k.iter().map(|&x| x as f64).collect();
    let norm = kf.iter().map(|x| x * x).sum::<f64>().sqrt();
    if k.len() == 2 {
        return vec![vec![-kf[1] / norm, kf[0] / norm]];
    }
    // axis least aligned with k
    let axis = (0..3)
        .min_by(|&a, &b| kf[a].abs().partial_cmp(&kf[b].abs()).unwrap())
        .unwrap();
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let cross = |a: &[f64], b: &[f64]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let p1 = cross(&kf, &e);
    let n1 = p1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let p1: Vec<f64> = p1.iter().map(|x| x / n1).collect();
    let p2 = cross(&kf, &p1);
    let p2: Vec<f64> = p2.iter().map(|x| x / norm).collect();
    vec![p1, p2]
}

fn mode_field(grid: &TorusGrid, k: &[i64], pol: &[f64], sine: bool) -> Result<FourierField> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amp: Vec<Complex64> = pol
        .iter()
        .map(|&p| if sine { Complex64::new(0.0, -p * s) } else { Complex64::new(p * s, 0.0) })
        .collect();
    let mut f = FourierField::zeros(grid);
    f.set_mode_pair(k, &amp)?;
    Ok(f)
}

/// The lowest `count` mode fields, each scaled to unit `H^r` norm.
pub fn normalized_test_fields(grid: &TorusGrid, count: usize, r: f64) -> Result<Vec<FourierField>> {
    let basis = ModeBasis::lowest(grid, count)?;
    Ok(basis
        .fields()
        .map(|f| {
            let n = super::sobolev_norm(f, super::SobolevLevel(r));
            f * (1.0 / n)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_orthonormal_and_solenoidal() {
        for g in [TorusGrid::new(2, 16, 2.0 / 3.0).unwrap(), TorusGrid::new(3, 8, 2.0 / 3.0).unwrap()] {
            let b = ModeBasis::lowest(&g, 16).unwrap();
            for i in 0..b.len() {
                assert!(b.field(i).divergence_defect() < 1e-14);
                assert!(b.field(i).reality_defect() < 1e-15);
                for j in 0..b.len() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((b.field(i).inner(b.field(j)) - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn lowest_modes_first() {
        let g = TorusGrid::new(2, 16, 2.0 / 3.0).unwrap();
        let b = ModeBasis::lowest(&g, 4).unwrap();
        assert_eq!(b.mode(0).wavevector, vec![0, 1]);
        assert_eq!(b.mode(2).wavevector, vec![1, 0]);
        assert!(b.mode(1).sine);
    }
}
