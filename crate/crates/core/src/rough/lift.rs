use super::DiscretePath;
use crate::error::{structural, Result};
use crate::time_grid::TimeGrid;

/// Level-2 rough path over a discrete path.
///
/// Stores the areas `𝕏_{t_k,t_{k+1}}` of adjacent intervals and the running
/// signature `𝕏_{t_0,t_k}`; every other pair is reconstructed with Chen's
/// relation `𝕏_{s,t} = 𝕏_{0,t} − 𝕏_{0,s} − X_{0,s} ⊗ X_{s,t}`. Matrices are
/// row-major, entry `(i, j)` being `∫ X^i dX^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Level2Area {
    base: DiscretePath,
    adjacent: Vec<f64>,
    prefix: Vec<f64>,
}

/// Exact lift of the piecewise-linear interpolant:
/// `𝕏_{t_k,t_{k+1}} = ½ X_{t_k,t_{k+1}} ⊗ X_{t_k,t_{k+1}}`.
pub fn lift_piecewise_linear(path: &DiscretePath) -> Level2Area {
    let m = path.dim();
    let mut adjacent = vec![0.0; (path.len().saturating_sub(1)) * m * m];
    let mut inc = vec![0.0; m];
    for k in 0..path.len().saturating_sub(1) {
        path.increment_into(k, k + 1, &mut inc);
        let block = &mut adjacent[k * m * m..(k + 1) * m * m];
        for i in 0..m {
            for j in 0..m {
                block[i * m + j] = 0.5 * inc[i] * inc[j];
            }
        }
    }
    Level2Area::from_adjacent(path.clone(), adjacent).expect("consistent layout")
}

impl Level2Area {
    pub fn from_adjacent(base: DiscretePath, adjacent: Vec<f64>) -> Result<Self> {
        let m = base.dim();
        let n = base.len();
        if adjacent.len() != n.saturating_sub(1) * m * m {
            return Err(structural("adjacent areas do not match the base path"));
        }
        let mut prefix = vec![0.0; n * m * m];
        let mut x0 = vec![0.0; m];
        let mut inc = vec![0.0; m];
        for k in 0..n.saturating_sub(1) {
            base.increment_into(0, k, &mut x0);
            base.increment_into(k, k + 1, &mut inc);
            let (done, rest) = prefix.split_at_mut((k + 1) * m * m);
            let prev = &done[k * m * m..];
            let next = &mut rest[..m * m];
            let a = &adjacent[k * m * m..(k + 1) * m * m];
            for i in 0..m {
                for j in 0..m {
                    next[i * m + j] = prev[i * m + j] + x0[i] * inc[j] + a[i * m + j];
                }
            }
        }
        Ok(Self { base, adjacent, prefix })
    }

    pub fn zero(grid: TimeGrid, dim: usize) -> Self {
        lift_piecewise_linear(&DiscretePath::zeros(grid, dim))
    }

    pub fn base(&self) -> &DiscretePath {
        &self.base
    }

    pub fn grid(&self) -> &TimeGrid {
        self.base.grid()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn adjacent(&self, k: usize) -> &[f64] {
        let mm = self.dim() * self.dim();
        &self.adjacent[k * mm..(k + 1) * mm]
    }

    pub fn adjacent_mut(&mut self, k: usize) -> &mut [f64] {
        let mm = self.dim() * self.dim();
        &mut self.adjacent[k * mm..(k + 1) * mm]
    }

    /// `X_{t_a,t_b}`.
    pub fn increment(&self, a: usize, b: usize) -> Vec<f64> {
        self.base.increment(a, b)
    }

    /// `𝕏_{t_a,t_b}`, `a ≤ b`.
    pub fn area(&self, a: usize, b: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim() * self.dim()];
        self.area_into(a, b, &mut out);
        out
    }

    pub fn area_into(&self, a: usize, b: usize, out: &mut [f64]) {
        let m = self.dim();
        let mm = m * m;
        if b == a + 1 {
            out.copy_from_slice(self.adjacent(a));
            return;
        }
        let pa = &self.prefix[a * mm..(a + 1) * mm];
        let pb = &self.prefix[b * mm..(b + 1) * mm];
        let x0 = self.base.point(0);
        let xa = self.base.point(a);
        let xb = self.base.point(b);
        for i in 0..m {
            let l = xa[i] - x0[i];
            for j in 0..m {
                out[i * m + j] = pb[i * m + j] - pa[i * m + j] - l * (xb[j] - xa[j]);
            }
        }
    }

    /// Chen-consistent restriction to a sub-grid.
    pub fn restrict(&self, coarse: &TimeGrid) -> Result<Level2Area> {
        let idx = self.base.grid_indices(coarse)?;
        let base = self.base.restrict(coarse)?;
        let mm = self.dim() * self.dim();
        let mut adjacent = Vec::with_capacity(idx.len().saturating_sub(1) * mm);
        for w in idx.windows(2) {
            adjacent.extend(self.area(w[0], w[1]));
        }
        Level2Area::from_adjacent(base, adjacent)
    }

    fn magnitude(&self) -> f64 {
        self.adjacent
            .iter()
            .chain(&self.prefix)
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
            .max(1.0)
    }

    /// Chen defect scaled by `max(1, max |stored area|)`.
    ///
    /// Every stored adjacent area is checked against the running signature
    /// (triples `(t_0, t_k, t_{k+1})`). When the grid has at most 64 points all
    /// triples `s ≤ u ≤ t` are checked as well.
    pub fn chen_defect(&self) -> f64 {
        let m = self.dim();
        let mm = m * m;
        let n = self.len();
        let mut worst: f64 = 0.0;
        let mut x0 = vec![0.0; m];
        let mut inc = vec![0.0; m];
        for k in 0..n.saturating_sub(1) {
            self.base.increment_into(0, k, &mut x0);
            self.base.increment_into(k, k + 1, &mut inc);
            let pk = &self.prefix[k * mm..(k + 1) * mm];
            let pn = &self.prefix[(k + 1) * mm..(k + 2) * mm];
            let a = self.adjacent(k);
            for i in 0..m {
                for j in 0..m {
                    let d = pn[i * m + j] - pk[i * m + j] - x0[i] * inc[j] - a[i * m + j];
                    worst = worst.max(d.abs());
                }
            }
        }
        if n <= 64 {
            let mut st = vec![0.0; mm];
            let mut su = vec![0.0; mm];
            let mut ut = vec![0.0; mm];
            for s in 0..n {
                for t in s + 1..n {
                    self.area_into(s, t, &mut st);
                    for u in s + 1..t {
                        self.area_into(s, u, &mut su);
                        self.area_into(u, t, &mut ut);
                        let xsu = self.base.increment(s, u);
                        let xut = self.base.increment(u, t);
                        for i in 0..m {
                            for j in 0..m {
                                let d = st[i * m + j] - su[i * m + j] - ut[i * m + j] - xsu[i] * xut[j];
                                worst = worst.max(d.abs());
                            }
                        }
                    }
                }
            }
        }
        worst / self.magnitude()
    }

    /// `max ‖Sym(𝕏_{s,t}) − ½ X_{s,t} ⊗ X_{s,t}‖` over pairs (all pairs up to
    /// 256 points, otherwise adjacent pairs and pairs from the origin).
    pub fn geometricity_defect(&self) -> f64 {
        let n = self.len();
        let m = self.dim();
        let mut worst: f64 = 0.0;
        let mut area = vec![0.0; m * m];
        let mut check = |a: usize, b: usize, area: &mut Vec<f64>| {
            self.area_into(a, b, area);
            let x = self.base.increment(a, b);
            for i in 0..m {
                for j in 0..m {
                    let sym = 0.5 * (area[i * m + j] + area[j * m + i]);
                    worst = worst.max((sym - 0.5 * x[i] * x[j]).abs());
                }
            }
        };
        if n <= 256 {
            for a in 0..n {
                for b in a + 1..n {
                    check(a, b, &mut area);
                }
            }
        } else {
            for k in 1..n {
                check(k - 1, k, &mut area);
                check(0, k, &mut area);
            }
        }
        worst / self.magnitude()
    }
}

fn frob(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖X − Y‖_{C^α}` over grid pairs (Euclidean norm of increments).
pub fn first_level_holder_gap(a: &Level2Area, b: &Level2Area, alpha: f64) -> Result<f64> {
    a.base.compatible(&b.base)?;
    let t = a.grid().times();
    let n = a.len();
    let m = a.dim();
    let mut worst: f64 = 0.0;
    for s in 0..n {
        for u in s + 1..n {
            let mut acc = 0.0;
            for i in 0..m {
                let d = (a.base.point(u)[i] - a.base.point(s)[i]) - (b.base.point(u)[i] - b.base.point(s)[i]);
                acc += d * d;
            }
            worst = worst.max(acc.sqrt() / (t[u] - t[s]).powf(alpha));
        }
    }
    Ok(worst)
}

/// `‖𝕏 − 𝕐‖_{C^{2α}}` over grid pairs (Frobenius norm).
pub fn second_level_holder_gap(a: &Level2Area, b: &Level2Area, alpha: f64) -> Result<f64> {
    a.base.compatible(&b.base)?;
    let t = a.grid().times();
    let n = a.len();
    let mm = a.dim() * a.dim();
    let mut worst: f64 = 0.0;
    let mut xa = vec![0.0; mm];
    let mut xb = vec![0.0; mm];
    for s in 0..n {
        for u in s + 1..n {
            a.area_into(s, u, &mut xa);
            b.area_into(s, u, &mut xb);
            let d: Vec<f64> = xa.iter().zip(&xb).map(|(p, q)| p - q).collect();
            worst = worst.max(frob(&d) / (t[u] - t[s]).powf(2.0 * alpha));
        }
    }
    Ok(worst)
}

/// Inhomogeneous `α`-Hölder rough path distance
/// `‖X − Y‖_{C^α} + ‖𝕏 − 𝕐‖_{C^{2α}}`.
pub fn rough_distance(a: &Level2Area, b: &Level2Area, alpha: f64) -> Result<f64> {
    Ok(first_level_holder_gap(a, b, alpha)? + second_level_holder_gap(a, b, alpha)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_path_area() {
        let g = TimeGrid::uniform(0.0, 1.0, 8);
        let v = [2.0, -1.0];
        let pts: Vec<Vec<f64>> = g.times().iter().map(|t| vec![t * v[0], t * v[1]]).collect();
        let l = lift_piecewise_linear(&DiscretePath::from_points(g.clone(), &pts).unwrap());
        let (s, t) = (2, 7);
        let dt = g.at(t) - g.at(s);
        let a = l.area(s, t);
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i * 2 + j] - 0.5 * dt * dt * v[i] * v[j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn triangle_levy_area() {
        let g = TimeGrid::uniform(0.0, 1.0, 2);
        let p = DiscretePath::from_points(g, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let a = lift_piecewise_linear(&p).area(0, 2);
        // ½ (X_{01} ∧ X_{12}) = ½ (e1 ⊗ e2 − e2 ⊗ e1)
        assert!(((a[1] - a[2]) / 2.0 - 0.5).abs() < 1e-15);
        assert!(l_chen(&p) < 1e-15);
    }

    fn l_chen(p: &DiscretePath) -> f64 {
        lift_piecewise_linear(p).chen_defect()
    }

    #[test]
    fn corrupted_area_is_detected() {
        let g = TimeGrid::uniform(0.0, 1.0, 10);
        let pts: Vec<Vec<f64>> = g.times().iter().map(|t| vec![0.2 * t.sin(), 0.2 * (3.0 * t).cos()]).collect();
        let mut l = lift_piecewise_linear(&DiscretePath::from_points(g, &pts).unwrap());
        assert!(l.chen_defect() < 1e-14);
        l.adjacent_mut(4)[1] += 1.0;
        let d = l.chen_defect();
        assert!((d - 1.0).abs() < 0.05, "{d}");
    }

    #[test]
    fn restriction_preserves_areas() {
        let g = TimeGrid::uniform(0.0, 1.0, 16);
        let pts: Vec<Vec<f64>> = g.times().iter().map(|t| vec![t.sin(), (3.0 * t).cos(), t * t]).collect();
        let l = lift_piecewise_linear(&DiscretePath::from_points(g.clone(), &pts).unwrap());
        let c = l.restrict(&g.stride(4).unwrap()).unwrap();
        let a = l.area(4, 12);
        let b = c.area(1, 3);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(c.chen_defect() < 1e-14 && c.geometricity_defect() < 1e-14);
    }
}
