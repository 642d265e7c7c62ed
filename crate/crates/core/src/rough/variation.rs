use serde::{Deserialize, Serialize};

use super::DiscretePath;
use crate::error::{domain, structural, Result};
use crate::spectral::{sobolev_norm, FourierField, SobolevLevel};
use crate::time_grid::{tri_index, tri_len, TimeGrid};

/// What the stored values of a [`TwoParamProcess`] measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormTag {
    /// Signed scalar increments.
    Scalar,
    /// Euclidean norms of vector increments.
    Euclidean,
    /// Sobolev norms of field-valued increments.
    Sobolev(SobolevLevel),
}

/// Two-parameter quantity `A_{s,t}` on grid pairs `s ≤ t`, stored as a packed
/// upper triangle (diagonal included). Field- and vector-valued processes
/// are stored through the norms of their increments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoParamProcess {
    grid: TimeGrid,
    tag: NormTag,
    values: Vec<f64>,
}

impl TwoParamProcess {
    pub fn from_fn(grid: &TimeGrid, tag: NormTag, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let n = grid.len();
        let mut values = vec![0.0; tri_len(n)];
        for i in 0..n {
            for j in i + 1..n {
                values[tri_index(n, i, j)] = f(i, j);
            }
        }
        Self { grid: grid.clone(), tag, values }
    }

    /// `A_{s,t} = y_t − y_s` for a scalar path.
    pub fn from_scalar_path(grid: &TimeGrid, y: &[f64]) -> Result<Self> {
        if y.len() != grid.len() {
            return Err(structural("scalar path does not match the grid"));
        }
        Ok(Self::from_fn(grid, NormTag::Scalar, |i, j| y[j] - y[i]))
    }

    /// `|Z_{s,t}|` for a vector path.
    pub fn from_path(path: &DiscretePath) -> Self {
        Self::from_fn(path.grid(), NormTag::Euclidean, |i, j| {
            path.increment(i, j).iter().map(|x| x * x).sum::<f64>().sqrt()
        })
    }

    /// `‖u_t − u_s‖_{H^r}` for a field trajectory.
    pub fn from_fields(grid: &TimeGrid, fields: &[FourierField], level: SobolevLevel) -> Result<Self> {
        if fields.len() != grid.len() {
            return Err(structural("trajectory length does not match the grid"));
        }
        Ok(Self::from_fn(grid, NormTag::Sobolev(level), |i, j| {
            sobolev_norm(&(&fields[j] - &fields[i]), level)
        }))
    }

    /// `‖A_{s,t}‖_{H^r}` for an explicit field-valued two-parameter process.
    pub fn from_field_fn(
        grid: &TimeGrid,
        level: SobolevLevel,
        mut f: impl FnMut(usize, usize) -> FourierField,
    ) -> Self {
        Self::from_fn(grid, NormTag::Sobolev(level), |i, j| sobolev_norm(&f(i, j), level))
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn tag(&self) -> NormTag {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[tri_index(self.len(), i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let n = self.len();
        self.values[tri_index(n, i, j)] = v;
    }

    /// Magnitude `‖A_{s,t}‖`.
    pub fn norm(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).abs()
    }

    /// Largest `‖A_{t,t}‖` (zero for well-formed processes).
    pub fn diagonal_defect(&self) -> f64 {
        (0..self.len()).map(|i| self.norm(i, i)).fold(0.0, f64::max)
    }

    /// Restriction to the index window `[a, b]`.
    pub fn window(&self, a: usize, b: usize) -> Result<TwoParamProcess> {
        if a > b || b >= self.len() {
            return Err(domain("window out of range"));
        }
        let grid = TimeGrid::new(self.grid.times()[a..=b].to_vec())?;
        Ok(Self::from_fn(&grid, self.tag, |i, j| self.get(a + i, a + j)))
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// `(max_P Σ_{[u,v]∈P} ‖A_{u,v}‖^p)^{1/p}` over partitions of the grid, by
/// dynamic programming over grid indices.
pub fn p_variation(a: &TwoParamProcess, p: f64) -> Result<f64> {
    Ok(p_variation_power(a, p)?.powf(1.0 / p))
}

/// `max_P Σ ‖A_{u,v}‖^p` (the `p`-th power of [`p_variation`]).
pub fn p_variation_power(a: &TwoParamProcess, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(domain(format!("variation exponent must be at least 1, got {p}")));
    }
    Ok(partition_power_sum(a, p))
}

/// `(max_P Σ ‖A_{u,v}‖^p)^{1/p}` for any `p > 0`.
///
/// Below `p = 1` this is no longer a variation norm of a path, but it is the
/// natural size of a two-parameter remainder of order `1/p > 1`.
pub fn partition_variation(a: &TwoParamProcess, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(domain(format!("variation exponent must be positive, got {p}")));
    }
    Ok(partition_power_sum(a, p).powf(1.0 / p))
}

fn partition_power_sum(a: &TwoParamProcess, p: f64) -> f64 {
    let n = a.len();
    let mut best = vec![0.0f64; n];
    for j in 1..n {
        let mut b = f64::NEG_INFINITY;
        for i in 0..j {
            b = b.max(best[i] + a.norm(i, j).powf(p));
        }
        best[j] = b;
    }
    best[n - 1]
}

/// `max ‖A_{s,t}‖ / |t − s|^α` over grid pairs.
pub fn holder_norm(a: &TwoParamProcess, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!("Hölder exponent must lie in (0, 1], got {alpha}")));
    }
    let t = a.grid.times();
    let n = a.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max(a.norm(i, j) / (t[j] - t[i]).powf(alpha));
        }
    }
    Ok(worst)
}

/// Nonnegative superadditive function on grid pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlFn {
    grid: TimeGrid,
    table: Vec<f64>,
}

impl ControlFn {
    pub fn from_fn(grid: &TimeGrid, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = grid.len();
        let mut table = vec![0.0; tri_len(n)];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                if !(v >= 0.0) {
                    return Err(domain(format!("control must be non-negative, got {v} at ({i}, {j})")));
                }
                table[tri_index(n, i, j)] = v;
            }
        }
        Ok(Self { grid: grid.clone(), table })
    }

    /// `ω(s,t) = K |t − s|`.
    pub fn linear(grid: &TimeGrid, k: f64) -> Result<Self> {
        let t = grid.times().to_vec();
        Self::from_fn(grid, |i, j| k * (t[j] - t[i]))
    }

    /// `ω(s,t) = ∫_s^t ρ(r) dr` for a non-negative density sampled on the grid
    /// (trapezoid rule).
    pub fn from_density(grid: &TimeGrid, density: &[f64]) -> Result<Self> {
        if density.len() != grid.len() {
            return Err(structural("density does not match the grid"));
        }
        let t = grid.times();
        let mut cum = vec![0.0; t.len()];
        for k in 1..t.len() {
            cum[k] = cum[k - 1] + 0.5 * (t[k] - t[k - 1]) * (density[k] + density[k - 1]);
        }
        Self::from_fn(grid, |i, j| cum[j] - cum[i])
    }

    /// `ω(s,t) = ‖A‖^p_{p-var,[s,t]}`.
    pub fn from_variation(a: &TwoParamProcess, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(domain("variation exponent must be at least 1"));
        }
        let n = a.len();
        let mut table = vec![0.0; tri_len(n)];
        for s in 0..n {
            let mut best = vec![0.0f64; n];
            for j in s + 1..n {
                let mut b = f64::NEG_INFINITY;
                for i in s..j {
                    b = b.max(best[i] + a.norm(i, j).powf(p));
                }
                best[j] = b;
                table[tri_index(n, s, j)] = b;
            }
        }
        Ok(Self { grid: a.grid().clone(), table })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.table[tri_index(self.len(), i, j)]
    }

    /// `ω^x`; superadditive again for `x ≥ 1`.
    pub fn powered(&self, x: f64) -> ControlFn {
        Self { grid: self.grid.clone(), table: self.table.iter().map(|v| v.powf(x)).collect() }
    }

    pub fn sum(&self, other: &ControlFn) -> Result<ControlFn> {
        if !self.grid.same_as(&other.grid) {
            return Err(structural("controls live on different grids"));
        }
        Ok(Self { grid: self.grid.clone(), table: self.table.iter().zip(&other.table).map(|(a, b)| a + b).collect() })
    }

    /// Largest `ω(s,u) + ω(u,t) − ω(s,t)` over grid triples, relative to the
    /// largest value.
    pub fn superadditivity_defect(&self) -> f64 {
        let n = self.len();
        let scale = self.table.iter().fold(0.0f64, |a, &b| a.max(b)).max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for s in 0..n {
            for t in s + 1..n {
                let st = self.get(s, t);
                for u in s..=t {
                    worst = worst.max(self.get(s, u) + self.get(u, t) - st);
                }
            }
        }
        worst / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(vals: &[f64]) -> TwoParamProcess {
        let g = TimeGrid::uniform(0.0, 1.0, vals.len() - 1);
        TwoParamProcess::from_scalar_path(&g, vals).unwrap()
    }

    #[test]
    fn hand_computed_variations() {
        assert!((p_variation(&scalar(&[0.0, 0.3, 0.7, 1.0]), 1.7).unwrap() - 1.0).abs() < 1e-15);
        assert!((p_variation(&scalar(&[0.0, 1.0, 0.0]), 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(p_variation(&scalar(&[0.0, 1.0]), 0.5).is_err());
    }

    #[test]
    fn holder_of_linear_path() {
        let g = TimeGrid::uniform(0.0, 2.0, 10);
        let y: Vec<f64> = g.times().iter().map(|t| -3.0 * t).collect();
        let a = TwoParamProcess::from_scalar_path(&g, &y).unwrap();
        assert!((holder_norm(&a, 1.0).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn controls_are_superadditive() {
        let g = TimeGrid::uniform(0.0, 1.0, 12);
        assert!(ControlFn::linear(&g, 2.5).unwrap().powered(2.0).superadditivity_defect() <= 1e-15);
        let a = scalar(&[0.0, 1.0, -0.5, 0.2, 0.9, 0.1]);
        assert!(ControlFn::from_variation(&a, 2.0).unwrap().superadditivity_defect() <= 1e-15);
    }
}
