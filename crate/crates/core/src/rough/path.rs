use serde::{Deserialize, Serialize};

use crate::error::{structural, Result};
use crate::time_grid::TimeGrid;

/// Path with values in `ℝ^m` sampled on a time grid, stored point-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretePath {
    grid: TimeGrid,
    dim: usize,
    data: Vec<f64>,
}

impl DiscretePath {
    pub fn new(grid: TimeGrid, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * grid.len() {
            return Err(structural(format!(
                "path data has {} entries, expected {} points x {dim} components",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, dim, data })
    }

    pub fn zeros(grid: TimeGrid, dim: usize) -> Self {
        let data = vec![0.0; dim * grid.len()];
        Self { grid, dim, data }
    }

    pub fn from_points(grid: TimeGrid, points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(structural("ragged path points"));
        }
        Self::new(grid, dim, points.concat())
    }

    /// From component-major rows `rows[i][k]`.
    pub fn from_components(grid: TimeGrid, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let n = grid.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(structural("component rows do not match the grid"));
        }
        let mut data = Vec::with_capacity(dim * n);
        for k in 0..n {
            data.extend(rows.iter().map(|r| r[k]));
        }
        Self::new(grid, dim, data)
    }

    /// Scalar path.
    pub fn scalar(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, 1, values)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn component(&self, i: usize) -> Vec<f64> {
        (0..self.len()).map(|k| self.data[k * self.dim + i]).collect()
    }

    /// `Z_{t_a, t_b}`.
    pub fn increment(&self, a: usize, b: usize) -> Vec<f64> {
        self.point(b).iter().zip(self.point(a)).map(|(x, y)| x - y).collect()
    }

    pub fn increment_into(&self, a: usize, b: usize, out: &mut [f64]) {
        for ((o, x), y) in out.iter_mut().zip(self.point(b)).zip(self.point(a)) {
            *o = x - y;
        }
    }

    /// Values at the points of `coarse`, which must be a subset of this grid.
    pub fn restrict(&self, coarse: &TimeGrid) -> Result<DiscretePath> {
        let idx = self.grid_indices(coarse)?;
        let mut data = Vec::with_capacity(idx.len() * self.dim);
        for &k in &idx {
            data.extend_from_slice(self.point(k));
        }
        Self::new(coarse.clone(), self.dim, data)
    }

    pub(crate) fn grid_indices(&self, coarse: &TimeGrid) -> Result<Vec<usize>> {
        coarse
            .times()
            .iter()
            .map(|&t| {
                self.grid
                    .index_of(t)
                    .ok_or_else(|| structural(format!("time {t} is not a point of the fine grid")))
            })
            .collect()
    }

    /// Path shifted so that it starts at the origin.
    pub fn anchored(&self) -> DiscretePath {
        let mut out = self.clone();
        let base = self.point(0).to_vec();
        for k in 0..self.len() {
            for i in 0..self.dim {
                out.data[k * self.dim + i] -= base[i];
            }
        }
        out
    }

    /// Componentwise multiplication by `scale`.
    pub fn scaled(&self, scale: &[f64]) -> Result<DiscretePath> {
        if scale.len() != self.dim {
            return Err(structural("scale vector length differs from path dimension"));
        }
        let mut out = self.clone();
        for chunk in out.data.chunks_mut(self.dim) {
            for (x, s) in chunk.iter_mut().zip(scale) {
                *x *= s;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiscretePath) -> Result<DiscretePath> {
        self.compatible(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self::new(self.grid.clone(), self.dim, data)
    }

    pub fn compatible(&self, other: &DiscretePath) -> Result<()> {
        if self.dim != other.dim || !self.grid.same_as(&other.grid) {
            return Err(structural("paths live on different grids or dimensions"));
        }
        Ok(())
    }

    /// `max_k |Z_{t_k}|` in the Euclidean norm.
    pub fn sup_norm(&self) -> f64 {
        self.data
            .chunks(self.dim)
            .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}
