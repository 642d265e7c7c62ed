use serde::{Deserialize, Serialize};

use crate::error::{domain, structural, Result};

/// Strictly increasing set of sample times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(structural("time grid must contain at least one point"));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(domain("time grid contains non-finite values"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("time grid must be strictly increasing"));
        }
        Ok(Self { times })
    }

    /// `intervals + 1` equispaced points on `[start, end]`.
    pub fn uniform(start: f64, end: f64, intervals: usize) -> Self {
        assert!(intervals > 0 && end > start, "uniform grid needs end > start and at least one interval");
        let h = (end - start) / intervals as f64;
        let mut times: Vec<f64> = (0..=intervals).map(|k| start + k as f64 * h).collect();
        times[intervals] = end;
        Self { times }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn at(&self, k: usize) -> f64 {
        self.times[k]
    }

    /// Common step if the grid is uniform to relative precision 1e-9.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let h = (self.end() - self.start()) / self.intervals() as f64;
        let uniform = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.max(1e-300));
        uniform.then_some(h)
    }

    pub fn require_uniform(&self) -> Result<f64> {
        self.uniform_step()
            .ok_or_else(|| domain("operation requires a uniform time grid"))
    }

    /// Every `stride`-th point; `stride` must divide the number of intervals.
    pub fn stride(&self, stride: usize) -> Result<TimeGrid> {
        if stride == 0 || self.intervals() % stride != 0 {
            return Err(structural(format!(
                "stride {stride} does not divide {} intervals",
                self.intervals()
            )));
        }
        Ok(Self {
            times: self.times.iter().step_by(stride).copied().collect(),
        })
    }

    /// Index of the grid point equal to `t` up to `1e-9` relative tolerance.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let scale = self.end().abs().max(self.start().abs()).max(1.0);
        let k = self.times.partition_point(|&s| s < t - 1e-9 * scale);
        (k < self.times.len() && (self.times[k] - t).abs() <= 1e-9 * scale).then_some(k)
    }

    pub fn same_as(&self, other: &TimeGrid) -> bool {
        self.times.len() == other.times.len()
            && self
                .times
                .iter()
                .zip(&other.times)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }
}

/// Index of the `(i, j)` entry, `i <= j`, of a packed upper-triangular table on `n` points.
#[inline]
pub(crate) fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * n - i * (i + 1) / 2 + j
}

#[inline]
pub(crate) fn tri_len(n: usize) -> usize {
    n * (n + 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_increasing() {
        assert!(TimeGrid::new(vec![0.0, 0.5, 0.5]).is_err());
        assert!(TimeGrid::new(vec![]).is_err());
    }

    #[test]
    fn stride_and_lookup() {
        let g = TimeGrid::uniform(0.0, 1.0, 8);
        assert_eq!(g.uniform_step(), Some(0.125));
        let c = g.stride(4).unwrap();
        assert_eq!(c.times(), &[0.0, 0.5, 1.0]);
        assert!(g.stride(3).is_err());
        assert_eq!(g.index_of(0.375), Some(3));
        assert_eq!(g.index_of(0.3), None);
    }

    #[test]
    fn packed_triangle_is_dense() {
        let n = 5;
        let mut seen = vec![false; tri_len(n)];
        for i in 0..n {
            for j in i..n {
                seen[tri_index(n, i, j)] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }
}
