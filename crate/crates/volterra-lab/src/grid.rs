//! Uniform time grids and sampled trajectories.
//!
//! Everything downstream (quadrature, steppers, diagnostics) works on the
//! same node layout: `t_i = i·h` for `i = 0..n_points`.

use crate::error::{Error, Result};

/// Guard against `floor(T/h)` landing one node short when `T/h` is an
/// integer that floating-point division rounds just below itself.
const NODE_COUNT_GUARD: f64 = 1e-9;

/// Hard cap on node count so a typo'd config fails instead of exhausting
/// memory.
const MAX_NODES: usize = 50_000_000;

/// Uniform grid on `[0, horizon]` with step `h` and nodes `t_i = i·h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    h: f64,
    n_points: usize,
}

impl Grid {
    /// Builds the grid covering `[0, t_end]`: `n_points = floor(t_end/h) + 1`.
    pub fn new(h: f64, t_end: f64) -> Result<Self> {
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::config(format!("grid step must be finite and > 0, got {h}")));
        }
        if !t_end.is_finite() || t_end < h {
            return Err(Error::config(format!(
                "grid horizon must be finite and >= h = {h}, got {t_end}"
            )));
        }
        let n = (t_end / h + NODE_COUNT_GUARD).floor() as usize + 1;
        if n > MAX_NODES {
            return Err(Error::config(format!(
                "grid would hold {n} nodes (step {h}, horizon {t_end}); cap is {MAX_NODES}"
            )));
        }
        Ok(Grid { h, n_points: n })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Node position `t_i = i·h`.
    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Last node position. For `t_end` a multiple of `h` this equals `t_end`.
    pub fn horizon(&self) -> f64 {
        self.t(self.n_points - 1)
    }

    /// Nodes as an iterator of positions.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.t(i))
    }

    /// Largest node index with `t_i <= t` (within rounding slack).
    pub fn index_at_or_below(&self, t: f64) -> usize {
        let raw = (t / self.h + NODE_COUNT_GUARD).floor();
        (raw.max(0.0) as usize).min(self.n_points - 1)
    }

    /// Grid with the same step truncated to `t_end` (used for reports on
    /// `[0, T - theta]`).
    pub fn truncated(&self, t_end: f64) -> Result<Grid> {
        Grid::new(self.h, t_end)
    }
}

/// A function sampled on a [`Grid`], evaluated off-node by linear
/// interpolation and extended by zero for `t < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: Grid,
    values: Vec<f64>,
}

impl Trajectory {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::config(format!(
                "trajectory holds {} values but its grid has {} nodes",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(Trajectory { grid, values })
    }

    /// Samples `g` at every node.
    pub fn from_fn(grid: Grid, mut g: impl FnMut(f64) -> f64) -> Self {
        let values = grid.nodes().map(&mut g).collect();
        Trajectory { grid, values }
    }

    pub fn zero(grid: Grid) -> Self {
        Trajectory { grid, values: vec![0.0; grid.n_points()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Evaluation: 0 for `t < 0`, linear interpolation on `[0, horizon]`.
    /// Arguments within rounding slack beyond the horizon clamp to the last
    /// node; use [`Trajectory::try_value_at`] where overrun must be an error.
    pub fn value_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let pos = t / self.grid.h;
        let i = pos.floor() as usize;
        if i + 1 >= self.values.len() {
            return *self.values.last().expect("grid has at least one node");
        }
        let frac = pos - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Like [`Trajectory::value_at`] but a domain error past the horizon.
    pub fn try_value_at(&self, t: f64) -> Result<f64> {
        let slack = self.grid.h * 1e-6;
        if t > self.grid.horizon() + slack {
            return Err(Error::domain(format!(
                "evaluation at t = {t} past trajectory horizon {}",
                self.grid.horizon()
            )));
        }
        Ok(self.value_at(t))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup-norm of the difference; grids must match exactly.
    pub fn sup_diff(&self, other: &Trajectory) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::config("grid mismatch between trajectories"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Node-wise combination `a·self + b·other`; grids must match exactly.
    pub fn axpy(&self, a: f64, other: &Trajectory, b: f64) -> Result<Trajectory> {
        if self.grid != other.grid {
            return Err(Error::config("grid mismatch between trajectories"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Trajectory { grid: self.grid, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_count_handles_inexact_division() {
        // 20/1e-3 rounds below 20000 in f64; the guard must absorb that.
        let g = Grid::new(1e-3, 20.0).unwrap();
        assert_eq!(g.n_points(), 20_001);
        assert!((g.horizon() - 20.0).abs() < 1e-9);

        let g = Grid::new(1e-4, 12.0).unwrap();
        assert_eq!(g.n_points(), 120_001);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid::new(0.0, 1.0).is_err());
        assert!(Grid::new(-0.1, 1.0).is_err());
        assert!(Grid::new(0.5, 0.25).is_err());
        assert!(Grid::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn interpolation_and_zero_extension() {
        let g = Grid::new(0.5, 2.0).unwrap();
        let x = Trajectory::new(g, vec![0.0, 1.0, 4.0, 9.0, 16.0]).unwrap();
        assert_eq!(x.value_at(-0.3), 0.0);
        assert_eq!(x.value_at(0.5), 1.0);
        // halfway between t=0.5 and t=1.0
        assert!((x.value_at(0.75) - 2.5).abs() < 1e-12);
        assert_eq!(x.value_at(2.0), 16.0);
        assert!(x.try_value_at(2.1).is_err());
        // rounding slack clamps to the last node
        assert_eq!(x.value_at(2.0 + 1e-9), 16.0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let g = Grid::new(0.5, 2.0).unwrap();
        assert!(Trajectory::new(g, vec![0.0; 3]).is_err());
    }
}
