//! Quadrature primitives: composite trapezoid sums, a cumulative-trapezoid
//! prefix structure with O(1) interval queries, and an 8-point
//! Gauss–Legendre panel rule.

use crate::error::{Error, Result};
use crate::grid::{Grid, Trajectory};

/// Composite trapezoid over the whole sample: `h·(v_0/2 + v_1 + ... + v_{n-1}/2)`.
pub fn trapezoid(h: f64, values: &[f64]) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, mid @ .., last] => {
            let interior: f64 = mid.iter().sum();
            h * (0.5 * first + interior + 0.5 * last)
        }
    }
}

/// Prefix sums of the composite trapezoid rule over a [`Trajectory`]'s grid,
/// with interval queries `integral(a, b)` resolved in O(1) by splitting the
/// partial end panels against linearly interpolated values.
#[derive(Debug, Clone)]
pub struct CumulativeTrapezoid {
    grid: Grid,
    /// `prefix[i]` = trapezoid integral over `[0, t_i]`; `prefix[0] = 0`.
    prefix: Vec<f64>,
    values: Vec<f64>,
}

impl CumulativeTrapezoid {
    pub fn new(traj: &Trajectory) -> Self {
        let grid = *traj.grid();
        let values = traj.values().to_vec();
        let h = grid.h();
        let mut prefix = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        prefix.push(0.0);
        for w in values.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            prefix.push(acc);
        }
        CumulativeTrapezoid { grid, prefix, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Prefix integral at a node: `∫_0^{t_i}`.
    pub fn at_node(&self, i: usize) -> f64 {
        self.prefix[i]
    }

    /// The prefix integral as a trajectory (the running integral `I`).
    pub fn as_trajectory(&self) -> Trajectory {
        Trajectory::new(self.grid, self.prefix.clone()).expect("prefix matches grid by construction")
    }

    /// Trapezoid value of the integrand at an off-node point (zero for t < 0).
    fn value_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let pos = t / self.grid.h();
        let i = pos.floor() as usize;
        if i + 1 >= self.values.len() {
            return *self.values.last().expect("non-empty");
        }
        let frac = pos - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Prefix integral `∫_0^t` at an arbitrary point, with the partial panel
    /// closed by the interpolated endpoint value. Negative `t` yields 0.
    pub fn prefix_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let slack = self.grid.h() * 1e-6;
        let horizon = self.grid.horizon();
        let t = if t > horizon && t <= horizon + slack { horizon } else { t };
        debug_assert!(t <= horizon + slack, "prefix query past horizon");
        let pos = t / self.grid.h();
        let i = (pos.floor() as usize).min(self.values.len() - 1);
        let t_i = self.grid.t(i);
        let partial = 0.5 * (t - t_i) * (self.values[i] + self.value_at(t));
        self.prefix[i] + partial
    }

    /// Interval integral `∫_a^b` (signed; `a > b` flips sign). The integrand
    /// is treated as 0 for negative arguments, matching [`Trajectory`].
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.prefix_at(b) - self.prefix_at(a)
    }
}

/// 8-point Gauss–Legendre abscissae on `[-1, 1]` (positive half; the rule is
/// symmetric) and their weights. Exact for polynomials of degree <= 15.
const GL8_NODES: [f64; 4] =
    [0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363];
const GL8_WEIGHTS: [f64; 4] =
    [0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];

/// 8-point Gauss–Legendre quadrature of `g` over `[a, b]`.
pub fn gauss8(a: f64, b: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for k in 0..4 {
        let dx = half * GL8_NODES[k];
        sum += GL8_WEIGHTS[k] * (g(mid - dx) + g(mid + dx));
    }
    half * sum
}

/// Composite [`gauss8`] with panel width at most `max_panel`.
pub fn gauss8_composite(a: f64, b: f64, max_panel: f64, mut g: impl FnMut(f64) -> f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!("non-finite quadrature bounds [{a}, {b}]")));
    }
    if b < a {
        return Ok(-gauss8_composite(b, a, max_panel, g)?);
    }
    let panels = ((b - a) / max_panel).ceil().max(1.0);
    if panels > 1e7 {
        return Err(Error::domain(format!(
            "quadrature over [{a}, {b}] needs {panels} panels at width {max_panel}"
        )));
    }
    let n = panels as usize;
    let w = (b - a) / panels;
    let mut sum = 0.0;
    for i in 0..n {
        sum += gauss8(a + i as f64 * w, a + (i + 1) as f64 * w, &mut g);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, Trajectory};

    #[test]
    fn trapezoid_matches_hand_sum() {
        // node values 1, 2, 4 with h = 0.5: 0.5·(0.5 + 2 + 2) = 2.25
        assert!((trapezoid(0.5, &[1.0, 2.0, 4.0]) - 2.25).abs() < 1e-15);
        assert_eq!(trapezoid(0.5, &[3.0]), 0.0);
        assert_eq!(trapezoid(0.5, &[]), 0.0);
    }

    #[test]
    fn cumulative_prefix_and_interval_queries() {
        let g = Grid::new(0.25, 2.0).unwrap();
        let f = Trajectory::from_fn(g, |t| t); // ∫_a^b s ds = (b²-a²)/2, trapezoid is exact
        let c = CumulativeTrapezoid::new(&f);
        assert!((c.at_node(8) - 2.0).abs() < 1e-14);
        assert!((c.prefix_at(1.1) - 0.605).abs() < 1e-14);
        assert!((c.integral(0.3, 1.7) - (1.7f64.powi(2) - 0.3f64.powi(2)) / 2.0).abs() < 1e-14);
        // signed orientation and zero extension
        assert!((c.integral(1.7, 0.3) + c.integral(0.3, 1.7)).abs() < 1e-15);
        assert_eq!(c.integral(-2.0, 0.0), 0.0);
    }

    #[test]
    fn interval_query_agrees_with_direct_sum_on_nodes() {
        let g = Grid::new(0.1, 3.0).unwrap();
        let f = Trajectory::from_fn(g, |t| (1.3 * t).sin() + 0.2 * t * t);
        let c = CumulativeTrapezoid::new(&f);
        let direct: f64 = trapezoid(0.1, &f.values()[5..26]);
        assert!((c.integral(0.5, 2.5) - direct).abs() < 1e-13);
    }

    #[test]
    fn gauss8_is_exact_on_high_degree_polynomials() {
        // ∫_0^2 s^7 ds = 32
        let v = gauss8(0.0, 2.0, |s| s.powi(7));
        assert!((v - 32.0).abs() < 1e-12);
        // degree 15 is still exact: ∫_{-1}^{1} s^15 ds = 0
        let v = gauss8(-1.0, 1.0, |s| s.powi(15));
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn gauss8_composite_converges_on_oscillatory_integrand() {
        // ∫_0^π sin s ds = 2
        let v = gauss8_composite(0.0, std::f64::consts::PI, 0.5, f64::sin).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let flipped = gauss8_composite(std::f64::consts::PI, 0.0, 0.5, f64::sin).unwrap();
        assert!((flipped + 2.0).abs() < 1e-13);
    }
}
