//! Finite signed Borel measures on ℝ₊ represented as atoms plus a density
//! with bounded support, and the convolution primitive
//! `(ν∗x)(t) = ∫_{[0,t]} ν(ds) x(t−s)` that every stepper and residual
//! check is built on.

use crate::error::{Error, Result};
use crate::grid::{Grid, Trajectory};

/// Tolerance (relative to the grid step) for deciding that an atom location
/// or support bound sits exactly on a grid node.
pub(crate) const ALIGN_TOL: f64 = 1e-9;

/// A point mass: weight `w` at location `τ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Closed-form density shapes. Evaluation is exact; only the convolution
/// and total-variation integrals are quadrature.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityShape {
    /// `coefficient · e^{−rate·s}`
    ExpDecay { coefficient: f64, rate: f64 },
    /// `value` on the whole support
    Constant { value: f64 },
    /// `c_0 + c_1 s + c_2 s² + ...`
    Polynomial { coefficients: Vec<f64> },
}

impl DensityShape {
    fn eval(&self, s: f64) -> f64 {
        match self {
            DensityShape::ExpDecay { coefficient, rate } => coefficient * (-rate * s).exp(),
            DensityShape::Constant { value } => *value,
            DensityShape::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * s + c)
            }
        }
    }

    fn params_finite(&self) -> bool {
        match self {
            DensityShape::ExpDecay { coefficient, rate } => {
                coefficient.is_finite() && rate.is_finite()
            }
            DensityShape::Constant { value } => value.is_finite(),
            DensityShape::Polynomial { coefficients } => coefficients.iter().all(|c| c.is_finite()),
        }
    }
}

/// Density component `k(s)` declared on `[0, s_max]`. Infinite-support
/// kernels must be truncated by the caller; the truncation error is then
/// the caller's to account for.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    pub shape: DensityShape,
    pub s_max: f64,
}

impl Density {
    /// Evaluates `k(s)`, rejecting non-finite results with the offending node.
    pub fn eval(&self, s: f64) -> Result<f64> {
        let v = self.shape.eval(s);
        if !v.is_finite() {
            return Err(Error::evaluation(format!("density is non-finite at s = {s}")));
        }
        Ok(v)
    }
}

/// A finite signed measure ν: finitely many atoms plus an optional density.
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    atoms: Vec<Atom>,
    density: Option<Density>,
}

impl Measure {
    pub fn new(atoms: Vec<Atom>, density: Option<Density>) -> Result<Self> {
        for a in &atoms {
            if !a.location.is_finite() || a.location < 0.0 {
                return Err(Error::config(format!(
                    "atom location must be finite and >= 0, got {}",
                    a.location
                )));
            }
            if !a.weight.is_finite() {
                return Err(Error::config("atom weight must be finite"));
            }
        }
        for (i, a) in atoms.iter().enumerate() {
            for b in &atoms[i + 1..] {
                if a.location == b.location {
                    return Err(Error::config(format!(
                        "duplicate atom location {}",
                        a.location
                    )));
                }
            }
        }
        if let Some(d) = &density {
            if !d.s_max.is_finite() || d.s_max <= 0.0 {
                return Err(Error::config(format!(
                    "density support bound must be finite and > 0, got {}",
                    d.s_max
                )));
            }
            if !d.shape.params_finite() {
                return Err(Error::config("density parameters must be finite"));
            }
        }
        Ok(Measure { atoms, density })
    }

    /// The kernel `w·δ₀` (scalar ODE case `x' = w·x + f`).
    pub fn delta0(weight: f64) -> Measure {
        Measure { atoms: vec![Atom { location: 0.0, weight }], density: None }
    }

    /// The zero measure (no dynamics).
    pub fn zero() -> Measure {
        Measure { atoms: Vec::new(), density: None }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    /// The atom weight at location 0 (the implicit-step coefficient).
    pub fn atom_mass_at_zero(&self) -> f64 {
        self.atoms.iter().find(|a| a.location == 0.0).map_or(0.0, |a| a.weight)
    }

    /// Total variation `|ν|(ℝ₊) = Σ|w_j| + ∫₀^{s_max} |k(s)| ds`, the density
    /// part by composite trapezoid at substep ≤ `resolution`.
    pub fn total_variation(&self, resolution: f64) -> Result<f64> {
        if !resolution.is_finite() || resolution <= 0.0 {
            return Err(Error::domain(format!(
                "total-variation resolution must be finite and > 0, got {resolution}"
            )));
        }
        let atom_part: f64 = self.atoms.iter().map(|a| a.weight.abs()).sum();
        let density_part = match &self.density {
            None => 0.0,
            Some(d) => {
                let n = (d.s_max / resolution).ceil().max(1.0) as usize;
                let h = d.s_max / n as f64;
                let mut vals = Vec::with_capacity(n + 1);
                for j in 0..=n {
                    vals.push(d.eval(j as f64 * h)?.abs());
                }
                crate::quad::trapezoid(h, &vals)
            }
        };
        Ok(atom_part + density_part)
    }

    /// `(ν∗x)(t) = Σ_{τ_j ≤ t} w_j·x(t−τ_j) + ∫₀^{min(t, s_max)} k(s)·x(t−s) ds`,
    /// the density part by composite trapezoid on the trajectory's grid.
    pub fn convolve(&self, x: &Trajectory, t: f64) -> Result<f64> {
        let grid = x.grid();
        let slack = grid.h() * ALIGN_TOL;
        if t < -slack || t > grid.horizon() + grid.h() * 1e-6 {
            return Err(Error::domain(format!(
                "convolution time t = {t} outside [0, {}]",
                grid.horizon()
            )));
        }
        let t = t.max(0.0);
        let mut sum = 0.0;
        for a in &self.atoms {
            if a.location <= t + slack {
                sum += a.weight * x.value_at(t - a.location);
            }
        }
        if let Some(d) = &self.density {
            let upper = t.min(d.s_max);
            if upper > 0.0 {
                let h = grid.h();
                let m = (upper / h + ALIGN_TOL).floor() as usize;
                // full panels on the grid
                let mut acc = 0.0;
                let mut prev = d.eval(0.0)? * x.value_at(t);
                for j in 1..=m {
                    let s = j as f64 * h;
                    let cur = d.eval(s)? * x.value_at(t - s);
                    acc += 0.5 * h * (prev + cur);
                    prev = cur;
                }
                // partial panel up to `upper` when it is off-grid
                let s_m = m as f64 * h;
                if upper - s_m > slack {
                    let cur = d.eval(upper)? * x.value_at(t - upper);
                    acc += 0.5 * (upper - s_m) * (prev + cur);
                }
                sum += acc;
            }
        }
        Ok(sum)
    }

    /// Precomputes the per-grid form used by the steppers.
    pub fn prepare(&self, grid: Grid) -> Result<PreparedMeasure> {
        PreparedMeasure::new(self, grid)
    }
}

/// One atom resolved against a grid: `x(t_i − τ) = hi_frac·x[i−k] + lo_frac·x[i−k−1]`.
#[derive(Debug, Clone, Copy)]
struct PreparedAtom {
    weight: f64,
    /// `k = floor(τ/h)`; the atom needs nodes `i−k` and (if `lo_frac > 0`) `i−k−1`.
    shift: usize,
    /// Interpolation weight on `x[i−k]`.
    hi_frac: f64,
    /// Interpolation weight on `x[i−k−1]`; 0 exactly for grid-aligned atoms.
    lo_frac: f64,
}

/// A [`Measure`] resolved against a fixed [`Grid`]: density node values are
/// cached once, atoms are reduced to index shifts plus interpolation
/// weights. Convolution evaluations at a node cost O(min(i, s_max/h)).
#[derive(Debug, Clone)]
pub struct PreparedMeasure {
    grid: Grid,
    atoms: Vec<PreparedAtom>,
    /// `k(j·h)` for `j = 0..=full_panels`; empty when there is no density.
    density_nodes: Vec<f64>,
    /// Partial final panel `(width, k(s_max))` when `s_max` is off-grid.
    density_tail: Option<(f64, f64)>,
}

impl PreparedMeasure {
    fn new(measure: &Measure, grid: Grid) -> Result<Self> {
        let h = grid.h();
        let mut atoms = Vec::with_capacity(measure.atoms.len());
        for a in &measure.atoms {
            let pos = a.location / h;
            let k = (pos + ALIGN_TOL).floor() as usize;
            let frac = pos - k as f64; // in [0, 1); ~0 for aligned atoms
            let (shift, hi_frac, lo_frac) = if frac <= ALIGN_TOL {
                (k, 1.0, 0.0)
            } else {
                (k, 1.0 - frac, frac)
            };
            atoms.push(PreparedAtom { weight: a.weight, shift, hi_frac, lo_frac });
        }

        let mut density_nodes = Vec::new();
        let mut density_tail = None;
        if let Some(d) = &measure.density {
            if d.s_max < h {
                return Err(Error::config(format!(
                    "density support [0, {}] is narrower than the grid step {h}; refine the grid",
                    d.s_max
                )));
            }
            let reach = d.s_max.min(grid.horizon());
            let full = (reach / h + ALIGN_TOL).floor() as usize;
            density_nodes.reserve(full + 1);
            for j in 0..=full {
                density_nodes.push(d.eval(j as f64 * h)?);
            }
            let covered = full as f64 * h;
            if reach - covered > h * ALIGN_TOL {
                density_tail = Some((reach - covered, d.eval(reach)?));
            }
        }
        Ok(PreparedMeasure { grid, atoms, density_nodes, density_tail })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Splits `(ν∗x)(t_i)` into `known + coeff·x[i]` given history
    /// `x[0..i]` (entry `i` itself is not read). This is what makes the
    /// trapezoidal step implicit yet solvable in closed form.
    pub fn convolve_split(&self, x: &[f64], i: usize) -> (f64, f64) {
        let h = self.grid.h();
        let mut known = 0.0;
        let mut coeff = 0.0;

        for a in &self.atoms {
            // atom contributes only when τ ≤ t_i, i.e. i ≥ shift (+1 if off-grid)
            if a.lo_frac == 0.0 {
                if i >= a.shift {
                    if a.shift == 0 {
                        coeff += a.weight;
                    } else {
                        known += a.weight * x[i - a.shift];
                    }
                }
            } else if i >= a.shift + 1 {
                if a.shift == 0 {
                    coeff += a.weight * a.hi_frac;
                    known += a.weight * a.lo_frac * x[i - 1];
                } else {
                    known += a.weight
                        * (a.hi_frac * x[i - a.shift] + a.lo_frac * x[i - a.shift - 1]);
                }
            }
        }

        if !self.density_nodes.is_empty() && i >= 1 {
            let m = (self.density_nodes.len() - 1).min(i);
            // trapezoid Σ'' k_j·x[i−j]·h over j = 0..=m
            let mut acc = 0.5 * self.density_nodes[m] * x[i - m];
            for j in 1..m {
                acc += self.density_nodes[j] * x[i - j];
            }
            acc *= h;
            coeff += 0.5 * h * self.density_nodes[0];
            known += acc;
            // partial panel beyond the last full node (s_max off-grid), only
            // once the support is fully inside [0, t_i]
            if let Some((width, k_end)) = self.density_tail {
                if i > m {
                    let s_end = m as f64 * h + width;
                    let t = self.grid.t(i);
                    let frac = (t - s_end) / h - ((t - s_end) / h).floor();
                    let lo = ((t - s_end) / h).floor() as usize;
                    let x_end = if frac <= ALIGN_TOL {
                        x[lo]
                    } else {
                        x[lo] + frac * (x[lo + 1] - x[lo])
                    };
                    known += 0.5 * width * (self.density_nodes[m] * x[i - m] + k_end * x_end);
                }
            }
        }
        (known, coeff)
    }

    /// Full `(ν∗x)(t_i)` for a completed history (reads `x[i]`).
    pub fn convolve_at_node(&self, x: &[f64], i: usize) -> f64 {
        let (known, coeff) = self.convolve_split(x, i);
        known + coeff * x[i]
    }

    /// Jump of `(ν∗x)` exactly at node `i`: the contribution of atoms whose
    /// location is the node itself (`τ = t_i`, grid-aligned, `i ≥ 1`). The
    /// convolution is right-continuous there — `convolve_split` reports the
    /// limit from above — so a trapezoid panel ending at `t_i` must subtract
    /// this to integrate the left limit, and a cumulative integral through
    /// the node wants the average of the two limits. Without the correction
    /// every grid-aligned delay atom costs O(h) accuracy at its activation.
    pub fn activation_jump(&self, x: &[f64], i: usize) -> f64 {
        let mut jump = 0.0;
        for a in &self.atoms {
            if a.lo_frac == 0.0 && a.shift == i && i >= 1 {
                jump += a.weight * x[0];
            }
        }
        jump
    }
}
