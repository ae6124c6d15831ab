//! Three independent routes to the forced solution of
//! `x'(t) = (ν∗x)(t) + f(t), x(0) = ξ`:
//! direct trapezoidal stepping, the variation-of-constants formula
//! `x = r·ξ + (r∗f)`, and the integration-by-parts reconstruction
//! `x = r·ξ + (r∗f1) + f3 + (r'∗f3)` — plus the integrated-equation
//! residual `x(t+θ) − x(t) − ∫_t^{t+θ}(ν∗x)` that must reproduce the
//! forcing's interval average.
//!
//! Wherever the forcing enters a quadrature it does so through exact panel
//! integrals `W_i = ∫_{t_i}^{t_{i+1}} f` rather than node samples; for
//! smooth forcings the two agree to O(h³) per panel, and for unresolved
//! oscillation only the windows remain meaningful.

use crate::error::{Error, Result};
use crate::forcing::{Decomposition, ForcingFunction};
use crate::grid::{Grid, Trajectory};
use crate::measure::{Measure, ALIGN_TOL};
use crate::resolvent::ResolventResult;
use crate::quad::CumulativeTrapezoid;

/// A full problem statement: kernel, forcing, initial value, mesh.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub measure: Measure,
    pub forcing: ForcingFunction,
    pub xi: f64,
    pub grid: Grid,
}

impl SolveConfig {
    pub fn new(measure: Measure, forcing: ForcingFunction, xi: f64, grid: Grid) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::config(format!("initial value must be finite, got {xi}")));
        }
        if grid.horizon() < 2.0 {
            return Err(Error::config(format!(
                "solver grids need a horizon of at least 2 (the decomposition window), got {}",
                grid.horizon()
            )));
        }
        Ok(SolveConfig { measure, forcing, xi, grid })
    }
}

/// The three solution routes with their pairwise sup-norm agreements.
#[derive(Debug, Clone)]
pub struct SolutionBundle {
    pub x_direct: Trajectory,
    pub x_voc: Trajectory,
    pub x_key2: Trajectory,
    pub agreement_direct_voc: f64,
    pub agreement_voc_key2: f64,
}

/// Trapezoidal stepping of the forced equation; the forcing contributes its
/// exact panel integral each step and the implicit kernel term is solved in
/// closed form exactly as in the resolvent stepper.
pub fn solve_direct(cfg: &SolveConfig) -> Result<Trajectory> {
    let grid = cfg.grid;
    let prepared = cfg.measure.prepare(grid)?;
    let h = grid.h();
    let n = grid.n_points();
    let w = cfg.forcing.panel_integrals(grid)?;

    let mut x = vec![0.0; n];
    let mut conv = vec![0.0; n];
    x[0] = cfg.xi;
    let (known0, coeff0) = prepared.convolve_split(&x, 0);
    conv[0] = known0 + coeff0 * x[0];

    for i in 0..n - 1 {
        let (known, coeff) = prepared.convolve_split(&x, i + 1);
        let denom = 1.0 - 0.5 * h * coeff;
        if denom.abs() < 1e-12 {
            return Err(Error::config(format!(
                "trapezoidal step is degenerate: 1 − (h/2)·ν(near 0) = {denom:.3e} at h = {h}; \
                 choose a smaller step"
            )));
        }
        // left limit at the panel's right endpoint: a delay atom activating
        // exactly at t_{i+1} contributes only from t_{i+1} onwards
        let known_left = known - prepared.activation_jump(&x, i + 1);
        let next = (x[i] + 0.5 * h * (conv[i] + known_left) + w[i]) / denom;
        x[i + 1] = next;
        conv[i + 1] = known + coeff * next;
        if !next.is_finite() {
            return Err(Error::evaluation(format!(
                "solution became non-finite at t = {}",
                grid.t(i + 1)
            )));
        }
    }
    Trajectory::new(grid, x)
}

/// The forced part `(r∗f)(t_i)` of the variation-of-constants formula,
/// by product quadrature: each forcing panel carries its exact integral
/// `W_j` against the average of r at the panel's image endpoints,
/// `Σ_j W_j·(r(t_{i−j}) + r(t_{i−j−1}))/2`.
pub fn forced_response_voc(
    forcing: &ForcingFunction,
    res: &ResolventResult,
) -> Result<Trajectory> {
    let grid = *res.r.grid();
    let n = grid.n_points();
    let w = forcing.panel_integrals(grid)?;
    let r = res.r.values();

    // s1[i] = Σ_{j<i} w_j·r_{i−j}; the companion sum with r shifted one
    // node down is s1[i−1] + w_{i−1}·r_0, so one O(n²) pass suffices.
    let mut out = vec![0.0; n];
    let mut s_prev = 0.0;
    for i in 1..n {
        let mut s1 = 0.0;
        for (j, wj) in w[..i].iter().enumerate() {
            s1 += wj * r[i - j];
        }
        out[i] = 0.5 * (s1 + s_prev + w[i - 1] * r[0]);
        s_prev = s1;
    }
    Trajectory::new(grid, out)
}

/// `x(t) = r(t)·ξ + (r∗f)(t)`.
pub fn solve_voc(cfg: &SolveConfig, res: &ResolventResult) -> Result<Trajectory> {
    check_same_grid(&cfg.grid, res.r.grid(), "variation-of-constants")?;
    let forced = forced_response_voc(&cfg.forcing, res)?;
    res.r.axpy(cfg.xi, &forced, 1.0)
}

/// The ξ-independent part of the reconstruction:
/// `(r∗f1)(t) + f3(t) + (r'∗f3)(t)`, convolutions by composite trapezoid.
///
/// `r'` inherits a jump of `w·r(0)` at every delay-atom location τ > 0; the
/// stored derivative keeps the right limit there, so trapezoid panels on the
/// *left* side of each activation would overcount by half a step times the
/// jump. The per-atom corrections below restore the one-sided panel rule —
/// without them `r'∗f3` loses an order of accuracy at every delayed atom.
pub fn forced_response_key2(
    dec: &Decomposition,
    res: &ResolventResult,
    measure: &Measure,
) -> Result<Trajectory> {
    check_same_grid(res.r.grid(), dec.f1.grid(), "reconstruction")?;
    let grid = *res.r.grid();
    let h = grid.h();
    let n = grid.n_points();
    let f3 = dec.f3.values();
    let r_conv_f1 = conv_trapezoid(h, res.r.values(), dec.f1.values());
    let mut rp_conv_f3 = conv_trapezoid(h, res.r_prime.values(), f3);
    let r0 = res.r.values()[0];
    for a in measure.atoms() {
        if a.location <= 0.0 {
            continue; // the atom at zero leaves r' continuous on (0, T]
        }
        let jump = a.weight * r0;
        let pos = a.location / h;
        let k = (pos + ALIGN_TOL).floor() as usize;
        let frac = pos - k as f64;
        if frac <= ALIGN_TOL {
            // jump at node k: the panel [s_{k−1}, s_k] lies left of it and
            // must evaluate the left limit r'(τ) − jump at its right end
            for i in k..n {
                rp_conv_f3[i] -= 0.5 * h * jump * f3[i - k];
            }
        } else {
            // jump interior to panel [s_k, s_{k+1}] at fraction frac: the
            // trapezoid charges half the step to the panel instead of its
            // (1 − frac)-share
            for i in (k + 1)..n {
                rp_conv_f3[i] += h * jump * (0.5 - frac) * f3[i - k - 1];
            }
        }
    }
    let mut values = r_conv_f1;
    for (i, v) in values.iter_mut().enumerate() {
        *v += f3[i] + rp_conv_f3[i];
    }
    Trajectory::new(grid, values)
}

/// `x(t) = r(t)·ξ + (r∗f1)(t) + f3(t) + (r'∗f3)(t)`.
pub fn reconstruct_key2(
    dec: &Decomposition,
    res: &ResolventResult,
    cfg: &SolveConfig,
) -> Result<Trajectory> {
    check_same_grid(&cfg.grid, res.r.grid(), "reconstruction")?;
    let forced = forced_response_key2(dec, res, &cfg.measure)?;
    res.r.axpy(cfg.xi, &forced, 1.0)
}

/// `t_i ↦ x(t_i+θ) − x(t_i) − ∫_{t_i}^{t_i+θ} (ν∗x)(s) ds` on the grid
/// truncated to `[0, T−θ]`. Integrating the equation over `[t, t+θ]` says
/// this must equal the forcing's interval average `F(t;θ)`.
pub fn integrated_residual(
    x: &Trajectory,
    cfg: &SolveConfig,
    theta: f64,
) -> Result<Trajectory> {
    let mut swept = integrated_residual_sweep(x, cfg, &[theta])?;
    Ok(swept.pop().expect("one theta in, one trajectory out").1)
}

/// [`integrated_residual`] over several window lengths, sharing the one
/// expensive `(ν∗x)` pass across all of them.
pub fn integrated_residual_sweep(
    x: &Trajectory,
    cfg: &SolveConfig,
    thetas: &[f64],
) -> Result<Vec<(f64, Trajectory)>> {
    for &theta in thetas {
        if !(theta.is_finite() && 0.0 < theta && theta <= 1.0) {
            return Err(Error::domain(format!(
                "window length theta must lie in (0, 1], got {theta}"
            )));
        }
    }
    check_same_grid(&cfg.grid, x.grid(), "integrated residual")?;
    let grid = cfg.grid;
    let prepared = cfg.measure.prepare(grid)?;
    // At a node where a delay atom activates, (ν∗x) jumps; averaging its two
    // one-sided limits makes the composite trapezoid below equal the sum of
    // the one-sided panel rules.
    let conv_vals: Vec<f64> = (0..grid.n_points())
        .map(|i| {
            prepared.convolve_at_node(x.values(), i)
                - 0.5 * prepared.activation_jump(x.values(), i)
        })
        .collect();
    let conv_traj = Trajectory::new(grid, conv_vals)?;
    let conv_cum = CumulativeTrapezoid::new(&conv_traj);

    let mut out = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let out_grid = grid.truncated(grid.horizon() - theta)?;
        let mut values = Vec::with_capacity(out_grid.n_points());
        for t in out_grid.nodes() {
            values.push(x.value_at(t + theta) - x.value_at(t) - conv_cum.integral(t, t + theta));
        }
        out.push((theta, Trajectory::new(out_grid, values)?));
    }
    Ok(out)
}

/// All three routes plus their agreements, sharing one resolvent and one
/// decomposition.
pub fn solve_bundle(
    cfg: &SolveConfig,
    res: &ResolventResult,
    dec: &Decomposition,
) -> Result<SolutionBundle> {
    let x_direct = solve_direct(cfg)?;
    let x_voc = solve_voc(cfg, res)?;
    let x_key2 = reconstruct_key2(dec, res, cfg)?;
    let agreement_direct_voc = x_direct.sup_diff(&x_voc)?;
    let agreement_voc_key2 = x_voc.sup_diff(&x_key2)?;
    Ok(SolutionBundle { x_direct, x_voc, x_key2, agreement_direct_voc, agreement_voc_key2 })
}

fn check_same_grid(a: &Grid, b: &Grid, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::config(format!(
            "{what}: grid mismatch (h = {} / {}, n = {} / {})",
            a.h(),
            b.h(),
            a.n_points(),
            b.n_points()
        )));
    }
    Ok(())
}

/// `c[i] = h·Σ'' a_j·b_{i−j}` over `j = 0..=i` with trapezoid half-weights
/// at both ends — the composite trapezoid value of `∫_0^{t_i} a(s)b(t_i−s) ds`
/// on the grid.
fn conv_trapezoid(h: f64, a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut out = vec![0.0; n];
    for i in 1..n {
        let mut acc = 0.5 * (a[0] * b[i] + a[i] * b[0]);
        for j in 1..i {
            acc += a[j] * b[i - j];
        }
        out[i] = acc * h;
    }
    out
}
