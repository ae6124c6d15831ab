//! Truncated L^p functionals and the finite-horizon membership heuristics:
//! does `∫_0^T |x|^p` look like the head of a convergent integral, and do the
//! interval averages `F(·;θ)` of a forcing lie in L^p for every window
//! length θ — the testable side of the equivalence between forcing averages
//! and solution integrability.

use crate::error::{Error, Result};
use crate::fit::peak_log_slope;
use crate::forcing::ForcingFunction;
use crate::grid::{Grid, Trajectory};
use crate::quad::trapezoid;
use std::fmt;

/// Tuning knobs for the truncation heuristics. `tau_growth` bounds the
/// relative late-half increment a convergent integral may show; `tau_blow`
/// is the increment beyond which the tail is called divergent outright.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyThresholds {
    pub tau_growth: f64,
    pub tau_blow: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        // tau_blow must sit below the slowest divergence worth catching:
        // ∫^T dt/(1+t) gains ≈ ln 2 / ln(1+T) ≈ 0.18 of itself over the last
        // half at T = 40, so 0.15 flags it while e^{−t}-type tails (increments
        // ≪ 1e-2) stay clear of tau_growth.
        ClassifyThresholds { tau_growth: 1e-2, tau_blow: 0.15 }
    }
}

/// Verdict of the truncation heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Finite,
    Infinite,
    Inconclusive,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Membership::Finite => "finite",
            Membership::Infinite => "infinite",
            Membership::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// `∫_0^T |x(t)|^p dt` by composite trapezoid on the trajectory's grid.
pub fn truncated_lp(x: &Trajectory, p: f64) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::domain(format!("exponent p must satisfy p ≥ 1, got {p}")));
    }
    let powered: Vec<f64> = x.values().iter().map(|v| v.abs().powf(p)).collect();
    Ok(trapezoid(x.grid().h(), &powered))
}

/// Decide whether `∫_0^∞ |x|^p` looks finite from its truncation to `[0, T]`.
///
/// The heuristic combines the relative late-half increment of the running
/// integral with the log-slope of the envelope of `|x|^p` over the final
/// third: a convergent tail must have stopped accumulating *and* be heading
/// down. Both signals inconclusive ⇒ `Inconclusive`; this is a diagnosis of
/// the truncated data, never a proof about the half-line.
pub fn classify_membership(
    x: &Trajectory,
    p: f64,
    thresholds: &ClassifyThresholds,
) -> Result<Membership> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::domain(format!("exponent p must satisfy p ≥ 1, got {p}")));
    }
    let grid = *x.grid();
    if grid.horizon() < 4.0 {
        return Err(Error::config(format!(
            "membership classification needs a horizon of at least 4, got {}",
            grid.horizon()
        )));
    }
    let powered: Vec<f64> = x.values().iter().map(|v| v.abs().powf(p)).collect();
    let global_max = powered.iter().cloned().fold(0.0f64, f64::max);
    if global_max == 0.0 {
        return Ok(Membership::Finite);
    }

    let h = grid.h();
    let total = trapezoid(h, &powered);
    let half_idx = (grid.n_points() - 1) / 2;
    let half = trapezoid(h, &powered[..=half_idx]);
    let rel_increment = if total > 0.0 { (total - half) / total } else { 0.0 };

    let fit = peak_log_slope(h, &powered, grid.horizon() * 2.0 / 3.0, 12);

    if rel_increment >= thresholds.tau_blow {
        return Ok(Membership::Infinite);
    }
    // A flat tail with material mass means the running integral still
    // accumulates at an undiminished rate — growth ∝ T that the *relative*
    // increment hides whenever a large transient head dominates the total.
    // Sups over the two halves of the final third are phase-robust (each
    // half spans well over an oscillation period at resolvable frequencies),
    // and any convergent-integrand envelope decays across them.
    let i_tail = (grid.n_points() - 1) * 2 / 3;
    let i_mid = i_tail + (grid.n_points() - 1 - i_tail) / 2;
    let sup_early = powered[i_tail..=i_mid].iter().cloned().fold(0.0f64, f64::max);
    let sup_late = powered[i_mid..].iter().cloned().fold(0.0f64, f64::max);
    if sup_late >= 0.9 * sup_early && sup_late > 1e-9 * global_max && total - half > 1e-6 * total
    {
        return Ok(Membership::Infinite);
    }
    match fit {
        Some(fit) => {
            let tail_negligible = fit.last_peak <= 1e-9 * global_max;
            if rel_increment <= thresholds.tau_growth && (fit.slope < 0.0 || tail_negligible) {
                Ok(Membership::Finite)
            } else if fit.slope >= 0.0
                && rel_increment > thresholds.tau_growth
                && fit.last_peak >= 0.9 * fit.first_peak
            {
                Ok(Membership::Infinite)
            } else {
                Ok(Membership::Inconclusive)
            }
        }
        None => {
            // No usable envelope: the tail is essentially flat at zero or the
            // horizon is too tight for block peaks.
            let tail_sup = powered[(grid.n_points() - 1) * 2 / 3..]
                .iter()
                .cloned()
                .fold(0.0f64, f64::max);
            if tail_sup <= 1e-9 * global_max && rel_increment <= thresholds.tau_growth {
                Ok(Membership::Finite)
            } else {
                Ok(Membership::Inconclusive)
            }
        }
    }
}

/// Truncated L^p behaviour of the interval averages `F(·;θ)` of a forcing,
/// swept over a grid of window lengths.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NormReport {
    pub p: f64,
    pub theta_grid: Vec<f64>,
    /// `φ(θ) = ∫_0^{T−θ} |F(t;θ)|^p dt` per θ.
    pub phi: Vec<f64>,
    /// Same functional truncated to half the horizon.
    pub phi_half: Vec<f64>,
    /// `φ(θ) / φ_half(θ)` — near 1 for convergent tails.
    pub half_horizon_ratio: Vec<f64>,
    pub sup_phi: f64,
    pub classification: Membership,
}

/// Evenly spaced window lengths `k/16, k = 1..=16`.
pub fn default_theta_grid() -> Vec<f64> {
    (1..=16).map(|k| k as f64 / 16.0).collect()
}

/// Evaluate `φ(θ) = ∫_0^{T−θ} |F(t;θ)|^p dt` across `theta_grid` and judge
/// whether every window's functional looks finite. A single divergent window
/// condemns the family; all windows must settle for a `Finite` verdict.
pub fn condition_a_report(
    forcing: &ForcingFunction,
    p: f64,
    grid: Grid,
    theta_grid: &[f64],
    thresholds: &ClassifyThresholds,
) -> Result<NormReport> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::domain(format!("exponent p must satisfy p ≥ 1, got {p}")));
    }
    if theta_grid.is_empty() {
        return Err(Error::config("the window-length grid must be nonempty".to_string()));
    }
    if grid.horizon() < 4.0 {
        return Err(Error::config(format!(
            "interval-average classification needs a horizon of at least 4, got {}",
            grid.horizon()
        )));
    }
    for &theta in theta_grid {
        if !(theta.is_finite() && 0.0 < theta && theta <= 1.0) {
            return Err(Error::domain(format!(
                "window lengths must lie in (0, 1], got {theta}"
            )));
        }
    }

    let mut phi = Vec::with_capacity(theta_grid.len());
    let mut phi_half = Vec::with_capacity(theta_grid.len());
    let mut ratios = Vec::with_capacity(theta_grid.len());
    let mut any_blow = false;
    let mut all_settled = true;

    for &theta in theta_grid {
        let sub = grid.truncated(grid.horizon() - theta)?;
        let avg = forcing.interval_average(theta, sub)?;
        let powered: Vec<f64> = avg.values().iter().map(|v| v.abs().powf(p)).collect();
        let total = trapezoid(sub.h(), &powered);
        let half_idx = (sub.n_points() - 1) / 2;
        let half = trapezoid(sub.h(), &powered[..=half_idx]);
        let ratio = if total <= 0.0 {
            1.0
        } else if half == 0.0 {
            f64::INFINITY
        } else {
            total / half
        };
        if ratio >= 1.0 + thresholds.tau_blow {
            any_blow = true;
        }
        if ratio > 1.0 + thresholds.tau_growth {
            all_settled = false;
        }
        phi.push(total);
        phi_half.push(half);
        ratios.push(ratio);
    }

    let sup_phi = phi.iter().cloned().fold(0.0f64, f64::max);
    let classification = if any_blow {
        Membership::Infinite
    } else if all_settled {
        Membership::Finite
    } else {
        Membership::Inconclusive
    };

    Ok(NormReport {
        p,
        theta_grid: theta_grid.to_vec(),
        phi,
        phi_half,
        half_horizon_ratio: ratios,
        sup_phi,
        classification,
    })
}
