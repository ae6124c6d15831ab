//! Case orchestration for the equivalence experiment: the integrability gate
//! on the resolvent, three independent solution routes per initial value,
//! window-average classification of the forcing, identity residuals, per-case
//! verdicts, and suite-level artifacts with exit semantics.
//!
//! A case checks one instance of the equivalence
//!
//! > `x(·; ξ) ∈ L^p(ℝ₊)` for every ξ  ⟺  `F(·;θ) ∈ L^p(ℝ₊)` for every
//! > window length θ ∈ (0, 1]
//!
//! under the hypothesis that the differential resolvent of ν is integrable.
//! Side A (the forcing averages) and side B (the solutions, one per ξ) are
//! classified independently; a case passes only when both sides are
//! conclusive, agree with each other, match the declared expectation, and
//! every numerical cross-check held up.

use std::path::Path;

use serde::Serialize;

use crate::config::{CaseConfig, ExpectedSide, ToleranceConfig};
use crate::error::{Error, Result};
use crate::forcing::{Decomposition, ForcingFunction};
use crate::grid::{Grid, Trajectory};
use crate::measure::Measure;
use crate::norms::{
    classify_membership, condition_a_report, default_theta_grid, ClassifyThresholds, Membership,
    NormReport,
};
use crate::report::{write_csv, write_json, write_svg_chart, SvgSeries};
use crate::resolvent::{solve_resolvent, L1Verdict, ResolventResult};
use crate::solver::{
    forced_response_key2, forced_response_voc, integrated_residual_sweep, solve_direct,
    SolveConfig,
};

/// Horizon on which the integrability gate judges the resolvent. A case with
/// a shorter grid gets a dedicated gate run at its own step size, so that a
/// short experiment horizon never silences the hypothesis check.
pub const GATE_HORIZON: f64 = 20.0;

/// Window lengths for the integrated-equation cross-check: the residual
/// `x(t+θ) − x(t) − ∫_t^{t+θ}(ν∗x)` must reproduce the interval average
/// `F(t;θ)` for each of these θ.
pub const RESIDUAL_THETAS: [f64; 4] = [0.1, 0.25, 0.5, 1.0];

/// A fully built experiment: kernel, forcing, initial values, exponent,
/// grid, classification knobs, and the expected outcome if one is declared.
#[derive(Debug, Clone)]
pub struct CaseSpec {
    pub name: String,
    pub measure: Measure,
    pub forcing: ForcingFunction,
    pub xi_list: Vec<f64>,
    pub p: f64,
    pub grid: Grid,
    pub theta_grid: Vec<f64>,
    pub thresholds: ClassifyThresholds,
    /// Expected (side A, side B) classifications; `None` means the case only
    /// demands that the two observed sides agree.
    pub expected: Option<(Membership, Membership)>,
    /// Set on cases that deliberately violate the integrability hypothesis
    /// and are therefore supposed to abort at the gate.
    pub expect_inconclusive: bool,
    pub tolerances: ToleranceConfig,
}

impl CaseSpec {
    pub fn from_config(cfg: &CaseConfig) -> Result<CaseSpec> {
        if cfg.name.trim().is_empty() {
            return Err(Error::config("case name must be nonempty"));
        }
        if cfg.xi_list.is_empty() {
            return Err(Error::config(format!(
                "case \"{}\": xi_list must contain at least one initial value",
                cfg.name
            )));
        }
        for &xi in &cfg.xi_list {
            if !xi.is_finite() {
                return Err(Error::config(format!(
                    "case \"{}\": initial value {xi} is not finite",
                    cfg.name
                )));
            }
        }
        let expected = cfg
            .expected
            .map(|e| (expected_membership(e.a), expected_membership(e.b)));
        Ok(CaseSpec {
            name: cfg.name.clone(),
            measure: cfg.measure.build()?,
            forcing: cfg.forcing.build()?,
            xi_list: cfg.xi_list.clone(),
            p: cfg.p,
            grid: cfg.grid.build()?,
            theta_grid: cfg.theta_grid.clone().unwrap_or_else(default_theta_grid),
            thresholds: cfg.thresholds.clone().unwrap_or_default().build(),
            expected,
            expect_inconclusive: cfg.expect_inconclusive,
            tolerances: cfg.tolerances.unwrap_or_default(),
        })
    }
}

fn expected_membership(side: ExpectedSide) -> Membership {
    match side {
        ExpectedSide::Finite => Membership::Finite,
        ExpectedSide::Infinite => Membership::Infinite,
    }
}

/// Final judgement on a case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseVerdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for CaseVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseVerdict::Pass => "pass",
            CaseVerdict::Fail => "fail",
            CaseVerdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Side-B classification for one initial value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct XiOutcome {
    pub xi: f64,
    pub membership: Membership,
}

/// Sup-norm gap between the integrated-equation residual and the interval
/// average, for one window length.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThetaResidual {
    pub theta: f64,
    pub sup_error: f64,
}

/// Everything a case reports: classifications on both sides, identity
/// residuals, route agreements, and the verdict with its reasons.
#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub p: f64,
    pub h: f64,
    pub horizon: f64,
    pub hypothesis_violation_expected: bool,
    /// Integrability verdict on the resolvent (gate horizon ≥ 20).
    pub gate: L1Verdict,
    pub resolvent_l1_truncated: f64,
    pub resolvent_tail_rate: Option<f64>,
    /// Side A: the window-average classification. `None` when the gate aborts.
    pub observed_a: Option<Membership>,
    pub sup_phi: Option<f64>,
    /// Side B: solution classification per initial value. Empty on abort.
    pub observed_b: Vec<XiOutcome>,
    /// Case-level side-B membership. Once the gate passes, solutions for two
    /// initial values differ by (ξ − ξ')·r with r integrable and bounded, so
    /// their memberships provably coincide; a conclusive verdict at any
    /// sampled ξ therefore extends to all of them. `None` before the gate or
    /// when conclusive verdicts conflict — which marks a numerical artifact.
    pub observed_b_case: Option<Membership>,
    pub f1_membership: Option<Membership>,
    pub f3_membership: Option<Membership>,
    /// Max over ξ of `sup|x_direct − x_voc|`.
    pub agreement_direct_voc: Option<f64>,
    /// Max over ξ of `sup|x_voc − x_key2|`.
    pub agreement_voc_key2: Option<f64>,
    pub key1_residual: Option<f64>,
    pub integrated_residual: Vec<ThetaResidual>,
    pub tolerances: ToleranceConfig,
    pub verdict: CaseVerdict,
    pub notes: Vec<String>,
}

/// Per-case trajectories kept for artifact emission: the decomposition, the
/// norm sweep, and the three routes for the first initial value.
#[derive(Debug, Clone)]
pub struct CaseAnalysis {
    pub decomposition: Decomposition,
    pub norm_report: NormReport,
    pub x_direct: Trajectory,
    pub x_voc: Trajectory,
    pub x_key2: Trajectory,
    /// Integrated-equation residual per θ (first ξ).
    pub residuals: Vec<(f64, Trajectory)>,
    /// Interval averages `F(·;θ)` per θ on the matching truncated grids.
    pub averages: Vec<(f64, Trajectory)>,
}

/// A case's result plus the data behind it.
#[derive(Debug, Clone)]
pub struct CaseOutput {
    pub result: CaseResult,
    pub resolvent: ResolventResult,
    /// `None` when the integrability gate aborted the case.
    pub analysis: Option<CaseAnalysis>,
}

/// Fold per-ξ memberships into the case-level verdict they must share.
///
/// Solutions for two initial values differ by (ξ − ξ')·r; when the
/// integrability gate has passed, r ∈ L¹ with r' = ν∗r ∈ L¹ forces r bounded,
/// hence r ∈ L^p for every p ≥ 1, and the per-ξ memberships coincide. The
/// unique conclusive verdict (if any) therefore speaks for all ξ; two
/// *different* conclusive verdicts are mutually impossible and return `None`.
pub fn aggregate_xi_memberships(outcomes: &[XiOutcome]) -> Option<Membership> {
    let mut agreed: Option<Membership> = None;
    for o in outcomes {
        if o.membership == Membership::Inconclusive {
            continue;
        }
        match agreed {
            None => agreed = Some(o.membership),
            Some(m) if m == o.membership => {}
            Some(_) => return None,
        }
    }
    Some(agreed.unwrap_or(Membership::Inconclusive))
}

/// Run one case end to end. Errors mean the experiment itself is
/// ill-posed (bad grids, non-finite data); disagreements and failed
/// cross-checks are reported in the verdict, not as errors.
pub fn run_case(spec: &CaseSpec) -> Result<CaseOutput> {
    let grid = spec.grid;
    let res = solve_resolvent(&spec.measure, grid)?;

    // The gate must see a horizon long enough for the tail diagnostic even
    // when the case itself runs short.
    let (gate, gate_rate, gate_l1, gate_horizon) = if grid.horizon() >= GATE_HORIZON {
        (res.l1_verdict, res.l1_tail_rate, res.l1_truncated, grid.horizon())
    } else {
        let gate_res = solve_resolvent(&spec.measure, Grid::new(grid.h(), GATE_HORIZON)?)?;
        (
            gate_res.l1_verdict,
            gate_res.l1_tail_rate,
            gate_res.l1_truncated,
            GATE_HORIZON,
        )
    };

    let mut notes = Vec::new();

    if gate != L1Verdict::Integrable {
        notes.push(format!(
            "hypothesis gate: resolvent classified \"{gate}\" on horizon {gate_horizon}; \
             the equivalence needs an integrable resolvent, so neither side is classified"
        ));
        if spec.expect_inconclusive {
            notes.push("this case deliberately violates the hypothesis; aborting is the expected outcome".to_string());
        }
        let result = CaseResult {
            name: spec.name.clone(),
            p: spec.p,
            h: grid.h(),
            horizon: grid.horizon(),
            hypothesis_violation_expected: spec.expect_inconclusive,
            gate,
            resolvent_l1_truncated: gate_l1,
            resolvent_tail_rate: gate_rate,
            observed_a: None,
            sup_phi: None,
            observed_b: Vec::new(),
            observed_b_case: None,
            f1_membership: None,
            f3_membership: None,
            agreement_direct_voc: None,
            agreement_voc_key2: None,
            key1_residual: None,
            integrated_residual: Vec::new(),
            tolerances: spec.tolerances,
            verdict: CaseVerdict::Inconclusive,
            notes,
        };
        return Ok(CaseOutput { result, resolvent: res, analysis: None });
    }

    if spec.xi_list.is_empty() {
        return Err(Error::config(format!(
            "case \"{}\": xi_list must contain at least one initial value",
            spec.name
        )));
    }

    // Side A and the forcing split are ξ-independent.
    let dec = spec.forcing.decompose(grid)?;
    let norm_report =
        condition_a_report(&spec.forcing, spec.p, grid, &spec.theta_grid, &spec.thresholds)?;
    let observed_a = norm_report.classification;
    let f1_membership = classify_membership(&dec.f1, spec.p, &spec.thresholds)?;
    let f3_membership = classify_membership(&dec.f3, spec.p, &spec.thresholds)?;

    // So are the forced parts of the two representation routes; per ξ only the
    // direct stepping and the ξ·r shift remain.
    let forced_voc = forced_response_voc(&spec.forcing, &res)?;
    let forced_key2 = forced_response_key2(&dec, &res, &spec.measure)?;

    let mut observed_b = Vec::with_capacity(spec.xi_list.len());
    let mut agreement_direct_voc = 0.0f64;
    let mut agreement_voc_key2 = 0.0f64;
    let mut first_routes: Option<(Trajectory, Trajectory, Trajectory)> = None;

    for &xi in &spec.xi_list {
        let cfg = SolveConfig::new(spec.measure.clone(), spec.forcing.clone(), xi, grid)?;
        let x_direct = solve_direct(&cfg)?;
        let x_voc = res.r.axpy(xi, &forced_voc, 1.0)?;
        let x_key2 = res.r.axpy(xi, &forced_key2, 1.0)?;
        agreement_direct_voc = agreement_direct_voc.max(x_direct.sup_diff(&x_voc)?);
        agreement_voc_key2 = agreement_voc_key2.max(x_voc.sup_diff(&x_key2)?);
        observed_b.push(XiOutcome {
            xi,
            membership: classify_membership(&x_key2, spec.p, &spec.thresholds)?,
        });
        if first_routes.is_none() {
            first_routes = Some((x_direct, x_voc, x_key2));
        }
    }
    let (x_direct, x_voc, x_key2) = first_routes.expect("xi_list is nonempty");

    // Integrated-equation cross-check on the first ξ's solution: the residual
    // must reproduce F(·;θ) exactly as the window engine computes it.
    let cfg0 = SolveConfig::new(
        spec.measure.clone(),
        spec.forcing.clone(),
        spec.xi_list[0],
        grid,
    )?;
    let residuals = integrated_residual_sweep(&x_voc, &cfg0, &RESIDUAL_THETAS)?;
    let mut integrated = Vec::with_capacity(residuals.len());
    let mut averages = Vec::with_capacity(residuals.len());
    for (theta, resid) in &residuals {
        let sub = grid.truncated(grid.horizon() - *theta)?;
        let avg = spec.forcing.interval_average(*theta, sub)?;
        integrated.push(ThetaResidual { theta: *theta, sup_error: resid.sup_diff(&avg)? });
        averages.push((*theta, avg));
    }

    // Numerical gates first: a case whose cross-checks fail has no business
    // claiming anything about the theorem.
    let tol = spec.tolerances;
    let mut machinery_broken = false;
    if agreement_direct_voc > tol.triple_agreement {
        machinery_broken = true;
        notes.push(format!(
            "route disagreement: sup|x_direct − x_voc| = {agreement_direct_voc:.3e} exceeds {:.3e}",
            tol.triple_agreement
        ));
    }
    if agreement_voc_key2 > tol.triple_agreement {
        machinery_broken = true;
        notes.push(format!(
            "route disagreement: sup|x_voc − x_key2| = {agreement_voc_key2:.3e} exceeds {:.3e}",
            tol.triple_agreement
        ));
    }
    for tr in &integrated {
        if tr.sup_error > tol.integrated_residual {
            machinery_broken = true;
            notes.push(format!(
                "integrated-equation residual misses the interval average by {:.3e} at θ = {} (allowed {:.3e})",
                tr.sup_error, tr.theta, tol.integrated_residual
            ));
        }
    }
    if let Some(key1_max) = tol.key1 {
        if dec.key1_residual > key1_max {
            machinery_broken = true;
            notes.push(format!(
                "decomposition identity residual {:.3e} exceeds {key1_max:.3e}",
                dec.key1_residual
            ));
        }
    }

    let observed_b_case = aggregate_xi_memberships(&observed_b);
    let b_inconclusive = observed_b
        .iter()
        .any(|o| o.membership == Membership::Inconclusive);

    let mut verdict = if machinery_broken {
        CaseVerdict::Fail
    } else {
        match observed_b_case {
            None => {
                notes.push(
                    "conclusive side-B verdicts disagree across ξ although the solutions \
                     differ only by multiples of the integrable resolvent; that contradiction \
                     marks a numerical artifact, not a counterexample"
                        .to_string(),
                );
                CaseVerdict::Fail
            }
            Some(b_case) => {
                if b_inconclusive && b_case != Membership::Inconclusive {
                    let carried: Vec<String> = observed_b
                        .iter()
                        .filter(|o| o.membership == Membership::Inconclusive)
                        .map(|o| format!("{}", o.xi))
                        .collect();
                    notes.push(format!(
                        "truncation heuristic inconclusive at ξ ∈ {{{}}}; membership \"{b_case}\" \
                         carries over from the conclusive ξ because the solutions differ by ξ·r \
                         with r integrable",
                        carried.join(", ")
                    ));
                }
                let conclusive =
                    observed_a != Membership::Inconclusive && b_case != Membership::Inconclusive;
                if !conclusive {
                    if observed_a == Membership::Inconclusive {
                        notes.push(
                            "side A (window averages) is inconclusive on this horizon".to_string(),
                        );
                    }
                    if b_case == Membership::Inconclusive {
                        notes.push(
                            "side B (solution membership) is inconclusive for every ξ".to_string(),
                        );
                    }
                    CaseVerdict::Inconclusive
                } else if b_case != observed_a {
                    notes.push(format!(
                        "equivalence violated: side A is {observed_a} but side B is {b_case}"
                    ));
                    CaseVerdict::Fail
                } else {
                    match spec.expected {
                        Some((ea, eb)) => {
                            let a_ok = observed_a == ea;
                            let b_ok = b_case == eb;
                            if a_ok && b_ok {
                                CaseVerdict::Pass
                            } else {
                                if !a_ok {
                                    notes.push(format!(
                                        "side A observed {observed_a}, expected {ea}"
                                    ));
                                }
                                if !b_ok {
                                    notes.push(format!(
                                        "side B observed {b_case}, expected {eb}"
                                    ));
                                }
                                CaseVerdict::Fail
                            }
                        }
                        None => CaseVerdict::Pass,
                    }
                }
            }
        }
    };

    if spec.expect_inconclusive && verdict != CaseVerdict::Inconclusive {
        notes.push(
            "expected the hypothesis gate to abort this case, but it ran to completion".to_string(),
        );
        verdict = CaseVerdict::Fail;
    }

    let result = CaseResult {
        name: spec.name.clone(),
        p: spec.p,
        h: grid.h(),
        horizon: grid.horizon(),
        hypothesis_violation_expected: spec.expect_inconclusive,
        gate,
        resolvent_l1_truncated: gate_l1,
        resolvent_tail_rate: gate_rate,
        observed_a: Some(observed_a),
        sup_phi: Some(norm_report.sup_phi),
        observed_b,
        observed_b_case,
        f1_membership: Some(f1_membership),
        f3_membership: Some(f3_membership),
        agreement_direct_voc: Some(agreement_direct_voc),
        agreement_voc_key2: Some(agreement_voc_key2),
        key1_residual: Some(dec.key1_residual),
        integrated_residual: integrated,
        tolerances: spec.tolerances,
        verdict,
        notes,
    };

    Ok(CaseOutput {
        result,
        resolvent: res,
        analysis: Some(CaseAnalysis {
            decomposition: dec,
            norm_report,
            x_direct,
            x_voc,
            x_key2,
            residuals,
            averages,
        }),
    })
}

/// Outcome of the scalar-ODE special case `x' = −x + f`, `ξ = 0`: the
/// (mean-square) memberships of the smoothed signal `y = r∗f` and of the
/// window averages of `f` must coincide.
#[derive(Debug, Clone, Serialize)]
pub struct Delta0Report {
    pub y_membership: Membership,
    pub average_membership: Membership,
    pub sup_phi: f64,
    /// Both sides conclusive and equal.
    pub agree: bool,
}

/// Check the exponential-smoothing special case in L²: solve
/// `y' = −y + f, y(0) = 0` via the resolvent representation and compare the
/// membership of `y` against the window-average classification of `f`.
pub fn run_delta0_special(
    forcing: &ForcingFunction,
    grid: Grid,
    thresholds: &ClassifyThresholds,
) -> Result<Delta0Report> {
    let res = solve_resolvent(&Measure::delta0(-1.0), grid)?;
    let y = forced_response_voc(forcing, &res)?;
    let y_membership = classify_membership(&y, 2.0, thresholds)?;
    let report = condition_a_report(forcing, 2.0, grid, &default_theta_grid(), thresholds)?;
    let average_membership = report.classification;
    let agree =
        y_membership != Membership::Inconclusive && y_membership == average_membership;
    Ok(Delta0Report {
        y_membership,
        average_membership,
        sup_phi: report.sup_phi,
        agree,
    })
}

/// Aggregated suite outcome. Inconclusive results split into expected ones
/// (declared hypothesis violations) and unexpected ones.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub n_cases: usize,
    pub n_pass: usize,
    pub n_fail: usize,
    pub n_expected_inconclusive: usize,
    pub n_unexpected_inconclusive: usize,
    pub results: Vec<CaseResult>,
}

impl SuiteSummary {
    /// 0: all conclusive cases passed and every inconclusive was declared.
    /// 1: at least one failure. 2: an undeclared inconclusive.
    pub fn exit_code(&self) -> i32 {
        if self.n_fail > 0 {
            1
        } else if self.n_unexpected_inconclusive > 0 {
            2
        } else {
            0
        }
    }
}

/// Run every case in order, write per-case artifacts and the machine-readable
/// summary under `out_dir` when given, and aggregate the verdicts.
pub fn run_suite(specs: &[CaseSpec], out_dir: Option<&Path>) -> Result<SuiteSummary> {
    if specs.is_empty() {
        return Err(Error::config("a suite must contain at least one case"));
    }
    for (i, a) in specs.iter().enumerate() {
        for b in &specs[i + 1..] {
            if slugify(&a.name) == slugify(&b.name) {
                return Err(Error::config(format!(
                    "case names \"{}\" and \"{}\" collide after slugification",
                    a.name, b.name
                )));
            }
        }
    }

    let mut results = Vec::with_capacity(specs.len());
    for spec in specs {
        let output = run_case(spec)?;
        if let Some(dir) = out_dir {
            write_case_artifacts(&dir.join(slugify(&spec.name)), &output)?;
        }
        results.push(output.result);
    }

    let mut summary = SuiteSummary {
        n_cases: results.len(),
        n_pass: 0,
        n_fail: 0,
        n_expected_inconclusive: 0,
        n_unexpected_inconclusive: 0,
        results,
    };
    for r in &summary.results {
        match r.verdict {
            CaseVerdict::Pass => summary.n_pass += 1,
            CaseVerdict::Fail => summary.n_fail += 1,
            CaseVerdict::Inconclusive => {
                if r.hypothesis_violation_expected {
                    summary.n_expected_inconclusive += 1;
                } else {
                    summary.n_unexpected_inconclusive += 1;
                }
            }
        }
    }

    if let Some(dir) = out_dir {
        write_json(&dir.join("summary.json"), &summary)?;
    }
    Ok(summary)
}

/// Directory-safe case name: lowercase alphanumerics with single dashes.
pub fn slugify(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut dash_pending = false;
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            if dash_pending && !out.is_empty() {
                out.push('-');
            }
            dash_pending = false;
            out.push(c.to_ascii_lowercase());
        } else {
            dash_pending = true;
        }
    }
    if out.is_empty() {
        "case".to_string()
    } else {
        out
    }
}

/// Write one case's artifact set: CSV data, charts, and the JSON summary.
pub fn write_case_artifacts(dir: &Path, output: &CaseOutput) -> Result<()> {
    let grid = output.resolvent.r.grid();
    let t: Vec<f64> = grid.nodes().collect();
    write_csv(
        &dir.join("resolvent.csv"),
        &["t", "r", "r_prime"],
        &[&t, output.resolvent.r.values(), output.resolvent.r_prime.values()],
    )?;
    write_svg_chart(
        &dir.join("resolvent.svg"),
        &format!("{}: resolvent and derivative", output.result.name),
        &t,
        &[
            SvgSeries { label: "r", values: output.resolvent.r.values() },
            SvgSeries { label: "r_prime", values: output.resolvent.r_prime.values() },
        ],
    )?;

    if let Some(analysis) = &output.analysis {
        let dec = &analysis.decomposition;
        write_csv(
            &dir.join("decompose.csv"),
            &["t", "f", "f1", "f2", "f3"],
            &[
                &t,
                dec.f.values(),
                dec.f1.values(),
                dec.f2.values(),
                dec.f3.values(),
            ],
        )?;
        write_csv(
            &dir.join("solve.csv"),
            &["t", "x_direct", "x_voc", "x_key2"],
            &[
                &t,
                analysis.x_direct.values(),
                analysis.x_voc.values(),
                analysis.x_key2.values(),
            ],
        )?;
        write_svg_chart(
            &dir.join("solve.svg"),
            &format!("{}: three solution routes (first ξ)", output.result.name),
            &t,
            &[
                SvgSeries { label: "x_direct", values: analysis.x_direct.values() },
                SvgSeries { label: "x_voc", values: analysis.x_voc.values() },
                SvgSeries { label: "x_key2", values: analysis.x_key2.values() },
            ],
        )?;
        let report = &analysis.norm_report;
        write_csv(
            &dir.join("norms.csv"),
            &["theta", "phi_halfT", "phi_T", "ratio"],
            &[
                &report.theta_grid,
                &report.phi_half,
                &report.phi,
                &report.half_horizon_ratio,
            ],
        )?;
    }

    write_json(&dir.join("summary.json"), &output.result)
}

/// The shipped experiment suite: kernels spanning atoms at zero, delayed
/// atoms, and a smooth density; forcings spanning both sides of the L^p
/// dichotomy, including fast-phase oscillations whose pointwise samples no
/// grid can follow; plus one declared hypothesis violation.
///
/// Tolerances are frozen at roughly 50–100× the agreements and residuals
/// measured on these exact grids, so they fail loudly on any loss of an
/// order of accuracy while staying insensitive to platform rounding. The
/// oscillating-growth cases leave the sampled-derivative identity residual
/// unchecked (`key1: None`): with phases like e^{2t} reaching e^{24}, no
/// grid resolves pointwise samples, and that residual is reported for
/// inspection rather than gated.
pub fn shipped_suite() -> Vec<CaseSpec> {
    fn tol(triple: f64, integrated: f64, key1: Option<f64>) -> ToleranceConfig {
        ToleranceConfig { triple_agreement: triple, integrated_residual: integrated, key1 }
    }
    fn case(
        name: &str,
        measure: Measure,
        forcing: ForcingFunction,
        p: f64,
        h: f64,
        t_end: f64,
        expected: Option<(Membership, Membership)>,
        tolerances: ToleranceConfig,
    ) -> CaseSpec {
        CaseSpec {
            name: name.to_string(),
            measure,
            forcing,
            xi_list: vec![0.0, 1.0, 10.0],
            p,
            grid: Grid::new(h, t_end).expect("static suite grid"),
            theta_grid: default_theta_grid(),
            thresholds: ClassifyThresholds::default(),
            expected,
            expect_inconclusive: false,
            tolerances,
        }
    }

    let delta0 = || Measure::delta0(-1.0);
    let delay_half = || {
        Measure::new(
            vec![crate::measure::Atom { location: 0.5, weight: -1.0 }],
            None,
        )
        .expect("static suite kernel")
    };
    let exp_density = || {
        Measure::new(
            Vec::new(),
            Some(crate::measure::Density {
                shape: crate::measure::DensityShape::ExpDecay { coefficient: -1.0, rate: 1.0 },
                s_max: 40.0,
            }),
        )
        .expect("static suite kernel")
    };
    let fin = Some((Membership::Finite, Membership::Finite));
    let inf = Some((Membership::Infinite, Membership::Infinite));

    let mixed_decay = ForcingFunction::sum(vec![
        ForcingFunction::scaled(2.0, ForcingFunction::exp_decay(0.5).expect("static"))
            .expect("static"),
        ForcingFunction::scaled(-1.0, ForcingFunction::exp_decay(1.0).expect("static"))
            .expect("static"),
    ]);

    let mut specs = vec![
        case(
            "delta0 zero forcing",
            delta0(),
            ForcingFunction::zero(),
            1.0,
            1e-3,
            20.0,
            fin,
            tol(1e-12, 1e-12, Some(1e-12)),
        ),
        case(
            "delta0 constant forcing",
            delta0(),
            ForcingFunction::constant(1.0).expect("static"),
            1.0,
            1e-3,
            20.0,
            inf,
            tol(1e-5, 1e-11, Some(1e-10)),
        ),
        case(
            "delta0 exponential decay",
            delta0(),
            ForcingFunction::exp_decay(1.0).expect("static"),
            2.0,
            1e-3,
            20.0,
            fin,
            tol(1e-5, 1e-11, Some(1e-6)),
        ),
        case(
            "delta0 oscillating growth beta 2",
            delta0(),
            ForcingFunction::osc_growth(1.0, 2.0).expect("static"),
            2.0,
            2e-4,
            12.0,
            fin,
            tol(1e-6, 1e-7, None),
        ),
        case(
            "delta0 oscillating growth beta 3",
            delta0(),
            ForcingFunction::osc_growth(1.0, 3.0).expect("static"),
            1.0,
            2e-4,
            12.0,
            fin,
            tol(1e-6, 1e-7, None),
        ),
        case(
            "delta0 harmonic decay p1",
            delta0(),
            ForcingFunction::power_decay(1.0).expect("static"),
            1.0,
            1e-3,
            40.0,
            inf,
            tol(1e-5, 1e-11, Some(1e-6)),
        ),
        case(
            "delta0 harmonic decay p2",
            delta0(),
            ForcingFunction::power_decay(1.0).expect("static"),
            2.0,
            4e-3,
            160.0,
            fin,
            tol(1e-4, 1e-4, Some(1e-5)),
        ),
        case(
            "strong contraction sinusoid",
            Measure::delta0(-2.0),
            ForcingFunction::sinusoid(1.0, 1.0).expect("static"),
            2.0,
            1e-3,
            20.0,
            inf,
            tol(1e-5, 1e-11, Some(1e-5)),
        ),
        case(
            "pure delay exponential decay",
            delay_half(),
            ForcingFunction::exp_decay(1.0).expect("static"),
            1.0,
            1e-3,
            40.0,
            fin,
            tol(1e-5, 1e-11, Some(1e-6)),
        ),
        case(
            "pure delay zero forcing",
            delay_half(),
            ForcingFunction::zero(),
            2.0,
            1e-3,
            40.0,
            fin,
            tol(1e-11, 1e-12, Some(1e-12)),
        ),
        case(
            "exponential density constant forcing",
            exp_density(),
            ForcingFunction::constant(1.0).expect("static"),
            1.0,
            2e-3,
            30.0,
            inf,
            tol(1e-4, 1e-4, Some(1e-10)),
        ),
        case(
            "exponential density decaying forcing",
            exp_density(),
            ForcingFunction::exp_decay(2.0).expect("static"),
            2.0,
            2e-3,
            30.0,
            fin,
            tol(5e-5, 5e-5, Some(1e-5)),
        ),
        case(
            "no dynamics hypothesis violation",
            Measure::zero(),
            ForcingFunction::constant(1.0).expect("static"),
            1.0,
            1e-3,
            20.0,
            None,
            tol(1e-5, 1e-5, None),
        ),
        // T = 30: the slow e^{−t/2} component needs the longer horizon before
        // the window-average half-horizon ratios settle under 1.01.
        case(
            "delta0 mixed exponential decay",
            delta0(),
            mixed_decay,
            1.0,
            1e-3,
            30.0,
            fin,
            tol(1e-5, 1e-11, Some(1e-6)),
        ),
    ];
    specs[12].expect_inconclusive = true;
    specs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_tol() -> ToleranceConfig {
        ToleranceConfig { triple_agreement: 1e-3, integrated_residual: 1e-3, key1: None }
    }

    fn quick_case(measure: Measure, forcing: ForcingFunction, p: f64) -> CaseSpec {
        CaseSpec {
            name: "quick".to_string(),
            measure,
            forcing,
            xi_list: vec![0.0, 1.0],
            p,
            grid: Grid::new(1e-2, 20.0).unwrap(),
            theta_grid: default_theta_grid(),
            thresholds: ClassifyThresholds::default(),
            expected: None,
            expect_inconclusive: false,
            tolerances: quick_tol(),
        }
    }

    #[test]
    fn decaying_case_passes_with_agreeing_sides() {
        let spec = quick_case(
            Measure::delta0(-1.0),
            ForcingFunction::exp_decay(1.0).unwrap(),
            2.0,
        );
        let out = run_case(&spec).unwrap();
        assert_eq!(out.result.verdict, CaseVerdict::Pass, "notes: {:?}", out.result.notes);
        assert_eq!(out.result.observed_a, Some(Membership::Finite));
        assert!(out
            .result
            .observed_b
            .iter()
            .all(|o| o.membership == Membership::Finite));
        assert!(out.analysis.is_some());
        assert_eq!(out.result.integrated_residual.len(), RESIDUAL_THETAS.len());
    }

    #[test]
    fn expected_mismatch_fails() {
        let mut spec = quick_case(
            Measure::delta0(-1.0),
            ForcingFunction::exp_decay(1.0).unwrap(),
            2.0,
        );
        spec.expected = Some((Membership::Infinite, Membership::Infinite));
        let out = run_case(&spec).unwrap();
        assert_eq!(out.result.verdict, CaseVerdict::Fail);
        assert!(!out.result.notes.is_empty());
    }

    #[test]
    fn hypothesis_violation_aborts_at_gate() {
        let mut spec = quick_case(
            Measure::zero(),
            ForcingFunction::constant(1.0).unwrap(),
            1.0,
        );
        spec.expect_inconclusive = true;
        let out = run_case(&spec).unwrap();
        assert_eq!(out.result.verdict, CaseVerdict::Inconclusive);
        assert!(out.analysis.is_none());
        assert!(out.result.observed_a.is_none());
        assert_ne!(out.result.gate, L1Verdict::Integrable);
    }

    #[test]
    fn short_grid_still_gates_on_long_horizon() {
        // On [0, 5] alone the tail diagnostic would refuse to judge; the gate
        // must stretch to its own horizon and accept the decaying resolvent.
        let mut spec = quick_case(
            Measure::delta0(-1.0),
            ForcingFunction::exp_decay(1.0).unwrap(),
            2.0,
        );
        spec.grid = Grid::new(1e-2, 5.0).unwrap();
        let out = run_case(&spec).unwrap();
        assert_eq!(out.result.gate, L1Verdict::Integrable);
        // The case itself may or may not be conclusive on 5 units; the gate
        // decision is what this test pins.
        assert!(out.analysis.is_some());
    }

    #[test]
    fn route_disagreement_gate_fails_a_case() {
        let mut spec = quick_case(
            Measure::delta0(-1.0),
            ForcingFunction::constant(1.0).unwrap(),
            1.0,
        );
        // Unreachable tolerance: the routes agree to ~1e-5 but not to 1e-18.
        spec.tolerances =
            ToleranceConfig { triple_agreement: 1e-18, integrated_residual: 1.0, key1: None };
        let out = run_case(&spec).unwrap();
        assert_eq!(out.result.verdict, CaseVerdict::Fail);
    }

    #[test]
    fn delta0_special_agrees_for_decay_and_constant() {
        let grid = Grid::new(1e-2, 20.0).unwrap();
        let thresholds = ClassifyThresholds::default();
        let decay = run_delta0_special(
            &ForcingFunction::exp_decay(1.0).unwrap(),
            grid,
            &thresholds,
        )
        .unwrap();
        assert!(decay.agree);
        assert_eq!(decay.y_membership, Membership::Finite);

        let constant = run_delta0_special(
            &ForcingFunction::constant(1.0).unwrap(),
            grid,
            &thresholds,
        )
        .unwrap();
        assert!(constant.agree);
        assert_eq!(constant.y_membership, Membership::Infinite);
    }

    #[test]
    fn suite_rejects_empty_and_colliding_names() {
        assert!(run_suite(&[], None).is_err());
        let a = quick_case(
            Measure::delta0(-1.0),
            ForcingFunction::exp_decay(1.0).unwrap(),
            2.0,
        );
        let mut b = a.clone();
        b.name = "Quick!".to_string(); // slugifies to the same "quick"
        assert!(run_suite(&[a, b], None).is_err());
    }

    #[test]
    fn tiny_suite_summary_counts_and_exit_codes() {
        let pass = quick_case(
            Measure::delta0(-1.0),
            ForcingFunction::exp_decay(1.0).unwrap(),
            2.0,
        );
        let mut violation = quick_case(
            Measure::zero(),
            ForcingFunction::constant(1.0).unwrap(),
            1.0,
        );
        violation.name = "violation".to_string();
        violation.expect_inconclusive = true;

        let summary = run_suite(&[pass.clone(), violation.clone()], None).unwrap();
        assert_eq!(summary.n_pass, 1);
        assert_eq!(summary.n_fail, 0);
        assert_eq!(summary.n_expected_inconclusive, 1);
        assert_eq!(summary.n_unexpected_inconclusive, 0);
        assert_eq!(summary.exit_code(), 0);

        // The same violation undeclared must poison the exit code.
        let mut undeclared = violation;
        undeclared.expect_inconclusive = false;
        let summary = run_suite(&[pass, undeclared], None).unwrap();
        assert_eq!(summary.n_unexpected_inconclusive, 1);
        assert_eq!(summary.exit_code(), 2);
    }

    #[test]
    fn suite_artifacts_land_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let spec = quick_case(
            Measure::delta0(-1.0),
            ForcingFunction::exp_decay(1.0).unwrap(),
            2.0,
        );
        run_suite(std::slice::from_ref(&spec), Some(dir.path())).unwrap();
        for file in ["resolvent.csv", "resolvent.svg", "decompose.csv", "solve.csv", "solve.svg", "norms.csv", "summary.json"] {
            let path = dir.path().join("quick").join(file);
            assert!(path.is_file(), "missing artifact {}", path.display());
        }
        assert!(dir.path().join("summary.json").is_file());
    }

    #[test]
    fn shipped_suite_is_well_formed() {
        let specs = shipped_suite();
        assert!(specs.len() >= 10);
        assert_eq!(
            specs
                .iter()
                .filter(|s| s.expect_inconclusive)
                .count(),
            1,
            "exactly one declared hypothesis violation"
        );
        // Names must map to distinct artifact directories.
        let mut slugs: Vec<String> = specs.iter().map(|s| slugify(&s.name)).collect();
        slugs.sort();
        slugs.dedup();
        assert_eq!(slugs.len(), specs.len());
        // Every declared expectation asserts the equivalence, never a violation.
        for spec in &specs {
            if let Some((a, b)) = spec.expected {
                assert_eq!(a, b, "case {}", spec.name);
            }
            assert_eq!(spec.xi_list, vec![0.0, 1.0, 10.0], "case {}", spec.name);
        }
    }

    #[test]
    fn slugify_is_filesystem_safe() {
        assert_eq!(slugify("delta0 zero forcing"), "delta0-zero-forcing");
        assert_eq!(slugify("  weird -- Name!! "), "weird-name");
        assert_eq!(slugify("???"), "case");
    }

    #[test]
    fn xi_aggregation_extends_conclusive_verdicts_and_flags_conflicts() {
        let o = |xi: f64, m: Membership| XiOutcome { xi, membership: m };
        // unanimous conclusive
        assert_eq!(
            aggregate_xi_memberships(&[o(0.0, Membership::Finite), o(1.0, Membership::Finite)]),
            Some(Membership::Finite)
        );
        // one conclusive verdict speaks for the inconclusive ξ as well
        assert_eq!(
            aggregate_xi_memberships(&[
                o(0.0, Membership::Infinite),
                o(1.0, Membership::Inconclusive),
                o(10.0, Membership::Inconclusive),
            ]),
            Some(Membership::Infinite)
        );
        // nothing conclusive anywhere
        assert_eq!(
            aggregate_xi_memberships(&[o(0.0, Membership::Inconclusive)]),
            Some(Membership::Inconclusive)
        );
        // two different conclusive verdicts are mutually impossible
        assert_eq!(
            aggregate_xi_memberships(&[o(0.0, Membership::Finite), o(1.0, Membership::Infinite)]),
            None
        );
    }
}
