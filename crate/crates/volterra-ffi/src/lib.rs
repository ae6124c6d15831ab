//! C ABI over the Volterra toolkit.
//!
//! Design rules:
//! - **Opaque handles**: `VlMeasure`, `VlForcing`, `VlResolvent`, `VlSolution`
//!   own their data and are only ever touched through pointers. Free each
//!   with its matching `vl_*_free`; the free functions accept null.
//! - **Status codes, no exceptions**: every fallible entry point returns
//!   [`VlStatus`] and writes results through out-pointers only on
//!   `VL_STATUS_OK`. The text behind the most recent failure on the calling
//!   thread is available from [`vl_last_error_message`].
//! - **Panic-proof**: unwinds are caught at the boundary and reported as
//!   `VL_STATUS_PANIC` instead of crossing into C.
//! - **JSON-described inputs**: measures and forcings are built from the
//!   same JSON schema the CLI uses, so one description works everywhere.
//!
//! The generated header lives at `include/volterra.h` and is refreshed by
//! the build script whenever this file changes.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use volterra_lab::config::{ForcingConfig, MeasureConfig, ToleranceConfig};
use volterra_lab::forcing::ForcingFunction;
use volterra_lab::grid::Grid;
use volterra_lab::harness::{run_case, CaseSpec, CaseVerdict};
use volterra_lab::measure::Measure;
use volterra_lab::norms::{
    classify_membership, condition_a_report, default_theta_grid, ClassifyThresholds, Membership,
};
use volterra_lab::resolvent::{solve_resolvent, L1Verdict, ResolventResult};
use volterra_lab::solver::{solve_bundle, SolutionBundle, SolveConfig};
use volterra_lab::Error;

/// Result of every fallible API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlStatus {
    /// The call succeeded and all out-parameters are filled.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A numeric argument was non-finite, out of range, or a buffer was too
    /// small.
    InvalidArgument = 2,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 3,
    /// A JSON description failed to parse or validate.
    InvalidConfig = 4,
    /// The computation itself failed (non-finite values, diverged state).
    EvaluationFailed = 5,
    /// An internal invariant broke; the library caught the panic at the
    /// boundary. Treat the involved handles as poisoned and free them.
    Panic = 6,
}

/// Truncated-norm classification of a function's L^p membership.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlMembership {
    Finite = 0,
    Infinite = 1,
    Inconclusive = 2,
}

/// Integrability verdict on a resolvent.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlIntegrability {
    Integrable = 0,
    SuspectNonintegrable = 1,
    IntegrabilityUnclear = 2,
}

/// Judgement of one equivalence experiment.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlCaseVerdict {
    Pass = 0,
    Fail = 1,
    Inconclusive = 2,
}

/// Which of the three solution routes to read.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlRoute {
    /// Trapezoidal stepping of the integrodifferential equation.
    Direct = 0,
    /// Variation of constants: x = r·ξ + r∗f.
    VariationOfConstants = 1,
    /// Reconstruction through the forcing decomposition.
    Decomposition = 2,
}

/// Outcome of an equivalence experiment: the verdict plus the two observed
/// classifications (window averages vs. solutions).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VlTheoremReport {
    pub verdict: VlCaseVerdict,
    /// Classification of the forcing's interval averages; `Inconclusive`
    /// when the integrability gate aborts the case.
    pub side_a: VlMembership,
    /// Classification of the solutions across initial values; `Inconclusive`
    /// when the gate aborts or the heuristic cannot settle.
    pub side_b: VlMembership,
}

/// A finite signed measure (atoms plus an optional density). Opaque.
pub struct VlMeasure {
    inner: Measure,
}

/// A forcing term with an exact window-integral engine. Opaque.
pub struct VlForcing {
    inner: ForcingFunction,
}

/// A computed differential resolvent with its L¹ diagnostics. Opaque.
pub struct VlResolvent {
    inner: ResolventResult,
}

/// Solutions of one forced problem along three routes. Opaque.
pub struct VlSolution {
    bundle: SolutionBundle,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg: String = msg.into();
    let safe = CString::new(msg.replace('\0', "␀")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = safe);
}

fn status_of(err: &Error) -> VlStatus {
    match err {
        Error::Domain(_) => VlStatus::InvalidArgument,
        Error::Config(_) | Error::Json(_) => VlStatus::InvalidConfig,
        Error::Evaluation(_) | Error::Io(_) => VlStatus::EvaluationFailed,
    }
}

fn fail(err: &Error) -> VlStatus {
    set_last_error(err.to_string());
    status_of(err)
}

/// Run `f` with a panic guard; a caught unwind becomes `VL_STATUS_PANIC`.
fn guarded(f: impl FnOnce() -> VlStatus) -> VlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic payload".to_string());
            set_last_error(format!("internal panic: {msg}"));
            VlStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or point to a NUL-terminated string.
unsafe fn utf8_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, VlStatus> {
    if ptr.is_null() {
        set_last_error(format!("{what} must not be null"));
        return Err(VlStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error(format!("{what} is not valid UTF-8"));
        VlStatus::InvalidUtf8
    })
}

fn require_out<T>(ptr: *mut T, what: &str) -> Result<(), VlStatus> {
    if ptr.is_null() {
        set_last_error(format!("{what} must not be null"));
        return Err(VlStatus::NullArgument);
    }
    Ok(())
}

unsafe fn require_handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, VlStatus> {
    if ptr.is_null() {
        set_last_error(format!("{what} must not be null"));
        return Err(VlStatus::NullArgument);
    }
    Ok(&*ptr)
}

fn build_grid(h: f64, t_end: f64) -> Result<Grid, VlStatus> {
    Grid::new(h, t_end).map_err(|e| fail(&e))
}

fn membership_out(m: Membership) -> VlMembership {
    match m {
        Membership::Finite => VlMembership::Finite,
        Membership::Infinite => VlMembership::Infinite,
        Membership::Inconclusive => VlMembership::Inconclusive,
    }
}

// ---------------------------------------------------------------------------
// Library metadata and error reporting
// ---------------------------------------------------------------------------

/// Version of the library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent failure on the calling thread, as a
/// NUL-terminated string. Empty until a call fails. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

/// Builds a measure from its JSON description, e.g.
/// `{"atoms":[{"location":0.0,"weight":-1.0}],
///   "density":{"kind":"exp_decay","coefficient":-1.0,"rate":1.0,"s_max":40.0}}`.
///
/// On success writes a handle to `out`; free it with `vl_measure_free`.
///
/// # Safety
/// `json` must point to a NUL-terminated string; `out` must be a valid
/// pointer to pointer-sized storage.
#[no_mangle]
pub unsafe extern "C" fn vl_measure_from_json(
    json: *const c_char,
    out: *mut *mut VlMeasure,
) -> VlStatus {
    guarded(|| {
        if let Err(s) = require_out(out, "out") {
            return s;
        }
        let text = match utf8_arg(json, "json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let config: MeasureConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return fail(&Error::from(e)),
        };
        match config.build() {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(VlMeasure { inner }));
                VlStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Frees a measure handle. Accepts null.
///
/// # Safety
/// `measure` must be null or a pointer obtained from `vl_measure_from_json`
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn vl_measure_free(measure: *mut VlMeasure) {
    if !measure.is_null() {
        drop(Box::from_raw(measure));
    }
}

// ---------------------------------------------------------------------------
// Forcings
// ---------------------------------------------------------------------------

/// Builds a forcing from its JSON description, e.g.
/// `{"kind":"osc_growth","alpha":1.0,"beta":2.0}` or
/// `{"kind":"lp_member","name":"exp_decay","rate":1.0}`.
///
/// On success writes a handle to `out`; free it with `vl_forcing_free`.
///
/// # Safety
/// `json` must point to a NUL-terminated string; `out` must be a valid
/// pointer to pointer-sized storage.
#[no_mangle]
pub unsafe extern "C" fn vl_forcing_from_json(
    json: *const c_char,
    out: *mut *mut VlForcing,
) -> VlStatus {
    guarded(|| {
        if let Err(s) = require_out(out, "out") {
            return s;
        }
        let text = match utf8_arg(json, "json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let config: ForcingConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return fail(&Error::from(e)),
        };
        match config.build() {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(VlForcing { inner }));
                VlStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Frees a forcing handle. Accepts null.
///
/// # Safety
/// `forcing` must be null or a pointer obtained from `vl_forcing_from_json`
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn vl_forcing_free(forcing: *mut VlForcing) {
    if !forcing.is_null() {
        drop(Box::from_raw(forcing));
    }
}

/// Evaluates the forcing at `t ≥ 0` and writes the value to `out`.
///
/// # Safety
/// `forcing` must be a live handle; `out` must point to a double.
#[no_mangle]
pub unsafe extern "C" fn vl_forcing_eval(
    forcing: *const VlForcing,
    t: f64,
    out: *mut f64,
) -> VlStatus {
    guarded(|| {
        let handle = match require_handle(forcing, "forcing") {
            Ok(h) => h,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out, "out") {
            return s;
        }
        match handle.inner.eval(t) {
            Ok(v) => {
                *out = v;
                VlStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Writes `∫_a^b f(s) ds` to `out`, computed by the exact window engine
/// (negative when `b < a`; the integrand is treated as 0 for `s < 0`).
///
/// # Safety
/// `forcing` must be a live handle; `out` must point to a double.
#[no_mangle]
pub unsafe extern "C" fn vl_forcing_window_integral(
    forcing: *const VlForcing,
    a: f64,
    b: f64,
    out: *mut f64,
) -> VlStatus {
    guarded(|| {
        let handle = match require_handle(forcing, "forcing") {
            Ok(h) => h,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out, "out") {
            return s;
        }
        match handle.inner.window_integral(a, b) {
            Ok(v) => {
                *out = v;
                VlStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Classifies the forcing's interval averages in L^p on the uniform grid
/// `(h, t_end)`: sweeps window lengths θ over the default grid, evaluates
/// the truncated functionals of `F(t;θ) = ∫_t^{t+θ} f`, and writes the
/// overall membership to `out_membership` and the largest functional to
/// `out_sup_phi` (either pointer may be null to skip that output, but not
/// both).
///
/// # Safety
/// `forcing` must be a live handle; non-null out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vl_forcing_classify_averages(
    forcing: *const VlForcing,
    p: f64,
    h: f64,
    t_end: f64,
    out_membership: *mut VlMembership,
    out_sup_phi: *mut f64,
) -> VlStatus {
    guarded(|| {
        let handle = match require_handle(forcing, "forcing") {
            Ok(h) => h,
            Err(s) => return s,
        };
        if out_membership.is_null() && out_sup_phi.is_null() {
            set_last_error("at least one output pointer must be non-null");
            return VlStatus::NullArgument;
        }
        let grid = match build_grid(h, t_end) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let report = match condition_a_report(
            &handle.inner,
            p,
            grid,
            &default_theta_grid(),
            &ClassifyThresholds::default(),
        ) {
            Ok(r) => r,
            Err(e) => return fail(&e),
        };
        if !out_membership.is_null() {
            *out_membership = membership_out(report.classification);
        }
        if !out_sup_phi.is_null() {
            *out_sup_phi = report.sup_phi;
        }
        VlStatus::Ok
    })
}

// ---------------------------------------------------------------------------
// Resolvents
// ---------------------------------------------------------------------------

/// Computes the differential resolvent of `measure` on the uniform grid
/// `(h, t_end)`. On success writes a handle to `out`; free it with
/// `vl_resolvent_free`.
///
/// # Safety
/// `measure` must be a live handle; `out` must be a valid pointer to
/// pointer-sized storage.
#[no_mangle]
pub unsafe extern "C" fn vl_resolvent_compute(
    measure: *const VlMeasure,
    h: f64,
    t_end: f64,
    out: *mut *mut VlResolvent,
) -> VlStatus {
    guarded(|| {
        let handle = match require_handle(measure, "measure") {
            Ok(m) => m,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out, "out") {
            return s;
        }
        let grid = match build_grid(h, t_end) {
            Ok(g) => g,
            Err(s) => return s,
        };
        match solve_resolvent(&handle.inner, grid) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(VlResolvent { inner }));
                VlStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Frees a resolvent handle. Accepts null.
///
/// # Safety
/// `resolvent` must be null or a pointer obtained from
/// `vl_resolvent_compute` that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn vl_resolvent_free(resolvent: *mut VlResolvent) {
    if !resolvent.is_null() {
        drop(Box::from_raw(resolvent));
    }
}

/// Number of grid nodes in the resolvent (0 for a null handle).
///
/// # Safety
/// `resolvent` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vl_resolvent_len(resolvent: *const VlResolvent) -> usize {
    if resolvent.is_null() {
        0
    } else {
        (*resolvent).inner.r.values().len()
    }
}

unsafe fn copy_values(values: &[f64], buf: *mut f64, capacity: usize) -> VlStatus {
    if buf.is_null() {
        set_last_error("buf must not be null");
        return VlStatus::NullArgument;
    }
    if capacity < values.len() {
        set_last_error(format!(
            "buffer holds {capacity} doubles but {} are required",
            values.len()
        ));
        return VlStatus::InvalidArgument;
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    VlStatus::Ok
}

/// Copies the resolvent values `r(t_i)` into `buf`. `capacity` is the number
/// of doubles `buf` can hold; it must be at least `vl_resolvent_len`.
///
/// # Safety
/// `resolvent` must be a live handle; `buf` must point to at least
/// `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn vl_resolvent_values(
    resolvent: *const VlResolvent,
    buf: *mut f64,
    capacity: usize,
) -> VlStatus {
    guarded(|| {
        let handle = match require_handle(resolvent, "resolvent") {
            Ok(r) => r,
            Err(s) => return s,
        };
        copy_values(handle.inner.r.values(), buf, capacity)
    })
}

/// Copies the derivative values `r'(t_i)` into `buf` (same contract as
/// `vl_resolvent_values`).
///
/// # Safety
/// `resolvent` must be a live handle; `buf` must point to at least
/// `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn vl_resolvent_derivative_values(
    resolvent: *const VlResolvent,
    buf: *mut f64,
    capacity: usize,
) -> VlStatus {
    guarded(|| {
        let handle = match require_handle(resolvent, "resolvent") {
            Ok(r) => r,
            Err(s) => return s,
        };
        copy_values(handle.inner.r_prime.values(), buf, capacity)
    })
}

/// Writes `∫_0^T |r|` (composite trapezoid) to `out`.
///
/// # Safety
/// `resolvent` must be a live handle; `out` must point to a double.
#[no_mangle]
pub unsafe extern "C" fn vl_resolvent_l1_truncated(
    resolvent: *const VlResolvent,
    out: *mut f64,
) -> VlStatus {
    guarded(|| {
        let handle = match require_handle(resolvent, "resolvent") {
            Ok(r) => r,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out, "out") {
            return s;
        }
        *out = handle.inner.l1_truncated;
        VlStatus::Ok
    })
}

/// Writes the integrability verdict on the resolvent to `out`.
///
/// # Safety
/// `resolvent` must be a live handle; `out` must point to storage for one
/// `VlIntegrability` value.
#[no_mangle]
pub unsafe extern "C" fn vl_resolvent_integrability(
    resolvent: *const VlResolvent,
    out: *mut VlIntegrability,
) -> VlStatus {
    guarded(|| {
        let handle = match require_handle(resolvent, "resolvent") {
            Ok(r) => r,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out, "out") {
            return s;
        }
        *out = match handle.inner.l1_verdict {
            L1Verdict::Integrable => VlIntegrability::Integrable,
            L1Verdict::SuspectNonintegrable => VlIntegrability::SuspectNonintegrable,
            L1Verdict::Inconclusive => VlIntegrability::IntegrabilityUnclear,
        };
        VlStatus::Ok
    })
}

// ---------------------------------------------------------------------------
// Solutions
// ---------------------------------------------------------------------------

/// Solves `x' = (ν∗x) + f`, `x(0) = ξ` on the uniform grid `(h, t_end)` by
/// all three routes and writes a handle to `out`; free it with
/// `vl_solution_free`. The routes' pairwise sup-norm gaps are available from
/// the agreement getters and double as an error estimate.
///
/// # Safety
/// `measure` and `forcing` must be live handles; `out` must be a valid
/// pointer to pointer-sized storage.
#[no_mangle]
pub unsafe extern "C" fn vl_solve(
    measure: *const VlMeasure,
    forcing: *const VlForcing,
    xi: f64,
    h: f64,
    t_end: f64,
    out: *mut *mut VlSolution,
) -> VlStatus {
    guarded(|| {
        let measure = match require_handle(measure, "measure") {
            Ok(m) => m,
            Err(s) => return s,
        };
        let forcing = match require_handle(forcing, "forcing") {
            Ok(f) => f,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out, "out") {
            return s;
        }
        let grid = match build_grid(h, t_end) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let cfg = match SolveConfig::new(measure.inner.clone(), forcing.inner.clone(), xi, grid) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        };
        let result = (|| {
            let res = solve_resolvent(&cfg.measure, grid)?;
            let dec = cfg.forcing.decompose(grid)?;
            solve_bundle(&cfg, &res, &dec)
        })();
        match result {
            Ok(bundle) => {
                *out = Box::into_raw(Box::new(VlSolution { bundle }));
                VlStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Frees a solution handle. Accepts null.
///
/// # Safety
/// `solution` must be null or a pointer obtained from `vl_solve` that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn vl_solution_free(solution: *mut VlSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Number of grid nodes in the solution (0 for a null handle).
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vl_solution_len(solution: *const VlSolution) -> usize {
    if solution.is_null() {
        0
    } else {
        (*solution).bundle.x_voc.values().len()
    }
}

fn route_values(bundle: &SolutionBundle, route: c_int) -> Option<&[f64]> {
    match route {
        r if r == VlRoute::Direct as c_int => Some(bundle.x_direct.values()),
        r if r == VlRoute::VariationOfConstants as c_int => Some(bundle.x_voc.values()),
        r if r == VlRoute::Decomposition as c_int => Some(bundle.x_key2.values()),
        _ => None,
    }
}

/// Copies the values `x(t_i)` of one route into `buf`. `route` takes a
/// `VlRoute` constant; `capacity` is the number of doubles `buf` can hold
/// and must be at least `vl_solution_len`.
///
/// # Safety
/// `solution` must be a live handle; `buf` must point to at least
/// `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn vl_solution_values(
    solution: *const VlSolution,
    route: c_int,
    buf: *mut f64,
    capacity: usize,
) -> VlStatus {
    guarded(|| {
        let handle = match require_handle(solution, "solution") {
            Ok(x) => x,
            Err(s) => return s,
        };
        match route_values(&handle.bundle, route) {
            Some(values) => copy_values(values, buf, capacity),
            None => {
                set_last_error(format!("unknown route {route}; pass a VlRoute constant"));
                VlStatus::InvalidArgument
            }
        }
    })
}

/// Writes `sup|x_direct − x_voc|` to `out`.
///
/// # Safety
/// `solution` must be a live handle; `out` must point to a double.
#[no_mangle]
pub unsafe extern "C" fn vl_solution_agreement_direct_voc(
    solution: *const VlSolution,
    out: *mut f64,
) -> VlStatus {
    guarded(|| {
        let handle = match require_handle(solution, "solution") {
            Ok(x) => x,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out, "out") {
            return s;
        }
        *out = handle.bundle.agreement_direct_voc;
        VlStatus::Ok
    })
}

/// Writes `sup|x_voc − x_key2|` to `out`.
///
/// # Safety
/// `solution` must be a live handle; `out` must point to a double.
#[no_mangle]
pub unsafe extern "C" fn vl_solution_agreement_voc_key2(
    solution: *const VlSolution,
    out: *mut f64,
) -> VlStatus {
    guarded(|| {
        let handle = match require_handle(solution, "solution") {
            Ok(x) => x,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out, "out") {
            return s;
        }
        *out = handle.bundle.agreement_voc_key2;
        VlStatus::Ok
    })
}

/// Classifies one route's trajectory in L^p by the truncated-norm heuristic
/// and writes the verdict to `out`. `route` takes a `VlRoute` constant.
///
/// # Safety
/// `solution` must be a live handle; `out` must point to storage for one
/// `VlMembership` value.
#[no_mangle]
pub unsafe extern "C" fn vl_solution_classify(
    solution: *const VlSolution,
    route: c_int,
    p: f64,
    out: *mut VlMembership,
) -> VlStatus {
    guarded(|| {
        let handle = match require_handle(solution, "solution") {
            Ok(x) => x,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out, "out") {
            return s;
        }
        let traj = match route {
            r if r == VlRoute::Direct as c_int => &handle.bundle.x_direct,
            r if r == VlRoute::VariationOfConstants as c_int => &handle.bundle.x_voc,
            r if r == VlRoute::Decomposition as c_int => &handle.bundle.x_key2,
            _ => {
                set_last_error(format!("unknown route {route}; pass a VlRoute constant"));
                return VlStatus::InvalidArgument;
            }
        };
        match classify_membership(traj, p, &ClassifyThresholds::default()) {
            Ok(m) => {
                *out = membership_out(m);
                VlStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

// ---------------------------------------------------------------------------
// The equivalence experiment
// ---------------------------------------------------------------------------

/// Runs one equivalence experiment end to end on the uniform grid
/// `(h, t_end)`: classifies the forcing's interval averages (side A) and the
/// solutions for ξ ∈ {0, 1, 10} (side B), checks the identity residuals,
/// and writes the report to `out`. Uses the default window-length grid,
/// thresholds, and identity tolerances; `Inconclusive` sides mean the
/// integrability gate aborted or the truncation heuristic could not settle.
///
/// # Safety
/// `measure` and `forcing` must be live handles; `out` must point to storage
/// for one `VlTheoremReport`.
#[no_mangle]
pub unsafe extern "C" fn vl_theorem_check(
    measure: *const VlMeasure,
    forcing: *const VlForcing,
    p: f64,
    h: f64,
    t_end: f64,
    out: *mut VlTheoremReport,
) -> VlStatus {
    guarded(|| {
        let measure = match require_handle(measure, "measure") {
            Ok(m) => m,
            Err(s) => return s,
        };
        let forcing = match require_handle(forcing, "forcing") {
            Ok(f) => f,
            Err(s) => return s,
        };
        if let Err(s) = require_out(out, "out") {
            return s;
        }
        let grid = match build_grid(h, t_end) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let spec = CaseSpec {
            name: "ffi case".to_string(),
            measure: measure.inner.clone(),
            forcing: forcing.inner.clone(),
            xi_list: vec![0.0, 1.0, 10.0],
            p,
            grid,
            theta_grid: default_theta_grid(),
            thresholds: ClassifyThresholds::default(),
            expected: None,
            expect_inconclusive: false,
            tolerances: ToleranceConfig::default(),
        };
        match run_case(&spec) {
            Ok(output) => {
                let r = &output.result;
                *out = VlTheoremReport {
                    verdict: match r.verdict {
                        CaseVerdict::Pass => VlCaseVerdict::Pass,
                        CaseVerdict::Fail => VlCaseVerdict::Fail,
                        CaseVerdict::Inconclusive => VlCaseVerdict::Inconclusive,
                    },
                    side_a: r
                        .observed_a
                        .map_or(VlMembership::Inconclusive, membership_out),
                    side_b: r
                        .observed_b_case
                        .map_or(VlMembership::Inconclusive, membership_out),
                };
                VlStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn measure_from(json: &str) -> *mut VlMeasure {
        let mut handle: *mut VlMeasure = ptr::null_mut();
        let status = vl_measure_from_json(cstr(json).as_ptr(), &mut handle);
        assert_eq!(status, VlStatus::Ok, "measure json: {json}");
        assert!(!handle.is_null());
        handle
    }

    unsafe fn forcing_from(json: &str) -> *mut VlForcing {
        let mut handle: *mut VlForcing = ptr::null_mut();
        let status = vl_forcing_from_json(cstr(json).as_ptr(), &mut handle);
        assert_eq!(status, VlStatus::Ok, "forcing json: {json}");
        assert!(!handle.is_null());
        handle
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(vl_last_error_message()).to_string_lossy().into_owned() }
    }

    #[test]
    fn version_is_a_nonempty_c_string() {
        let v = unsafe { CStr::from_ptr(vl_version()) };
        assert!(!v.to_bytes().is_empty());
    }

    #[test]
    fn resolvent_roundtrip_matches_the_exponential() {
        unsafe {
            let measure = measure_from(r#"{"atoms":[{"location":0.0,"weight":-1.0}]}"#);
            let mut res: *mut VlResolvent = ptr::null_mut();
            assert_eq!(vl_resolvent_compute(measure, 1e-2, 20.0, &mut res), VlStatus::Ok);

            let len = vl_resolvent_len(res);
            assert_eq!(len, 2001);
            let mut values = vec![0.0f64; len];
            assert_eq!(vl_resolvent_values(res, values.as_mut_ptr(), len), VlStatus::Ok);
            for (i, v) in values.iter().enumerate().step_by(200) {
                let t = 1e-2 * i as f64;
                assert!((v - (-t).exp()).abs() < 1e-3, "node {i}");
            }

            let mut l1 = 0.0f64;
            assert_eq!(vl_resolvent_l1_truncated(res, &mut l1), VlStatus::Ok);
            assert!((l1 - 1.0).abs() < 1e-2);

            let mut verdict = VlIntegrability::IntegrabilityUnclear;
            assert_eq!(vl_resolvent_integrability(res, &mut verdict), VlStatus::Ok);
            assert_eq!(verdict, VlIntegrability::Integrable);

            let mut derivative = vec![0.0f64; len];
            assert_eq!(
                vl_resolvent_derivative_values(res, derivative.as_mut_ptr(), len),
                VlStatus::Ok
            );
            // r' = −r for this kernel.
            assert!((derivative[100] + values[100]).abs() < 1e-9);

            vl_resolvent_free(res);
            vl_measure_free(measure);
        }
    }

    #[test]
    fn forcing_eval_and_window_integral_agree_with_closed_forms() {
        unsafe {
            let forcing = forcing_from(r#"{"kind":"lp_member","name":"exp_decay","rate":1.0}"#);
            let mut v = 0.0f64;
            assert_eq!(vl_forcing_eval(forcing, 0.0, &mut v), VlStatus::Ok);
            assert!((v - 1.0).abs() < 1e-15);

            let mut w = 0.0f64;
            assert_eq!(vl_forcing_window_integral(forcing, 0.0, 1.0, &mut w), VlStatus::Ok);
            assert!((w - (1.0 - (-1.0f64).exp())).abs() < 1e-14);

            vl_forcing_free(forcing);
        }
    }

    #[test]
    fn solve_reports_small_route_gaps_and_classifies_decay() {
        unsafe {
            let measure = measure_from(r#"{"atoms":[{"location":0.0,"weight":-1.0}]}"#);
            let forcing = forcing_from(r#"{"kind":"lp_member","name":"exp_decay","rate":1.0}"#);
            let mut sol: *mut VlSolution = ptr::null_mut();
            assert_eq!(vl_solve(measure, forcing, 1.0, 1e-2, 20.0, &mut sol), VlStatus::Ok);

            let len = vl_solution_len(sol);
            assert_eq!(len, 2001);
            let mut dv = 0.0f64;
            let mut vk = 0.0f64;
            assert_eq!(vl_solution_agreement_direct_voc(sol, &mut dv), VlStatus::Ok);
            assert_eq!(vl_solution_agreement_voc_key2(sol, &mut vk), VlStatus::Ok);
            assert!(dv < 1e-3 && vk < 1e-3, "route gaps {dv:.3e}, {vk:.3e}");

            // x(t) = (1 + t)e^{−t} for ξ = 1, f = e^{−t}, kernel −δ₀.
            let mut values = vec![0.0f64; len];
            assert_eq!(
                vl_solution_values(sol, VlRoute::VariationOfConstants as c_int, values.as_mut_ptr(), len),
                VlStatus::Ok
            );
            let t = 5.0f64;
            let exact = (1.0 + t) * (-t).exp();
            assert!((values[500] - exact).abs() < 1e-4);

            for route in [VlRoute::Direct, VlRoute::VariationOfConstants, VlRoute::Decomposition] {
                let mut m = VlMembership::Inconclusive;
                assert_eq!(vl_solution_classify(sol, route as c_int, 2.0, &mut m), VlStatus::Ok);
                assert_eq!(m, VlMembership::Finite);
            }

            let mut m = VlMembership::Inconclusive;
            assert_eq!(
                vl_solution_classify(sol, 99, 2.0, &mut m),
                VlStatus::InvalidArgument,
                "unknown routes must be rejected"
            );

            vl_solution_free(sol);
            vl_forcing_free(forcing);
            vl_measure_free(measure);
        }
    }

    #[test]
    fn average_classification_separates_decay_from_persistence() {
        unsafe {
            let decaying = forcing_from(r#"{"kind":"lp_member","name":"exp_decay","rate":1.0}"#);
            let mut m = VlMembership::Inconclusive;
            let mut sup_phi = -1.0f64;
            assert_eq!(
                vl_forcing_classify_averages(decaying, 2.0, 1e-2, 20.0, &mut m, &mut sup_phi),
                VlStatus::Ok
            );
            assert_eq!(m, VlMembership::Finite);
            assert!(sup_phi > 0.0);
            vl_forcing_free(decaying);

            let persistent = forcing_from(r#"{"kind":"constant","value":1.0}"#);
            assert_eq!(
                vl_forcing_classify_averages(persistent, 2.0, 1e-2, 20.0, &mut m, ptr::null_mut()),
                VlStatus::Ok
            );
            assert_eq!(m, VlMembership::Infinite);
            vl_forcing_free(persistent);
        }
    }

    #[test]
    fn theorem_check_passes_and_gates_the_hypothesis_violation() {
        unsafe {
            let measure = measure_from(r#"{"atoms":[{"location":0.0,"weight":-1.0}]}"#);
            let forcing = forcing_from(r#"{"kind":"lp_member","name":"exp_decay","rate":1.0}"#);
            let mut report = VlTheoremReport {
                verdict: VlCaseVerdict::Fail,
                side_a: VlMembership::Inconclusive,
                side_b: VlMembership::Inconclusive,
            };
            assert_eq!(
                vl_theorem_check(measure, forcing, 2.0, 1e-2, 20.0, &mut report),
                VlStatus::Ok
            );
            assert_eq!(report.verdict, VlCaseVerdict::Pass);
            assert_eq!(report.side_a, VlMembership::Finite);
            assert_eq!(report.side_b, VlMembership::Finite);
            vl_forcing_free(forcing);
            vl_measure_free(measure);

            // ν = 0 cannot pass the integrability gate.
            let zero_measure = measure_from("{}");
            let constant = forcing_from(r#"{"kind":"constant","value":1.0}"#);
            assert_eq!(
                vl_theorem_check(zero_measure, constant, 2.0, 1e-2, 20.0, &mut report),
                VlStatus::Ok
            );
            assert_eq!(report.verdict, VlCaseVerdict::Inconclusive);
            assert_eq!(report.side_a, VlMembership::Inconclusive);
            assert_eq!(report.side_b, VlMembership::Inconclusive);
            vl_forcing_free(constant);
            vl_measure_free(zero_measure);
        }
    }

    #[test]
    fn errors_set_status_and_message() {
        unsafe {
            // Null out-pointer.
            assert_eq!(
                vl_measure_from_json(cstr("{}").as_ptr(), ptr::null_mut()),
                VlStatus::NullArgument
            );
            assert!(!last_error().is_empty());

            // Null json.
            let mut m: *mut VlMeasure = ptr::null_mut();
            assert_eq!(vl_measure_from_json(ptr::null(), &mut m), VlStatus::NullArgument);

            // Invalid UTF-8.
            let bad_bytes = CString::new(vec![0xf0u8, 0x28, 0x8c, 0x28]).unwrap();
            assert_eq!(
                vl_measure_from_json(bad_bytes.as_ptr(), &mut m),
                VlStatus::InvalidUtf8
            );

            // Malformed JSON.
            assert_eq!(
                vl_measure_from_json(cstr("{ not json").as_ptr(), &mut m),
                VlStatus::InvalidConfig
            );
            assert!(last_error().contains("parse"), "message: {}", last_error());

            // Schema violations (unknown field).
            assert_eq!(
                vl_measure_from_json(cstr(r#"{"atom":[]}"#).as_ptr(), &mut m),
                VlStatus::InvalidConfig
            );

            // Bad grid parameters.
            let measure = measure_from(r#"{"atoms":[{"location":0.0,"weight":-1.0}]}"#);
            let mut res: *mut VlResolvent = ptr::null_mut();
            assert_ne!(
                vl_resolvent_compute(measure, -1.0, 20.0, &mut res),
                VlStatus::Ok
            );
            assert!(res.is_null());

            // Undersized buffer.
            assert_eq!(vl_resolvent_compute(measure, 1e-2, 20.0, &mut res), VlStatus::Ok);
            let mut tiny = [0.0f64; 4];
            assert_eq!(
                vl_resolvent_values(res, tiny.as_mut_ptr(), tiny.len()),
                VlStatus::InvalidArgument
            );
            assert!(last_error().contains("buffer"), "message: {}", last_error());

            vl_resolvent_free(res);
            vl_measure_free(measure);

            // Free functions accept null.
            vl_measure_free(ptr::null_mut());
            vl_forcing_free(ptr::null_mut());
            vl_resolvent_free(ptr::null_mut());
            vl_solution_free(ptr::null_mut());
        }
    }
}
