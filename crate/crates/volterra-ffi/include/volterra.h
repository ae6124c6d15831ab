/*
 * C ABI for the Volterra toolkit: resolvents, three-route solvers, and
 * L^p diagnostics for x'(t) = integral over [0,t] of x(t-s) dnu(s) + f(t).
 *
 * All fallible calls return VlStatus and fill out-parameters only on
 * VL_STATUS_OK; vl_last_error_message() describes the latest failure on the
 * calling thread. Handles are opaque; free each with its vl_*_free, which
 * accepts NULL.
 */

#ifndef VOLTERRA_H
#define VOLTERRA_H

/* Auto-generated by the volterra-ffi build script from src/lib.rs; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Judgement of one equivalence experiment.
typedef enum VlCaseVerdict {
  VL_CASE_VERDICT_PASS = 0,
  VL_CASE_VERDICT_FAIL = 1,
  VL_CASE_VERDICT_INCONCLUSIVE = 2,
} VlCaseVerdict;

// Integrability verdict on a resolvent.
typedef enum VlIntegrability {
  VL_INTEGRABILITY_INTEGRABLE = 0,
  VL_INTEGRABILITY_SUSPECT_NONINTEGRABLE = 1,
  VL_INTEGRABILITY_INTEGRABILITY_UNCLEAR = 2,
} VlIntegrability;

// Truncated-norm classification of a function's L^p membership.
typedef enum VlMembership {
  VL_MEMBERSHIP_FINITE = 0,
  VL_MEMBERSHIP_INFINITE = 1,
  VL_MEMBERSHIP_INCONCLUSIVE = 2,
} VlMembership;

// Which of the three solution routes to read.
typedef enum VlRoute {
  // Trapezoidal stepping of the integrodifferential equation.
  VL_ROUTE_DIRECT = 0,
  // Variation of constants: x = r·ξ + r∗f.
  VL_ROUTE_VARIATION_OF_CONSTANTS = 1,
  // Reconstruction through the forcing decomposition.
  VL_ROUTE_DECOMPOSITION = 2,
} VlRoute;

// Result of every fallible API call.
typedef enum VlStatus {
  // The call succeeded and all out-parameters are filled.
  VL_STATUS_OK = 0,
  // A required pointer argument was null.
  VL_STATUS_NULL_ARGUMENT = 1,
  // A numeric argument was non-finite, out of range, or a buffer was too
  // small.
  VL_STATUS_INVALID_ARGUMENT = 2,
  // A string argument was not valid UTF-8.
  VL_STATUS_INVALID_UTF8 = 3,
  // A JSON description failed to parse or validate.
  VL_STATUS_INVALID_CONFIG = 4,
  // The computation itself failed (non-finite values, diverged state).
  VL_STATUS_EVALUATION_FAILED = 5,
  // An internal invariant broke; the library caught the panic at the
  // boundary. Treat the involved handles as poisoned and free them.
  VL_STATUS_PANIC = 6,
} VlStatus;

// A forcing term with an exact window-integral engine. Opaque.
typedef struct VlForcing VlForcing;

// A finite signed measure (atoms plus an optional density). Opaque.
typedef struct VlMeasure VlMeasure;

// A computed differential resolvent with its L¹ diagnostics. Opaque.
typedef struct VlResolvent VlResolvent;

// Solutions of one forced problem along three routes. Opaque.
typedef struct VlSolution VlSolution;

// Outcome of an equivalence experiment: the verdict plus the two observed
// classifications (window averages vs. solutions).
typedef struct VlTheoremReport {
  enum VlCaseVerdict verdict;
  // Classification of the forcing's interval averages; `Inconclusive`
  // when the integrability gate aborts the case.
  enum VlMembership side_a;
  // Classification of the solutions across initial values; `Inconclusive`
  // when the gate aborts or the heuristic cannot settle.
  enum VlMembership side_b;
} VlTheoremReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the library as a static NUL-terminated string.
const char *vl_version(void);

// Message of the most recent failure on the calling thread, as a
// NUL-terminated string. Empty until a call fails. The pointer stays valid
// until the next failing call on the same thread.
const char *vl_last_error_message(void);

// Builds a measure from its JSON description, e.g.
// `{"atoms":[{"location":0.0,"weight":-1.0}],
//   "density":{"kind":"exp_decay","coefficient":-1.0,"rate":1.0,"s_max":40.0}}`.
//
// On success writes a handle to `out`; free it with `vl_measure_free`.
//
// # Safety
// `json` must point to a NUL-terminated string; `out` must be a valid
// pointer to pointer-sized storage.
enum VlStatus vl_measure_from_json(const char *json, struct VlMeasure **out);

// Frees a measure handle. Accepts null.
//
// # Safety
// `measure` must be null or a pointer obtained from `vl_measure_from_json`
// that has not been freed yet.
void vl_measure_free(struct VlMeasure *measure);

// Builds a forcing from its JSON description, e.g.
// `{"kind":"osc_growth","alpha":1.0,"beta":2.0}` or
// `{"kind":"lp_member","name":"exp_decay","rate":1.0}`.
//
// On success writes a handle to `out`; free it with `vl_forcing_free`.
//
// # Safety
// `json` must point to a NUL-terminated string; `out` must be a valid
// pointer to pointer-sized storage.
enum VlStatus vl_forcing_from_json(const char *json, struct VlForcing **out);

// Frees a forcing handle. Accepts null.
//
// # Safety
// `forcing` must be null or a pointer obtained from `vl_forcing_from_json`
// that has not been freed yet.
void vl_forcing_free(struct VlForcing *forcing);

// Evaluates the forcing at `t ≥ 0` and writes the value to `out`.
//
// # Safety
// `forcing` must be a live handle; `out` must point to a double.
enum VlStatus vl_forcing_eval(const struct VlForcing *forcing, double t, double *out);

// Writes `∫_a^b f(s) ds` to `out`, computed by the exact window engine
// (negative when `b < a`; the integrand is treated as 0 for `s < 0`).
//
// # Safety
// `forcing` must be a live handle; `out` must point to a double.
enum VlStatus vl_forcing_window_integral(const struct VlForcing *forcing,
                                         double a,
                                         double b,
                                         double *out);

// Classifies the forcing's interval averages in L^p on the uniform grid
// `(h, t_end)`: sweeps window lengths θ over the default grid, evaluates
// the truncated functionals of `F(t;θ) = ∫_t^{t+θ} f`, and writes the
// overall membership to `out_membership` and the largest functional to
// `out_sup_phi` (either pointer may be null to skip that output, but not
// both).
//
// # Safety
// `forcing` must be a live handle; non-null out-pointers must be valid.
enum VlStatus vl_forcing_classify_averages(const struct VlForcing *forcing,
                                           double p,
                                           double h,
                                           double t_end,
                                           enum VlMembership *out_membership,
                                           double *out_sup_phi);

// Computes the differential resolvent of `measure` on the uniform grid
// `(h, t_end)`. On success writes a handle to `out`; free it with
// `vl_resolvent_free`.
//
// # Safety
// `measure` must be a live handle; `out` must be a valid pointer to
// pointer-sized storage.
enum VlStatus vl_resolvent_compute(const struct VlMeasure *measure,
                                   double h,
                                   double t_end,
                                   struct VlResolvent **out);

// Frees a resolvent handle. Accepts null.
//
// # Safety
// `resolvent` must be null or a pointer obtained from
// `vl_resolvent_compute` that has not been freed yet.
void vl_resolvent_free(struct VlResolvent *resolvent);

// Number of grid nodes in the resolvent (0 for a null handle).
//
// # Safety
// `resolvent` must be null or a live handle.
size_t vl_resolvent_len(const struct VlResolvent *resolvent);

// Copies the resolvent values `r(t_i)` into `buf`. `capacity` is the number
// of doubles `buf` can hold; it must be at least `vl_resolvent_len`.
//
// # Safety
// `resolvent` must be a live handle; `buf` must point to at least
// `capacity` doubles.
enum VlStatus vl_resolvent_values(const struct VlResolvent *resolvent,
                                  double *buf,
                                  size_t capacity);

// Copies the derivative values `r'(t_i)` into `buf` (same contract as
// `vl_resolvent_values`).
//
// # Safety
// `resolvent` must be a live handle; `buf` must point to at least
// `capacity` doubles.
enum VlStatus vl_resolvent_derivative_values(const struct VlResolvent *resolvent,
                                             double *buf,
                                             size_t capacity);

// Writes `∫_0^T |r|` (composite trapezoid) to `out`.
//
// # Safety
// `resolvent` must be a live handle; `out` must point to a double.
enum VlStatus vl_resolvent_l1_truncated(const struct VlResolvent *resolvent, double *out);

// Writes the integrability verdict on the resolvent to `out`.
//
// # Safety
// `resolvent` must be a live handle; `out` must point to storage for one
// `VlIntegrability` value.
enum VlStatus vl_resolvent_integrability(const struct VlResolvent *resolvent,
                                         enum VlIntegrability *out);

// Solves `x' = (ν∗x) + f`, `x(0) = ξ` on the uniform grid `(h, t_end)` by
// all three routes and writes a handle to `out`; free it with
// `vl_solution_free`. The routes' pairwise sup-norm gaps are available from
// the agreement getters and double as an error estimate.
//
// # Safety
// `measure` and `forcing` must be live handles; `out` must be a valid
// pointer to pointer-sized storage.
enum VlStatus vl_solve(const struct VlMeasure *measure,
                       const struct VlForcing *forcing,
                       double xi,
                       double h,
                       double t_end,
                       struct VlSolution **out);

// Frees a solution handle. Accepts null.
//
// # Safety
// `solution` must be null or a pointer obtained from `vl_solve` that has
// not been freed yet.
void vl_solution_free(struct VlSolution *solution);

// Number of grid nodes in the solution (0 for a null handle).
//
// # Safety
// `solution` must be null or a live handle.
size_t vl_solution_len(const struct VlSolution *solution);

// Copies the values `x(t_i)` of one route into `buf`. `route` takes a
// `VlRoute` constant; `capacity` is the number of doubles `buf` can hold
// and must be at least `vl_solution_len`.
//
// # Safety
// `solution` must be a live handle; `buf` must point to at least
// `capacity` doubles.
enum VlStatus vl_solution_values(const struct VlSolution *solution,
                                 int route,
                                 double *buf,
                                 size_t capacity);

// Writes `sup|x_direct − x_voc|` to `out`.
//
// # Safety
// `solution` must be a live handle; `out` must point to a double.
enum VlStatus vl_solution_agreement_direct_voc(const struct VlSolution *solution, double *out);

// Writes `sup|x_voc − x_key2|` to `out`.
//
// # Safety
// `solution` must be a live handle; `out` must point to a double.
enum VlStatus vl_solution_agreement_voc_key2(const struct VlSolution *solution, double *out);

// Classifies one route's trajectory in L^p by the truncated-norm heuristic
// and writes the verdict to `out`. `route` takes a `VlRoute` constant.
//
// # Safety
// `solution` must be a live handle; `out` must point to storage for one
// `VlMembership` value.
enum VlStatus vl_solution_classify(const struct VlSolution *solution,
                                   int route,
                                   double p,
                                   enum VlMembership *out);

// Runs one equivalence experiment end to end on the uniform grid
// `(h, t_end)`: classifies the forcing's interval averages (side A) and the
// solutions for ξ ∈ {0, 1, 10} (side B), checks the identity residuals,
// and writes the report to `out`. Uses the default window-length grid,
// thresholds, and identity tolerances; `Inconclusive` sides mean the
// integrability gate aborted or the truncation heuristic could not settle.
//
// # Safety
// `measure` and `forcing` must be live handles; `out` must point to storage
// for one `VlTheoremReport`.
enum VlStatus vl_theorem_check(const struct VlMeasure *measure,
                               const struct VlForcing *forcing,
                               double p,
                               double h,
                               double t_end,
                               struct VlTheoremReport *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* VOLTERRA_H */
