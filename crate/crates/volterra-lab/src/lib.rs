//! A workbench for scalar linear convolution Volterra integrodifferential
//! equations
//!
//! ```text
//! x'(t) = ∫_{[0,t]} ν(ds) x(t−s) + f(t),   x(0) = ξ,   t ≥ 0,
//! ```
//!
//! where ν is a finite signed measure (point masses plus a density) and f is
//! a locally integrable forcing. The crate computes the differential
//! resolvent, solves the forced equation along three independent routes,
//! decomposes the forcing through its running integral, and probes the
//! equivalence between two integrability statements:
//!
//! * **Condition (A)** — every interval average `F(t;θ) = ∫_t^{t+θ} f` with
//!   `θ ∈ (0,1]` lies in `L^p(ℝ₊)`;
//! * **Condition (B)** — the solution `x` lies in `L^p(ℝ₊)` for every
//!   initial value ξ,
//!
//! which coincide whenever the resolvent is integrable. Everything here is
//! finite-horizon numerics: classifications are truncation heuristics with
//! explicit thresholds, reported as `finite / infinite / inconclusive`
//! rather than proofs.
//!
//! Module map:
//!
//! * [`grid`] — uniform meshes and sampled trajectories;
//! * [`quad`] — trapezoid rules, cumulative integrals, Gauss–Legendre panels;
//! * [`measure`] — the kernel ν: atoms, densities, total variation,
//!   convolution, and the split form used by implicit steppers;
//! * [`oscgrowth`] — exact oscillatory window integrals for
//!   `f(t) = e^{αt} sin(e^{βt})`;
//! * [`forcing`] — the forcing registry, window integrals, interval
//!   averages, and the `f = f1 + f2`, `f3` decomposition;
//! * [`resolvent`] — the differential resolvent and its integrability
//!   heuristic;
//! * [`solver`] — the three solution routes and the integrated-equation
//!   residual;
//! * [`norms`] — truncated `L^p` functionals and membership classification;
//! * [`fit`] — least-squares envelope fits shared by the heuristics;
//! * [`config`] — JSON job descriptions for the command-line tool;
//! * [`report`] — deterministic CSV/SVG/JSON artifact writers;
//! * [`harness`] — per-case experiment orchestration, verdicts, and the
//!   shipped equivalence suite.

pub mod config;
pub mod error;
pub mod fit;
pub mod forcing;
pub mod grid;
pub mod harness;
pub mod measure;
pub mod norms;
pub mod oscgrowth;
pub mod quad;
pub mod report;
pub mod resolvent;
pub mod solver;

pub use error::{Error, Result};
