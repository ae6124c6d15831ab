//! Property-based checks of the structural identities the solvers lean on:
//! the exact window-integral engine must be additive over adjacent windows
//! for every forcing kind (the decomposition and the interval averages both
//! assemble large windows from smaller ones), and the direct stepper must be
//! affine in the initial value (the equivalence harness extends per-ξ
//! verdicts through exactly that affinity).

use proptest::prelude::*;

use volterra_lab::forcing::ForcingFunction;
use volterra_lab::grid::Grid;
use volterra_lab::measure::{Atom, Measure};
use volterra_lab::solver::{solve_direct, SolveConfig};

/// A forcing together with the largest horizon on which its window integrals
/// stay O(e^{moderate}) — oscillatory growth is capped so the additivity
/// tolerance below remains meaningful relative to the integrand scale.
fn forcing_strategy() -> impl Strategy<Value = (ForcingFunction, f64)> {
    prop_oneof![
        Just((ForcingFunction::zero(), 20.0)),
        (0.1f64..5.0).prop_map(|v| (ForcingFunction::constant(v).unwrap(), 20.0)),
        (0.1f64..3.0).prop_map(|r| (ForcingFunction::exp_decay(r).unwrap(), 20.0)),
        (0.2f64..2.5).prop_map(|e| (ForcingFunction::power_decay(e).unwrap(), 20.0)),
        ((0.1f64..4.0), (0.2f64..8.0))
            .prop_map(|(a, w)| (ForcingFunction::sinusoid(a, w).unwrap(), 20.0)),
        ((0.1f64..1.5), (1.6f64..3.0))
            .prop_map(|(al, be)| (ForcingFunction::osc_growth(al, be).unwrap(), 6.0)),
        (
            proptest::collection::vec(-2.0f64..2.0, 1..5),
            proptest::collection::vec(0.1f64..1.0, 1..5),
        )
            .prop_map(|(amps, mut widths)| {
                widths.truncate(amps.len());
                let n = widths.len();
                let amps = amps.into_iter().take(n).collect();
                (ForcingFunction::step_train(amps, widths).unwrap(), 20.0)
            }),
        ((0.2f64..3.0), (0.1f64..2.0)).prop_map(|(factor, rate)| {
            (
                ForcingFunction::sum(vec![
                    ForcingFunction::scaled(factor, ForcingFunction::exp_decay(rate).unwrap())
                        .unwrap(),
                    ForcingFunction::sinusoid(1.0, 2.0).unwrap(),
                ]),
                20.0,
            )
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// ∫_a^c f = ∫_a^b f + ∫_b^c f for any a ≤ b ≤ c, for every forcing
    /// kind — including windows that straddle step-train breakpoints and the
    /// oscillatory engine's quadrature/asymptotic seam.
    #[test]
    fn window_integrals_add_over_adjacent_windows(
        (f, cap) in forcing_strategy(),
        u in 0.0f64..1.0,
        v in 0.0f64..1.0,
        w in 0.0f64..1.0,
    ) {
        let mut pts = [u * cap, v * cap, w * cap];
        pts.sort_by(f64::total_cmp);
        let [a, b, c] = pts;
        let whole = f.window_integral(a, c).unwrap();
        let left = f.window_integral(a, b).unwrap();
        let right = f.window_integral(b, c).unwrap();
        let scale = 1.0 + whole.abs() + left.abs() + right.abs();
        prop_assert!(
            (left + right - whole).abs() <= 1e-9 * scale,
            "additivity gap {:.3e} on [{a:.4}, {b:.4}, {c:.4}] (scale {scale:.3e})",
            (left + right - whole).abs()
        );
    }

    /// Reversed windows integrate to the negation of the forward window.
    #[test]
    fn window_integrals_are_antisymmetric(
        (f, cap) in forcing_strategy(),
        u in 0.0f64..1.0,
        v in 0.0f64..1.0,
    ) {
        let (a, b) = (u * cap, v * cap);
        let fwd = f.window_integral(a, b).unwrap();
        let rev = f.window_integral(b, a).unwrap();
        prop_assert!(
            (fwd + rev).abs() <= 1e-12 * (1.0 + fwd.abs()),
            "window_integral({a:.4}, {b:.4}) = {fwd:.6e} but reversed gives {rev:.6e}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Every step of the direct scheme is linear in (x, f, ξ), so
    /// x(ξ) = x(0) + ξ·(x(1) − x(0)) must hold to rounding — the affinity
    /// that lets one conclusive membership verdict extend across initial
    /// values.
    #[test]
    fn direct_solutions_are_affine_in_the_initial_value(
        xi in -10.0f64..10.0,
        weight in -2.0f64..-0.1,
        delayed in any::<bool>(),
        rate in 0.3f64..2.0,
    ) {
        let grid = Grid::new(1e-2, 4.0).unwrap();
        let measure = if delayed {
            Measure::new(vec![Atom { location: 0.5, weight }], None).unwrap()
        } else {
            Measure::delta0(weight)
        };
        let forcing = ForcingFunction::exp_decay(rate).unwrap();
        let solve = |xi: f64| {
            let cfg = SolveConfig::new(measure.clone(), forcing.clone(), xi, grid).unwrap();
            solve_direct(&cfg).unwrap()
        };
        let x0 = solve(0.0);
        let x1 = solve(1.0);
        let observed = solve(xi);
        let response = x1.axpy(1.0, &x0, -1.0).unwrap();
        let predicted = x0.axpy(1.0, &response, xi).unwrap();
        let err = observed.sup_diff(&predicted).unwrap();
        prop_assert!(
            err <= 1e-9 * (1.0 + xi.abs()),
            "affinity gap {err:.3e} at ξ = {xi:.4} (weight {weight:.4}, delayed {delayed})"
        );
    }
}
