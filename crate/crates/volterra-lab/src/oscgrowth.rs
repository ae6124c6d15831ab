//! Window integrals of the rapidly oscillating forcing `f(t) = e^{αt}·sin(e^{βt})`.
//!
//! Substituting `u = e^{βs}` turns `∫_a^b e^{αs} sin(e^{βs}) ds` into
//! `(1/β)·∫_{u_a}^{u_b} u^{γ−1} sin u du` with `γ = α/β ∈ (0,1)` and
//! `u ≥ 1`. For moderate `u` the transformed integrand oscillates at unit
//! frequency and composite Gauss–Legendre resolves it to machine precision;
//! for large `u` repeated integration by parts gives an asymptotic
//! antiderivative whose terms shrink like `(2k)²/u²`. Grid sampling of `f`
//! itself aliases once `β·e^{βt}·h` is large — these windows do not.

use crate::error::{Error, Result};
use crate::quad::gauss8;

/// Phase threshold separating the quadrature and asymptotic regimes. At
/// `u = 50` the by-parts series reaches ~1e−19 relative truncation within
/// 16 terms, while panel quadrature below it stays cheap.
const SPLIT_U: f64 = 50.0;

/// Cap on the by-parts series length (reached only in debug paranoia; the
/// relative-tolerance stop triggers first for all `u ≥ SPLIT_U`).
const MAX_TERMS: usize = 16;

/// Largest exponent fed to `exp` before declaring the window unrepresentable.
const EXP_CAP: f64 = 700.0;

/// The forcing `e^{αt}·sin(e^{βt})` with `0 < α < β` (zero for `t < 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscGrowth {
    alpha: f64,
    beta: f64,
    /// `γ = α/β ∈ (0, 1)`.
    gamma: f64,
}

impl OscGrowth {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && 0.0 < alpha && alpha < beta) {
            return Err(Error::config(format!(
                "oscillatory growth requires 0 < alpha < beta, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(OscGrowth { alpha, beta, gamma: alpha / beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Pointwise value. Faithful only while the phase `e^{βt}` is resolved
    /// by f64 (absolute phase error ~`e^{βt}·2⁻⁵²`); the envelope is always
    /// right, and the window integrals below do not inherit this caveat
    /// until far larger horizons.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Ok(0.0);
        }
        if self.beta * t > EXP_CAP || self.alpha * t > EXP_CAP {
            return Err(Error::evaluation(format!(
                "e^(beta t) overflows at t = {t} (beta = {})",
                self.beta
            )));
        }
        Ok((self.alpha * t).exp() * (self.beta * t).exp().sin())
    }

    /// `∫_a^b f(s) ds` with the zero extension below 0 applied. Signed:
    /// `b < a` flips orientation.
    pub fn window(&self, a: f64, b: f64) -> Result<f64> {
        if b < a {
            return Ok(-self.window(b, a)?);
        }
        let a = a.max(0.0);
        let b = b.max(0.0);
        if b <= a {
            return Ok(0.0);
        }
        if self.beta * b > EXP_CAP {
            return Err(Error::evaluation(format!(
                "window endpoint t = {b} overflows e^(beta t) (beta = {})",
                self.beta
            )));
        }
        let ua = (self.beta * a).exp();
        let ub = (self.beta * b).exp();
        Ok(self.transformed(ua, ub) / self.beta)
    }

    /// `∫_{ua}^{ub} u^{γ−1} sin u du` for `1 ≤ ua ≤ ub`.
    fn transformed(&self, ua: f64, ub: f64) -> f64 {
        if ub <= SPLIT_U {
            self.transformed_quadrature(ua, ub)
        } else if ua >= SPLIT_U {
            self.antiderivative(ub) - self.antiderivative(ua)
        } else {
            self.transformed_quadrature(ua, SPLIT_U) + self.antiderivative(ub)
                - self.antiderivative(SPLIT_U)
        }
    }

    /// Composite 8-point Gauss–Legendre with panels of width ≤ 1 (well
    /// under the 2π period, so each panel is polynomial-exact for the
    /// oscillation and the algebraic factor alike).
    fn transformed_quadrature(&self, ua: f64, ub: f64) -> f64 {
        let g = self.gamma;
        let n = (ub - ua).ceil().max(1.0) as usize;
        let w = (ub - ua) / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let lo = ua + i as f64 * w;
            sum += gauss8(lo, lo + w, |u| u.powf(g - 1.0) * u.sin());
        }
        sum
    }

    /// Asymptotic antiderivative of `u^{γ−1} sin u` from repeated parts:
    /// with `S(c) = ∫ u^c sin u du`,
    /// `S(c) = −u^c cos u + c·u^{c−1} sin u − c(c−1)·S(c−2)`,
    /// unrolled into `cos_coef·cos u + sin_coef·sin u`. For `u ≥ SPLIT_U`
    /// the terms decay fast enough that truncation sits below 1e−17
    /// relative to the leading magnitude `u^{γ−1}`.
    fn antiderivative(&self, u: f64) -> f64 {
        let mut c = self.gamma - 1.0;
        let mut uc = u.powf(c);
        let lead = uc;
        let mut mult = 1.0;
        let mut cos_coef = 0.0;
        let mut sin_coef = 0.0;
        for _ in 0..MAX_TERMS {
            cos_coef += mult * (-uc);
            sin_coef += mult * c * (uc / u);
            mult = -mult * c * (c - 1.0);
            c -= 2.0;
            uc /= u * u;
            if (mult * uc).abs() <= 1e-17 * lead {
                break;
            }
        }
        cos_coef * u.cos() + sin_coef * u.sin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss8_composite;

    /// Brute-force reference in the original variable: composite GL8 with
    /// panels short enough to resolve the local frequency β·e^{βb}.
    fn brute_window(f: &OscGrowth, a: f64, b: f64) -> f64 {
        let freq = f.beta() * (f.beta() * b).exp();
        let panel = (0.05 / freq).min(0.01);
        gauss8_composite(a, b, panel, |s| {
            (f.alpha() * s).exp() * (f.beta() * s).exp().sin()
        })
        .unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(OscGrowth::new(0.0, 2.0).is_err());
        assert!(OscGrowth::new(2.0, 2.0).is_err());
        assert!(OscGrowth::new(3.0, 2.0).is_err());
        assert!(OscGrowth::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn eval_matches_direct_formula() {
        let f = OscGrowth::new(1.0, 2.0).unwrap();
        assert!((f.eval(0.0).unwrap() - 1f64.sin()).abs() < 1e-15);
        assert_eq!(f.eval(-0.5).unwrap(), 0.0);
        let t = 1.37;
        assert!((f.eval(t).unwrap() - t.exp() * (2.0 * t).exp().sin()).abs() < 1e-12);
    }

    #[test]
    fn window_matches_brute_quadrature_in_resolved_range() {
        // spans the quadrature regime, the split point, and the asymptotic
        // regime (u runs from 1 to e^{4.8} ≈ 122)
        let f = OscGrowth::new(1.0, 2.0).unwrap();
        for (a, b) in [(0.0, 0.7), (0.3, 1.9), (1.8, 2.4), (0.0, 2.4), (2.0, 2.2)] {
            let w = f.window(a, b).unwrap();
            let reference = brute_window(&f, a, b);
            assert!(
                (w - reference).abs() < 1e-11 * (1.0 + reference.abs()),
                "[{a}, {b}]: {w} vs {reference}"
            );
        }
    }

    #[test]
    fn window_matches_u_space_quadrature_deep_in_asymptotic_regime() {
        // At t ≈ 5 the phase is e^{10} ≈ 22026; panel quadrature in u is
        // still affordable there and pins the by-parts antiderivative.
        let f = OscGrowth::new(1.0, 2.0).unwrap();
        let (a, b) = (5.0f64, 5.05f64);
        let (ua, ub) = ((2.0 * a).exp(), (2.0 * b).exp());
        let g = 0.5;
        let reference =
            gauss8_composite(ua, ub, 1.0, |u| u.powf(g - 1.0) * u.sin()).unwrap() / 2.0;
        let w = f.window(a, b).unwrap();
        let scale = ua.powf(g - 1.0) / 2.0;
        // The reference itself sums ~2300 oscillating panel values, so it
        // carries a few·1e-14 of accumulated rounding; the tolerance sits an
        // order above that while still pinning the by-parts series hard.
        assert!(
            (w - reference).abs() < 1e-9 * scale,
            "window {w} vs reference {reference} (scale {scale})"
        );
    }

    #[test]
    fn windows_are_additive_across_regimes() {
        let f = OscGrowth::new(1.0, 3.0).unwrap();
        for (a, b, c) in [(0.0, 0.9, 2.1), (0.5, 1.3041, 1.9), (1.0, 4.0, 7.5)] {
            let whole = f.window(a, c).unwrap();
            let split = f.window(a, b).unwrap() + f.window(b, c).unwrap();
            let scale = 1.0 + whole.abs();
            assert!((whole - split).abs() < 1e-12 * scale, "[{a},{b},{c}]");
        }
    }

    #[test]
    fn window_respects_zero_extension_and_orientation() {
        let f = OscGrowth::new(1.0, 2.0).unwrap();
        let clipped = f.window(-1.0, 0.8).unwrap();
        let from_zero = f.window(0.0, 0.8).unwrap();
        assert_eq!(clipped, from_zero);
        assert_eq!(f.window(0.8, 0.2).unwrap(), -f.window(0.2, 0.8).unwrap());
        assert_eq!(f.window(-3.0, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn window_envelope_decays_at_rate_beta_minus_alpha() {
        // the by-parts leading term bounds |∫_t^{t+θ} f| by ~(2/β)e^{−(β−α)t}
        let f = OscGrowth::new(1.0, 2.0).unwrap();
        for t in [6.0, 8.0, 10.0, 12.0] {
            let w = f.window(t, t + 0.5).unwrap();
            let envelope = 2.0 / 2.0 * (-(2.0 - 1.0) * t).exp();
            assert!(w.abs() <= envelope * 1.05, "t = {t}: {w} vs {envelope}");
        }
    }

    #[test]
    fn horizon_overflow_is_an_error() {
        let f = OscGrowth::new(1.0, 2.0).unwrap();
        assert!(f.window(0.0, 400.0).is_err());
        assert!(f.eval(400.0).is_err());
    }
}
