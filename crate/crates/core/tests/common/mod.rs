//! Independent reference implementations for the integration tests.

#![allow(dead_code)]

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Adaptive Simpson quadrature of `f` on [a, b], pre-split into `panels`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let (lo, hi) = (a + h * i as f64, if i + 1 == panels { b } else { a + h * (i + 1) as f64 });
            let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
            simpson(f, lo, hi, flo, fmid, fhi, whole, tol / panels as f64, 40)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol.max(8.0 * f64::EPSILON * (left + right).abs()) {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// P(a, x) as lower / (lower + upper) of the incomplete gamma integrals,
/// both scaled by the integrand's peak so nothing overflows. Never touches
/// Γ(a).
pub fn reg_gamma_lower_oracle(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let peak = (a - 1.0).max(1e-3);
    let c = (a - 1.0) * peak.ln() - peak;
    let density = |t: f64| if t <= 0.0 { 0.0 } else { ((a - 1.0) * t.ln() - t - c).exp() };

    let lower = if a >= 1.0 {
        integrate(&density, 0.0, x, 1e-13, 64)
    } else {
        // t = x u^{1/a} removes the singularity at 0
        let g = |u: f64| ((a * x.ln() - a.ln()) - x * u.powf(1.0 / a) - c).exp();
        integrate(&g, 0.0, 1.0, 1e-13, 64)
    };
    // t = x + s / (1 − s) maps [x, ∞) onto [0, 1)
    let upper_integrand = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let t = x + s / (1.0 - s);
        density(t) / ((1.0 - s) * (1.0 - s))
    };
    let upper = integrate(&upper_integrand, 0.0, 1.0, 1e-13, 256);
    lower / (lower + upper)
}

/// Reproducible uniforms on (0, 1) for test-case generation.
pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = ((self.0.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}
