//! Deterministic scalar numerics: bracketed root finding, global 1-D
//! minimization on a closed interval, central differences and the gamma
//! special-function family.
//!
//! Everything here is a pure function of its inputs.

use crate::error::{domain, Result, ZocError};

/// Tolerances shared by the iterative routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Number of samples used by global grid scans.
    pub grid_points: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_iter: 200,
            grid_points: 2048,
        }
    }
}

impl ToleranceConfig {
    /// Tolerances tight enough to pin roots to a few ulps.
    pub fn machine() -> Self {
        Self {
            abs_tol: 1e-300,
            rel_tol: 0.0,
            max_iter: 400,
            grid_points: 2048,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol >= 0.0) {
            return domain("tolerances must be positive");
        }
        if self.max_iter < 1 {
            return domain("max_iter must be at least 1");
        }
        if self.grid_points < 16 {
            return domain("grid_points must be at least 16");
        }
        Ok(())
    }
}

/// A closed interval on which a continuous function changes sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(ZocError::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }
}

/// Brent's method on a sign-changing bracket.
///
/// Stops once the bracket half-width drops below
/// `2·eps·|x| + (abs_tol + rel_tol·|x|)/2`. Discontinuous functions are
/// fine: the bisection fallback converges to the jump.
pub fn find_root_bracketed<F>(f: F, bracket: RootBracket, tol: &ToleranceConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() || fa.is_infinite() || fb.is_infinite() {
        return Err(ZocError::NonFinite(format!(
            "root bracket endpoints evaluate to f({a})={fa}, f({b})={fb}"
        )));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(ZocError::NoSignChange { lo: a, hi: b });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * (tol.abs_tol + tol.rel_tol * b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() || fb.is_infinite() {
            return Err(ZocError::NonFinite(format!("f({b}) = {fb} inside bracket")));
        }
    }
    Err(ZocError::NoConvergence {
        iterations: tol.max_iter,
        context: "find_root_bracketed".into(),
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn finite_or_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn golden_section<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: &ToleranceConfig) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = finite_or_inf(f(c));
    let mut fd = finite_or_inf(f(d));
    for _ in 0..tol.max_iter {
        let scale = 0.5 * (c.abs() + d.abs());
        if b - a <= tol.abs_tol + tol.rel_tol * scale {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = finite_or_inf(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = finite_or_inf(f(d));
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Global minimum of `f` on `[lo, hi]`: dense grid scan, then golden-section
/// refinement inside the best grid cell. Both endpoints always compete as
/// candidates and win ties, so minima attained at an endpoint are returned
/// exactly at that endpoint.
///
/// Isolated non-finite grid values (e.g. an infinite quantile at an end of
/// the domain) are skipped; two adjacent non-finite samples are an error.
pub fn minimize_on_interval<F>(f: F, lo: f64, hi: f64, tol: &ToleranceConfig) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(ZocError::InvalidInterval { lo, hi });
    }
    if lo == hi {
        let v = f(lo);
        if !v.is_finite() {
            return Err(ZocError::NonFinite(format!("f({lo}) = {v}")));
        }
        return Ok((lo, v));
    }

    let n = tol.grid_points.max(16);
    let step = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    if vals
        .windows(2)
        .any(|w| !w[0].is_finite() && !w[1].is_finite())
    {
        return Err(ZocError::NonFinite(
            "objective is non-finite on adjacent grid points".into(),
        ));
    }

    let mut best: Option<usize> = None;
    for (i, &v) in vals.iter().enumerate() {
        if v.is_finite() && best.is_none_or(|b| v < vals[b]) {
            best = Some(i);
        }
    }
    let k = best.ok_or_else(|| ZocError::NonFinite("objective is non-finite everywhere".into()))?;

    let a = xs[k.saturating_sub(1)];
    let b = xs[(k + 1).min(n - 1)];
    let refined = golden_section(&f, a, b, tol);

    let mut out = (xs[k], vals[k]);
    for cand in [(lo, vals[0]), (hi, vals[n - 1])] {
        if cand.1.is_finite() && cand.1 <= out.1 {
            out = cand;
        }
    }
    if refined.1.is_finite() && refined.1 < out.1 {
        out = refined;
    }
    Ok(out)
}

/// Default central-difference step for abscissa `x`.
pub fn default_step(x: f64) -> f64 {
    (1e-6 * x.abs()).max(1e-6)
}

/// `(f(x+h) - f(x-h)) / 2h`, with `h` defaulting to [`default_step`].
pub fn derivative_central<F>(f: F, x: f64, h: Option<f64>) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let h = h.unwrap_or_else(|| default_step(x));
    if !(h > 0.0) {
        return domain(format!("step must be positive, got {h}"));
    }
    let (up, down) = (f(x + h), f(x - h));
    if !up.is_finite() || !down.is_finite() {
        return Err(ZocError::NonFinite(format!(
            "f({}) = {up}, f({}) = {down}",
            x + h,
            x - h
        )));
    }
    Ok((up - down) / (2.0 * h))
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// ln Γ(a) for a > 0.
///
/// Lanczos (g = 7) on [0.5, 10), Stirling series with seven correction
/// terms above, and ln Γ(a) = ln Γ(a+1) − ln a below 0.5.
pub fn ln_gamma(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return domain(format!("ln_gamma requires a > 0, got {a}"));
    }
    Ok(ln_gamma_unchecked(a))
}

fn ln_gamma_unchecked(a: f64) -> f64 {
    if a < 0.5 {
        return ln_gamma_unchecked(a + 1.0) - a.ln();
    }
    if a >= 10.0 {
        let inv = 1.0 / a;
        let inv2 = inv * inv;
        let series = inv
            * (1.0 / 12.0
                + inv2
                    * (-1.0 / 360.0
                        + inv2
                            * (1.0 / 1260.0
                                + inv2
                                    * (-1.0 / 1680.0
                                        + inv2
                                            * (1.0 / 1188.0
                                                + inv2 * (-691.0 / 360_360.0 + inv2 / 156.0))))));
        return (a - 0.5) * a.ln() - a + HALF_LN_TWO_PI + series;
    }
    let z = a - 1.0;
    let mut sum = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + sum.ln()
}

const FPMIN: f64 = 1e-300;
const SERIES_MAX_TERMS: usize = 100_000;

/// Regularized lower incomplete gamma function P(a, x).
///
/// Power series for x < a + 1, Lentz continued fraction for the
/// complement otherwise.
pub fn reg_gamma_lower(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return domain(format!("reg_gamma_lower requires a > 0, got {a}"));
    }
    if !(x >= 0.0) {
        return domain(format!("reg_gamma_lower requires x >= 0, got {x}"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let ln_prefactor = a * x.ln() - x - ln_gamma_unchecked(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..SERIES_MAX_TERMS {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                return Ok((sum * ln_prefactor.exp()).clamp(0.0, 1.0));
            }
        }
        Err(ZocError::NoConvergence {
            iterations: SERIES_MAX_TERMS,
            context: format!("incomplete gamma series at a={a}, x={x}"),
        })
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=SERIES_MAX_TERMS {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = b + an / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < f64::EPSILON {
                let upper = ln_prefactor.exp() * h;
                return Ok((1.0 - upper).clamp(0.0, 1.0));
            }
        }
        Err(ZocError::NoConvergence {
            iterations: SERIES_MAX_TERMS,
            context: format!("incomplete gamma continued fraction at a={a}, x={x}"),
        })
    }
}

/// Inverse of P(a, ·): the x ≥ 0 with P(a, x) = q, for q ∈ [0, 1).
///
/// Halley-corrected Newton steps from a Wilson–Hilferty starting point,
/// kept inside a shrinking bracket with bisection as the fallback.
pub fn reg_gamma_lower_inv(a: f64, q: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return domain(format!("reg_gamma_lower_inv requires a > 0, got {a}"));
    }
    if !(0.0..1.0).contains(&q) {
        return domain(format!("reg_gamma_lower_inv requires q in [0, 1), got {q}"));
    }
    if q == 0.0 {
        return Ok(0.0);
    }

    let ln_gamma_a = ln_gamma_unchecked(a);
    let mut x = initial_gamma_guess(a, q);
    let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
    let mut last_err = f64::INFINITY;

    for _ in 0..200 {
        let err = reg_gamma_lower(a, x)? - q;
        last_err = err;
        if err == 0.0 {
            return Ok(x);
        }
        if err > 0.0 {
            hi = hi.min(x);
        } else {
            lo = lo.max(x);
        }

        let density = ((a - 1.0) * x.ln() - x - ln_gamma_a).exp();
        let mut next = f64::NAN;
        if density > 0.0 && density.is_finite() {
            let newton = err / density;
            let curvature = (a - 1.0) / x - 1.0;
            let halley = newton / (1.0 - 0.5 * (newton * curvature).min(1.0));
            next = x - halley;
        }
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * x.max(1.0) };
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * next.abs() {
            return Ok(next);
        }
        if hi.is_finite() && hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        x = next;
    }
    if last_err.abs() <= 1e-10 {
        Ok(x)
    } else {
        Err(ZocError::NoConvergence {
            iterations: 200,
            context: format!("reg_gamma_lower_inv at a={a}, q={q}"),
        })
    }
}

fn initial_gamma_guess(a: f64, q: f64) -> f64 {
    if a > 1.0 {
        let pp = if q < 0.5 { q } else { 1.0 - q };
        let t = (-2.0 * pp.ln()).sqrt();
        let mut z = (2.307_53 + t * 0.270_61) / (1.0 + t * (0.992_29 + t * 0.044_81)) - t;
        if q < 0.5 {
            z = -z;
        }
        let base = 1.0 - 1.0 / (9.0 * a) - z / (3.0 * a.sqrt());
        (a * base * base * base).max(1e-3)
    } else {
        let t = 1.0 - a * (0.253 + a * 0.12);
        if q < t {
            (q / t).powf(1.0 / a)
        } else {
            1.0 - (1.0 - (q - t) / (1.0 - t)).ln()
        }
    }
}

/// Standard normal CDF Φ(z).
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal quantile Φ⁻¹(p), Wichura's AS 241 (PPND16).
#[allow(clippy::excessive_precision)]
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("normal quantile requires p in (0, 1), got {p}"));
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        let num = ((((((r * 2_509.080_928_730_122_7 + 33_430.575_583_588_128) * r
            + 67_265.770_927_008_7)
            * r
            + 45_921.953_931_549_87)
            * r
            + 13_731.693_765_509_461)
            * r
            + 1_971.590_950_306_551_3)
            * r
            + 133.141_667_891_784_38)
            * r
            + 3.387_132_872_796_366_5;
        let den = ((((((r * 5_226.495_278_852_545_5 + 28_729.085_735_721_943) * r
            + 39_307.895_800_092_71)
            * r
            + 21_213.794_301_586_597)
            * r
            + 5_394.196_021_424_751)
            * r
            + 687.187_007_492_057_9)
            * r
            + 42.313_330_701_600_911)
            * r
            + 1.0;
        return Ok(q * num / den);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((r * 7.745_450_142_783_414e-4 + 0.022_723_844_989_269_184) * r
            + 0.241_780_725_177_450_6)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5;
        let den = ((((((r * 1.050_750_071_644_416_9e-9 + 5.475_938_084_995_345e-4) * r
            + 0.015_198_666_563_616_457)
            * r
            + 0.148_103_976_427_480_08)
            * r
            + 0.689_767_334_985_1)
            * r
            + 1.676_384_830_183_803_8)
            * r
            + 2.053_191_626_637_758_8)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((r * 2.010_334_399_292_288_1e-7 + 2.711_555_568_743_487_6e-5) * r
            + 0.001_242_660_947_388_078_4)
            * r
            + 0.026_532_189_526_576_124)
            * r
            + 0.296_560_571_828_504_87)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((r * 2.044_263_103_389_939_7e-15 + 1.421_511_758_316_446e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 0.014_875_361_290_850_615)
            * r
            + 0.136_929_880_922_735_8)
            * r
            + 0.599_832_206_555_888)
            * r
            + 1.0;
        num / den
    };
    Ok(if q < 0.0 { -val } else { val })
}
