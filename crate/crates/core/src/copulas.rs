//! Dependency structures: bivariate copulas with zero-set boundaries and
//! exact samplers, plus the Archimedean lower-bound copula in n dimensions.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Result, ZocError};
use crate::marginals::{parse_spec, GainDistribution, Params};
use crate::numerics::{find_root_bracketed, RootBracket, ToleranceConfig};
use crate::rng::UniformStream;

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        domain(format!("{name} must lie in [0, 1], got {v}"))
    }
}

/// Two-dimensional copulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BivariateCopula {
    /// M(a, b) = min(a, b).
    Comonotone,
    /// W(a, b) = max(a + b − 1, 0).
    Countermonotone,
    /// Π(a, b) = ab.
    Independence,
    /// max(a + b − t, 0) on [0, t]², M elsewhere. t = 0 is M, t = 1 is W.
    ShiftedW { t: f64 },
    /// Generalized circular copula: mass spread uniformly over the boundary
    /// of the rectangle with corners (0,t), (t,0), (1,1−t), (1−t,1).
    /// t = 0 is M, t = ½ the classic circular copula, t = 1 is W.
    GeneralizedCircular { t: f64 },
    /// Clayton family, θ ∈ [−1, ∞) \ {0}.
    Clayton { theta: f64 },
}

impl BivariateCopula {
    pub fn shifted_w(t: f64) -> Result<Self> {
        check_unit("t", t)?;
        Ok(Self::ShiftedW { t })
    }

    pub fn circular(t: f64) -> Result<Self> {
        check_unit("t", t)?;
        Ok(Self::GeneralizedCircular { t })
    }

    pub fn clayton(theta: f64) -> Result<Self> {
        if !(theta >= -1.0) || theta == 0.0 || !theta.is_finite() {
            return domain(format!("Clayton theta must be in [-1, inf) without 0, got {theta}"));
        }
        Ok(Self::Clayton { theta })
    }

    /// C(a, b).
    pub fn eval(&self, a: f64, b: f64) -> Result<f64> {
        check_unit("a", a)?;
        check_unit("b", b)?;
        let m = a.min(b);
        let w = (a + b - 1.0).max(0.0);
        let v = match *self {
            Self::Comonotone => m,
            Self::Countermonotone => w,
            Self::Independence => a * b,
            Self::ShiftedW { t } => {
                if a <= t && b <= t {
                    (a + b - t).max(0.0)
                } else {
                    m
                }
            }
            Self::GeneralizedCircular { t } => {
                if (a - b).abs() > t {
                    m
                } else if (a + b - 1.0).abs() > 1.0 - t {
                    w
                } else {
                    0.5 * (a + b) - 0.5 * t
                }
            }
            Self::Clayton { theta } => clayton_eval(theta, a, b),
        };
        Ok(v.clamp(0.0, 1.0))
    }

    /// Conditional CDF h(v | a) = ∂C(u, v)/∂u at u = a, right-continuous in v.
    pub fn conditional_cdf(&self, a: f64, v: f64) -> Result<f64> {
        if !(a > 0.0 && a < 1.0) {
            return domain(format!("conditioning value must lie in (0, 1), got {a}"));
        }
        check_unit("v", v)?;
        let h = match *self {
            Self::Independence => v,
            Self::Comonotone => step(v, a),
            Self::Countermonotone => step(v, 1.0 - a),
            Self::ShiftedW { t } => step(v, if a <= t { t - a } else { a }),
            Self::GeneralizedCircular { t } => {
                let (lo, hi) = circular_atoms(t, a);
                0.5 * (step(v, lo) + step(v, hi))
            }
            Self::Clayton { theta } => clayton_conditional(theta, a, v),
        };
        Ok(h)
    }

    /// The conditional law v ↦ h(v | a) as a closure.
    pub fn conditional(&self, a: f64) -> Result<impl Fn(f64) -> f64 + '_> {
        self.conditional_cdf(a, 0.5)?;
        Ok(move |v: f64| self.conditional_cdf(a, v.clamp(0.0, 1.0)).unwrap_or(f64::NAN))
    }

    /// Width w of the zero set {C = 0} along the first axis, i.e. the zero
    /// set is {(a, b): a ≤ w, b ≤ profile(a)}. `None` when the zero set is
    /// confined to the axes.
    pub fn zero_set_width(&self) -> Option<f64> {
        match *self {
            Self::Countermonotone => Some(1.0),
            Self::ShiftedW { t } | Self::GeneralizedCircular { t } if t > 0.0 => Some(t),
            Self::Clayton { theta } if theta < 0.0 => Some(1.0),
            _ => None,
        }
    }

    /// Upper edge b = profile(a) of the zero set in copula coordinates.
    pub fn zero_profile(&self, a: f64) -> Result<f64> {
        let w = self.zero_set_width().ok_or(ZocError::EmptyZeroSet)?;
        if !(0.0..=w).contains(&a) {
            return domain(format!("profile argument {a} outside [0, {w}]"));
        }
        Ok(match *self {
            Self::Countermonotone => 1.0 - a,
            Self::ShiftedW { t } | Self::GeneralizedCircular { t } => (t - a).max(0.0),
            Self::Clayton { theta } => {
                let alpha = -theta;
                (1.0 - a.powf(alpha)).max(0.0).powf(1.0 / alpha)
            }
            _ => unreachable!("zero set width checked above"),
        })
    }

    /// Number of uniforms consumed per sample.
    pub(crate) const DRAWS: usize = 2;

    fn sample_one(&self, u: f64, w: f64) -> (f64, f64) {
        match *self {
            Self::Comonotone => (u, u),
            Self::Countermonotone => (u, 1.0 - u),
            Self::Independence => (u, w),
            Self::ShiftedW { t } => {
                if u <= t {
                    (u, t - u)
                } else {
                    (u, u)
                }
            }
            Self::GeneralizedCircular { .. } | Self::Clayton { .. } => (u, self.invert_conditional(u, w)),
        }
    }

    /// Solves h(v | u) = w for v by bracketed root finding on [0, 1].
    fn invert_conditional(&self, u: f64, w: f64) -> f64 {
        let h = |v: f64| self.conditional_cdf(u, v).expect("u in (0,1)") - w;
        if h(0.0) >= 0.0 {
            return 0.0;
        }
        let bracket = RootBracket { lo: 0.0, hi: 1.0 };
        find_root_bracketed(h, bracket, &ToleranceConfig::machine())
            .expect("conditional CDF changes sign on [0, 1]")
    }

    /// `count` pairs (u, v) with uniform margins, reproducible from `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<(f64, f64)> {
        self.sample_range(seed, 0, count)
    }

    pub(crate) fn sample_range(&self, seed: u64, first: usize, count: usize) -> Vec<(f64, f64)> {
        let mut stream = UniformStream::at_sample(seed, Self::DRAWS, first);
        (0..count)
            .map(|_| {
                let u = stream.next_open01();
                let w = stream.next_open01();
                self.sample_one(u, w)
            })
            .collect()
    }
}

fn step(v: f64, at: f64) -> f64 {
    if v >= at {
        1.0
    } else {
        0.0
    }
}

/// The two equally likely values of V given U = a under the generalized
/// circular copula.
fn circular_atoms(t: f64, a: f64) -> (f64, f64) {
    ((a - t).abs(), 1.0 - (1.0 - a - t).abs())
}

fn clayton_eval(theta: f64, a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let s = a.powf(-theta) + b.powf(-theta) - 1.0;
    if s <= 0.0 {
        return 0.0;
    }
    s.powf(-1.0 / theta)
}

fn clayton_conditional(theta: f64, a: f64, v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let s = a.powf(-theta) + v.powf(-theta) - 1.0;
    if s <= 0.0 {
        return 0.0;
    }
    if theta == -1.0 {
        return 1.0;
    }
    (a.powf(-theta - 1.0) * s.powf(-1.0 / theta - 1.0)).clamp(0.0, 1.0)
}

impl FromStr for BivariateCopula {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (family, entries) = parse_spec(s)?;
        let p = Params::new(&family, entries);
        let built = match family.as_str() {
            "m" | "comonotone" => {
                p.expect_only(&[])?;
                Ok(Self::Comonotone)
            }
            "w" | "countermonotone" => {
                p.expect_only(&[])?;
                Ok(Self::Countermonotone)
            }
            "indep" | "independence" => {
                p.expect_only(&[])?;
                Ok(Self::Independence)
            }
            "shifted_w" => {
                p.expect_only(&["t"])?;
                Self::shifted_w(p.get("t")?)
            }
            "circular" => {
                p.expect_only(&["t"])?;
                Self::circular(p.get("t")?)
            }
            "clayton" => {
                p.expect_only(&["theta"])?;
                Self::clayton(p.get("theta")?)
            }
            other => return Err(format!("unknown bivariate copula '{other}'")),
        };
        built.map_err(|e| e.to_string())
    }
}

impl fmt::Display for BivariateCopula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Comonotone => write!(f, "m"),
            Self::Countermonotone => write!(f, "w"),
            Self::Independence => write!(f, "indep"),
            Self::ShiftedW { t } => write!(f, "shifted_w:t={t}"),
            Self::GeneralizedCircular { t } => write!(f, "circular:t={t}"),
            Self::Clayton { theta } => write!(f, "clayton:theta={theta}"),
        }
    }
}

/// Upper edge x₂ = B(x₁) of the region where the joint CDF of two gains
/// vanishes, B(x) = F₂⁻¹(profile(F₁(x))).
#[derive(Debug, Clone, Copy)]
pub struct ZeroBoundary<'a, D1: ?Sized, D2: ?Sized> {
    copula: BivariateCopula,
    f1: &'a D1,
    f2: &'a D2,
    width: f64,
}

impl<'a, D1, D2> ZeroBoundary<'a, D1, D2>
where
    D1: GainDistribution + ?Sized,
    D2: GainDistribution + ?Sized,
{
    /// Zero-set width in probability units: F₁(x) ranges over [0, width].
    pub fn width(&self) -> f64 {
        self.width
    }

    /// x_max = F₁⁻¹(width); infinite when the zero set spans all of [0, 1).
    pub fn x_max(&self) -> f64 {
        self.f1.quantile(self.width).unwrap_or(f64::INFINITY)
    }

    /// B(x) for x ∈ [0, x_max]; +∞ where the boundary runs off to infinity.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_at_probability(self.f1.cdf(x).min(self.width)).1
    }

    /// Boundary point (x₁, x₂) parametrized by a = F₁(x₁) ∈ [0, width].
    pub fn eval_at_probability(&self, a: f64) -> (f64, f64) {
        let a = a.clamp(0.0, self.width);
        let x1 = self.f1.quantile(a).unwrap_or(f64::INFINITY);
        let b = self.copula.zero_profile(a).expect("a within zero-set width");
        let x2 = self.f2.quantile(b).unwrap_or(f64::INFINITY);
        (x1, x2)
    }
}

/// Boundary of {(x₁, x₂): C(F₁(x₁), F₂(x₂)) = 0}.
pub fn zero_boundary<'a, D1, D2>(
    copula: BivariateCopula,
    f1: &'a D1,
    f2: &'a D2,
) -> Result<ZeroBoundary<'a, D1, D2>>
where
    D1: GainDistribution + ?Sized,
    D2: GainDistribution + ?Sized,
{
    let width = copula.zero_set_width().ok_or(ZocError::EmptyZeroSet)?;
    Ok(ZeroBoundary {
        copula,
        f1,
        f2,
        width,
    })
}

/// Archimedean lower-bound copula
/// C_n(u) = (max[Σ u_i^{1/(n−1)} − n + 1, 0])^{n−1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArchLowerCopula {
    n: usize,
}

impl ArchLowerCopula {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return domain(format!("Archimedean lower-bound copula needs n >= 2, got {n}"));
        }
        Ok(Self { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.n {
            return Err(ZocError::DimensionMismatch {
                expected: self.n,
                got: u.len(),
            });
        }
        for &ui in u {
            check_unit("u_i", ui)?;
        }
        let k = (self.n - 1) as f64;
        let s: f64 = u.iter().map(|ui| ui.powf(1.0 / k)).sum::<f64>() - k;
        if s <= 0.0 {
            return Ok(0.0);
        }
        Ok(s.powf(k).clamp(0.0, 1.0))
    }

    /// Σ u_i^{1/(n−1)} − (n − 1); zero on the singular support.
    pub fn support_residual(&self, u: &[f64]) -> f64 {
        let k = (self.n - 1) as f64;
        u.iter().map(|ui| ui.powf(1.0 / k)).sum::<f64>() - k
    }

    /// Number of uniforms consumed per sample.
    pub(crate) fn draws(&self) -> usize {
        self.n
    }

    /// `count` vectors on the copula's singular support, row-major.
    ///
    /// S is uniform on the simplex (normalized exponential spacings) and
    /// U_i = (1 − S_i)^{n−1}; each U_i is exactly uniform.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        self.sample_range(seed, 0, count)
    }

    pub(crate) fn sample_range(&self, seed: u64, first: usize, count: usize) -> Vec<Vec<f64>> {
        let mut stream = UniformStream::at_sample(seed, self.draws(), first);
        let k = (self.n - 1) as i32;
        (0..count)
            .map(|_| {
                let e: Vec<f64> = (0..self.n).map(|_| -stream.next_open01().ln()).collect();
                let total: f64 = e.iter().sum();
                e.iter().map(|ei| (1.0 - ei / total).powi(k)).collect()
            })
            .collect()
    }
}

/// Any copula accepted on the command line: bivariate or the n-dimensional
/// Archimedean lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Copula {
    Bivariate(BivariateCopula),
    ArchLower(ArchLowerCopula),
}

impl Copula {
    pub fn dim(&self) -> usize {
        match self {
            Self::Bivariate(_) => 2,
            Self::ArchLower(a) => a.dim(),
        }
    }
}

impl FromStr for Copula {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (family, entries) = parse_spec(s)?;
        if family != "arch_lower" {
            return s.parse().map(Self::Bivariate);
        }
        let p = Params::new(&family, entries);
        p.expect_only(&["n"])?;
        let n = p.get("n")?;
        if n.fract() != 0.0 || !(2.0..=1e6).contains(&n) {
            return Err(format!("arch_lower: n must be an integer >= 2, got {n}"));
        }
        ArchLowerCopula::new(n as usize)
            .map(Self::ArchLower)
            .map_err(|e| e.to_string())
    }
}

impl fmt::Display for Copula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bivariate(c) => c.fmt(f),
            Self::ArchLower(a) => write!(f, "arch_lower:n={}", a.dim()),
        }
    }
}
