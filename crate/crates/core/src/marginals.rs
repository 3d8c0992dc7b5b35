//! Channel-gain marginals X = ρ|H|².
//!
//! SNRs are linear throughout the library; [`db_to_linear`] is only called
//! where user input arrives in dB (see [`Marginal::from_str`]).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{domain, Result, ZocError};
use crate::numerics::{
    ln_gamma, reg_gamma_lower, reg_gamma_lower_inv, std_normal_cdf, std_normal_quantile,
};

/// Continuous law of a non-negative channel gain, supported on [0, ∞).
pub trait GainDistribution: fmt::Debug + Send + Sync {
    /// F(x), clamped to [0, 1]; zero for x < 0.
    fn cdf(&self, x: f64) -> f64;

    /// F⁻¹(u) for u ∈ [0, 1). `u = 1` yields [`ZocError::InfiniteQuantile`].
    fn quantile(&self, u: f64) -> Result<f64>;

    fn pdf(&self, x: f64) -> f64;

    /// f'(x) for x in the support interior.
    fn pdf_derivative(&self, x: f64) -> f64;

    fn mean(&self) -> f64;

    fn median(&self) -> f64 {
        self.quantile(0.5).expect("median of a proper distribution")
    }

    fn mode(&self) -> f64;

    fn moments(&self) -> Moments {
        Moments {
            mean: self.mean(),
            median: self.median(),
            mode: self.mode(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub median: f64,
    pub mode: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn check_quantile_arg(u: f64) -> Result<()> {
    if u == 1.0 {
        return Err(ZocError::InfiniteQuantile);
    }
    if !(0.0..1.0).contains(&u) {
        return domain(format!("quantile requires u in [0, 1), got {u}"));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be positive and finite, got {v}"))
    }
}

/// Rayleigh fading: X ~ Exp(1/ρ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighGain {
    snr: f64,
}

impl RayleighGain {
    pub fn new(snr_linear: f64) -> Result<Self> {
        positive("snr", snr_linear)?;
        Ok(Self { snr: snr_linear })
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn rate(&self) -> f64 {
        1.0 / self.snr
    }
}

impl GainDistribution for RayleighGain {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        -(-x / self.snr).exp_m1()
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_quantile_arg(u)?;
        Ok(-self.snr * (-u).ln_1p())
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        (-x / self.snr).exp() / self.snr
    }

    fn pdf_derivative(&self, x: f64) -> f64 {
        -self.pdf(x) / self.snr
    }

    fn mean(&self) -> f64 {
        self.snr
    }

    fn median(&self) -> f64 {
        self.snr * std::f64::consts::LN_2
    }

    fn mode(&self) -> f64 {
        0.0
    }
}

/// Nakagami-m fading: X ~ Gamma(shape m, scale ρ/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiGain {
    m: f64,
    snr: f64,
    ln_norm: f64,
}

impl NakagamiGain {
    pub fn new(m: f64, snr_linear: f64) -> Result<Self> {
        if !(m >= 0.5) || !m.is_finite() {
            return domain(format!("Nakagami m must be >= 0.5, got {m}"));
        }
        positive("snr", snr_linear)?;
        let scale = snr_linear / m;
        Ok(Self {
            m,
            snr: snr_linear,
            ln_norm: ln_gamma(m)? + m * scale.ln(),
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn scale(&self) -> f64 {
        self.snr / self.m
    }
}

impl GainDistribution for NakagamiGain {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        reg_gamma_lower(self.m, x / self.scale()).expect("valid gamma arguments")
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_quantile_arg(u)?;
        Ok(self.scale() * reg_gamma_lower_inv(self.m, u)?)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return match self.m.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => 1.0 / self.scale(),
                _ => 0.0,
            };
        }
        ((self.m - 1.0) * x.ln() - x / self.scale() - self.ln_norm).exp()
    }

    fn pdf_derivative(&self, x: f64) -> f64 {
        if x == 0.0 && self.m == 1.0 {
            return -self.pdf(0.0) / self.scale();
        }
        self.pdf(x) * ((self.m - 1.0) / x - 1.0 / self.scale())
    }

    fn mean(&self) -> f64 {
        self.snr
    }

    fn mode(&self) -> f64 {
        if self.m >= 1.0 {
            (self.m - 1.0) / self.m * self.snr
        } else {
            0.0
        }
    }
}

/// Weibull gain with scale λ and shape k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullGain {
    scale: f64,
    shape: f64,
}

impl WeibullGain {
    pub fn new(scale: f64, shape: f64) -> Result<Self> {
        positive("Weibull scale", scale)?;
        positive("Weibull shape", shape)?;
        Ok(Self { scale, shape })
    }
}

impl GainDistribution for WeibullGain {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        -(-(x / self.scale).powf(self.shape)).exp_m1()
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_quantile_arg(u)?;
        Ok(self.scale * (-(-u).ln_1p()).powf(1.0 / self.shape))
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let (k, l) = (self.shape, self.scale);
        if x == 0.0 {
            return match k.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => 1.0 / l,
                _ => 0.0,
            };
        }
        let z = x / l;
        k / l * z.powf(k - 1.0) * (-z.powf(k)).exp()
    }

    fn pdf_derivative(&self, x: f64) -> f64 {
        let (k, l) = (self.shape, self.scale);
        if x == 0.0 && k == 1.0 {
            return -1.0 / (l * l);
        }
        self.pdf(x) * ((k - 1.0) / x - k * x.powf(k - 1.0) / l.powf(k))
    }

    fn mean(&self) -> f64 {
        self.scale * ln_gamma(1.0 + 1.0 / self.shape).expect("positive argument").exp()
    }

    fn median(&self) -> f64 {
        self.scale * std::f64::consts::LN_2.powf(1.0 / self.shape)
    }

    fn mode(&self) -> f64 {
        if self.shape > 1.0 {
            self.scale * ((self.shape - 1.0) / self.shape).powf(1.0 / self.shape)
        } else {
            0.0
        }
    }
}

/// Log-normal gain: ln X ~ N(μ, σ²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalGain {
    mu: f64,
    sigma: f64,
}

impl LogNormalGain {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return domain(format!("log-normal mu must be finite, got {mu}"));
        }
        positive("log-normal sigma", sigma)?;
        Ok(Self { mu, sigma })
    }
}

impl GainDistribution for LogNormalGain {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        std_normal_cdf((x.ln() - self.mu) / self.sigma)
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        check_quantile_arg(u)?;
        if u == 0.0 {
            return Ok(0.0);
        }
        Ok((self.mu + self.sigma * std_normal_quantile(u)?).exp())
    }

    fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let z = (x.ln() - self.mu) / self.sigma;
        (-0.5 * z * z).exp() / (x * self.sigma * (2.0 * std::f64::consts::PI).sqrt())
    }

    fn pdf_derivative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let s2 = self.sigma * self.sigma;
        -self.pdf(x) / x * (1.0 + (x.ln() - self.mu) / s2)
    }

    fn mean(&self) -> f64 {
        (self.mu + 0.5 * self.sigma * self.sigma).exp()
    }

    fn median(&self) -> f64 {
        self.mu.exp()
    }

    fn mode(&self) -> f64 {
        (self.mu - self.sigma * self.sigma).exp()
    }
}

/// Any of the supported gain families, parsed from a spec string such as
/// `nakagami:m=5,snr_db=10`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal {
    Rayleigh(RayleighGain),
    Nakagami(NakagamiGain),
    Weibull(WeibullGain),
    LogNormal(LogNormalGain),
}

impl Marginal {
    fn inner(&self) -> &dyn GainDistribution {
        match self {
            Marginal::Rayleigh(d) => d,
            Marginal::Nakagami(d) => d,
            Marginal::Weibull(d) => d,
            Marginal::LogNormal(d) => d,
        }
    }

    pub fn rayleigh(snr_linear: f64) -> Result<Self> {
        Ok(Marginal::Rayleigh(RayleighGain::new(snr_linear)?))
    }

    pub fn nakagami(m: f64, snr_linear: f64) -> Result<Self> {
        Ok(Marginal::Nakagami(NakagamiGain::new(m, snr_linear)?))
    }

    pub fn weibull(scale: f64, shape: f64) -> Result<Self> {
        Ok(Marginal::Weibull(WeibullGain::new(scale, shape)?))
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Ok(Marginal::LogNormal(LogNormalGain::new(mu, sigma)?))
    }
}

impl GainDistribution for Marginal {
    fn cdf(&self, x: f64) -> f64 {
        self.inner().cdf(x)
    }
    fn quantile(&self, u: f64) -> Result<f64> {
        self.inner().quantile(u)
    }
    fn pdf(&self, x: f64) -> f64 {
        self.inner().pdf(x)
    }
    fn pdf_derivative(&self, x: f64) -> f64 {
        self.inner().pdf_derivative(x)
    }
    fn mean(&self) -> f64 {
        self.inner().mean()
    }
    fn median(&self) -> f64 {
        self.inner().median()
    }
    fn mode(&self) -> f64 {
        self.inner().mode()
    }
}

/// Splits `name:k1=v1,k2=v2` into the family name and its parameters.
pub(crate) fn parse_spec(s: &str) -> std::result::Result<(String, Vec<(String, String)>), String> {
    let s = s.trim();
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n, r),
        None => (s, ""),
    };
    let mut params = Vec::new();
    for kv in rest.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got '{kv}'"))?;
        params.push((k.trim().to_ascii_lowercase(), v.trim().to_string()));
    }
    Ok((name.trim().to_ascii_lowercase(), params))
}

pub(crate) struct Params {
    family: String,
    entries: Vec<(String, String)>,
}

impl Params {
    pub(crate) fn new(family: &str, entries: Vec<(String, String)>) -> Self {
        Self {
            family: family.to_string(),
            entries,
        }
    }

    pub(crate) fn get(&self, key: &str) -> std::result::Result<f64, String> {
        let raw = self
            .entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v)
            .ok_or_else(|| format!("{}: missing parameter '{key}'", self.family))?;
        raw.parse::<f64>()
            .map_err(|_| format!("{}: parameter '{key}' is not a number: '{raw}'", self.family))
    }

    pub(crate) fn expect_only(&self, keys: &[&str]) -> std::result::Result<(), String> {
        match self.entries.iter().find(|(k, _)| !keys.contains(&k.as_str())) {
            Some((k, _)) => Err(format!("{}: unknown parameter '{k}'", self.family)),
            None => Ok(()),
        }
    }
}

impl FromStr for Marginal {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (family, entries) = parse_spec(s)?;
        let p = Params::new(&family, entries);
        let built = match family.as_str() {
            "rayleigh" => {
                p.expect_only(&["snr_db"])?;
                Marginal::rayleigh(db_to_linear(p.get("snr_db")?))
            }
            "nakagami" => {
                p.expect_only(&["m", "snr_db"])?;
                Marginal::nakagami(p.get("m")?, db_to_linear(p.get("snr_db")?))
            }
            "weibull" => {
                p.expect_only(&["scale", "shape"])?;
                Marginal::weibull(p.get("scale")?, p.get("shape")?)
            }
            "lognormal" => {
                p.expect_only(&["mu", "sigma"])?;
                Marginal::lognormal(p.get("mu")?, p.get("sigma")?)
            }
            other => return Err(format!("unknown distribution family '{other}'")),
        };
        built.map_err(|e| e.to_string())
    }
}

impl fmt::Display for Marginal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let db = |lin: f64| 10.0 * lin.log10();
        match self {
            Marginal::Rayleigh(d) => write!(f, "rayleigh:snr_db={}", db(d.snr)),
            Marginal::Nakagami(d) => write!(f, "nakagami:m={},snr_db={}", d.m, db(d.snr)),
            Marginal::Weibull(d) => write!(f, "weibull:scale={},shape={}", d.scale, d.shape),
            Marginal::LogNormal(d) => write!(f, "lognormal:mu={},sigma={}", d.mu, d.sigma),
        }
    }
}
