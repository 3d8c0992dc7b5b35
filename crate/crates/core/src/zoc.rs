//! Zero-outage capacities of dependent fading links.
//!
//! Rates are in bits per channel use; internally everything works with the
//! linear SNR threshold s* and natural logarithms.

use std::f64::consts::{E, LN_2};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::copulas::BivariateCopula;
use crate::error::{domain, Result, ZocError};
use crate::marginals::GainDistribution;
use crate::numerics::{
    find_root_bracketed, minimize_on_interval, reg_gamma_lower_inv, RootBracket, ToleranceConfig,
};

/// How the receiver combines the per-link gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Combiner {
    /// Maximum ratio combining, L = Σ x_i.
    Mrc,
    /// Selection combining, L = max x_i.
    Sc,
}

impl Combiner {
    pub fn apply(&self, x: &[f64]) -> f64 {
        match self {
            Self::Mrc => x.iter().sum(),
            Self::Sc => x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

impl FromStr for Combiner {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mrc" => Ok(Self::Mrc),
            "sc" => Ok(Self::Sc),
            other => Err(format!("unknown combiner '{other}' (expected mrc or sc)")),
        }
    }
}

impl fmt::Display for Combiner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mrc => "mrc",
            Self::Sc => "sc",
        })
    }
}

/// Which term of min{F1⁻¹(t), F2⁻¹(t), tangent} attains the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Candidate {
    Quantile1,
    Quantile2,
    Tangent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Converged,
    ClosedForm,
    NoZeroSet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZocResult {
    pub rate_bits: f64,
    pub snr_threshold: f64,
    pub tangent_x: Option<f64>,
    pub chosen_candidate: Option<Candidate>,
    pub solver_status: SolverStatus,
    /// F1(s*) for two-link selection combining.
    pub p_star: Option<f64>,
}

impl ZocResult {
    fn from_threshold(s: f64, status: SolverStatus) -> Self {
        Self {
            rate_bits: rate_from_snr(s),
            snr_threshold: s,
            tangent_x: None,
            chosen_candidate: None,
            solver_status: status,
            p_star: None,
        }
    }
}

/// log₂(1 + s).
pub fn rate_from_snr(s: f64) -> f64 {
    s.ln_1p() / LN_2
}

/// 2^r − 1.
pub fn snr_from_rate(r: f64) -> f64 {
    (r * LN_2).exp_m1()
}

fn tight() -> ToleranceConfig {
    ToleranceConfig {
        abs_tol: 1e-15,
        rel_tol: 1e-15,
        ..ToleranceConfig::default()
    }
}

/// Quantile with the point mass at infinity made explicit.
fn q<D: GainDistribution + ?Sized>(f: &D, u: f64) -> f64 {
    match f.quantile(u.clamp(0.0, 1.0)) {
        Ok(x) if x.is_finite() => x,
        _ => f64::INFINITY,
    }
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        domain(format!("t must lie in [0, 1], got {t}"))
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return domain(format!("need at least two links, got {n}"));
    }
    Ok(())
}

/// Minimizes L(F1⁻¹(u), F2⁻¹(β(u))) over u ∈ [0, w] where β is the upper
/// edge of the copula's zero set. Working in probability coordinates keeps
/// the domain compact even when the boundary runs off to infinity.
fn minimize_boundary<D1, D2, P>(f1: &D1, f2: &D2, w: f64, profile: P, comb: Combiner) -> Result<ZocResult>
where
    D1: GainDistribution + ?Sized,
    D2: GainDistribution + ?Sized,
    P: Fn(f64) -> f64,
{
    let objective = |u: f64| {
        let x1 = q(f1, u);
        let x2 = q(f2, profile(u));
        match comb {
            Combiner::Mrc => x1 + x2,
            Combiner::Sc => x1.max(x2),
        }
    };
    let (u, s) = minimize_on_interval(objective, 0.0, w, &tight())?;
    let mut res = ZocResult::from_threshold(s, SolverStatus::Converged);
    res.chosen_candidate = Some(if u == 0.0 {
        Candidate::Quantile2
    } else if u == w {
        Candidate::Quantile1
    } else {
        res.tangent_x = Some(q(f1, u));
        Candidate::Tangent
    });
    Ok(res)
}

/// Two-link MRC zero-outage capacity under the shifted-W copula C_t:
/// s* = min{F1⁻¹(t), F2⁻¹(t), min over the tangent of slope −1}.
pub fn mrc_two_link_ct<D1, D2>(f1: &D1, f2: &D2, t: f64) -> Result<ZocResult>
where
    D1: GainDistribution + ?Sized,
    D2: GainDistribution + ?Sized,
{
    check_t(t)?;
    if t == 0.0 {
        let mut res = ZocResult::from_threshold(q(f1, 0.0) + q(f2, 0.0), SolverStatus::Converged);
        res.chosen_candidate = Some(Candidate::Quantile2);
        return Ok(res);
    }
    minimize_boundary(f1, f2, t, |u| t - u, Combiner::Mrc)
}

/// Closed form of [`mrc_two_link_ct`] for two Rayleigh links with
/// exponential rates λ1 = 1/ρ1 and λ2 = 1/ρ2.
pub fn mrc_two_link_rayleigh(lambda1: f64, lambda2: f64, t: f64) -> Result<ZocResult> {
    if !(lambda1 > 0.0 && lambda2 > 0.0) || !lambda1.is_finite() || !lambda2.is_finite() {
        return domain(format!("rates must be positive, got {lambda1}, {lambda2}"));
    }
    check_t(t)?;
    let x_hi = -(-t).ln_1p() / lambda1;
    let x_free = -(lambda2 * (2.0 - t) / (lambda1 + lambda2)).ln() / lambda1;
    let x = x_free.clamp(0.0, x_hi);
    let s = x - (2.0 - t - (-lambda1 * x).exp()).ln() / lambda2;
    let mut res = ZocResult::from_threshold(s.max(0.0), SolverStatus::ClosedForm);
    res.chosen_candidate = Some(if x == 0.0 {
        Candidate::Quantile2
    } else if x == x_hi {
        Candidate::Quantile1
    } else {
        res.tangent_x = Some(x);
        Candidate::Tangent
    });
    Ok(res)
}

/// Maximum two-link zero-outage capacity over all copulas. Both combiners
/// attain it with countermonotonic gains.
pub fn max_zoc_two_link<D1, D2>(f1: &D1, f2: &D2, comb: Combiner) -> Result<ZocResult>
where
    D1: GainDistribution + ?Sized,
    D2: GainDistribution + ?Sized,
{
    match comb {
        Combiner::Mrc => mrc_two_link_ct(f1, f2, 1.0),
        Combiner::Sc => {
            let h = |p: f64| q(f1, p) - q(f2, 1.0 - p);
            let bracket = RootBracket::new(1e-12, 1.0 - 1e-12)?;
            let p = find_root_bracketed(h, bracket, &tight())?;
            let mut res = ZocResult::from_threshold(q(f1, p), SolverStatus::Converged);
            res.p_star = Some(p);
            Ok(res)
        }
    }
}

/// Zero-outage capacity of two links coupled by `c`, found by minimizing the
/// combiner over the boundary of the copula's zero set. Copulas whose zero
/// set lies on the axes give rate 0.
pub fn generic_two_link<D1, D2>(c: &BivariateCopula, f1: &D1, f2: &D2, comb: Combiner) -> Result<ZocResult>
where
    D1: GainDistribution + ?Sized,
    D2: GainDistribution + ?Sized,
{
    let Some(w) = c.zero_set_width() else {
        let s = match comb {
            Combiner::Mrc => q(f1, 0.0) + q(f2, 0.0),
            Combiner::Sc => q(f1, 0.0).max(q(f2, 0.0)),
        };
        return Ok(ZocResult::from_threshold(s, SolverStatus::NoZeroSet));
    };
    minimize_boundary(f1, f2, w, |u| c.zero_profile(u.min(w)).unwrap_or(0.0), comb)
}

/// Upper bound log₂(1 + n F⁻¹(1 − 1/n)) for n homogeneous B-SYM links.
pub fn mrc_outer_bound_w<D: GainDistribution + ?Sized>(f: &D, n: usize) -> Result<f64> {
    check_n(n)?;
    let n = n as f64;
    Ok(rate_from_snr(n * f.quantile(1.0 - 1.0 / n)?))
}

/// Upper bound log₂(1 + n E[X]) from joint mixability.
pub fn mrc_outer_bound_jm<D: GainDistribution + ?Sized>(f: &D, n: usize) -> Result<f64> {
    check_n(n)?;
    let mean = f.mean();
    if !mean.is_finite() {
        return Err(ZocError::NonFinite(format!("mean {mean}")));
    }
    Ok(rate_from_snr(n as f64 * mean))
}

/// (1 − 1/n)^{n−1}; decreases from ½ at n = 2 towards 1/e.
fn arch_level(n: usize) -> f64 {
    let n = n as f64;
    ((n - 1.0) * (-1.0 / n).ln_1p()).exp()
}

/// Achievable rate log₂(1 + n F⁻¹((1 − 1/n)^{n−1})) of the Archimedean
/// lower-bound copula.
pub fn mrc_inner_bound<D: GainDistribution + ?Sized>(f: &D, n: usize) -> Result<f64> {
    check_n(n)?;
    Ok(rate_from_snr(n as f64 * f.quantile(arch_level(n))?))
}

/// [`mrc_inner_bound`] for Rayleigh gains of mean `snr`, in closed form.
pub fn mrc_inner_bound_rayleigh(snr: f64, n: usize) -> Result<f64> {
    check_n(n)?;
    if !(snr > 0.0) {
        return domain(format!("snr must be positive, got {snr}"));
    }
    Ok(rate_from_snr(-snr * n as f64 * (-arch_level(n)).ln_1p()))
}

/// Limit of the gap between the mixability bound and the inner bound,
/// log₂(E[X] / F⁻¹(1/e)).
pub fn mrc_gap_limit<D: GainDistribution + ?Sized>(f: &D) -> Result<f64> {
    let q = f.quantile(1.0 / E)?;
    if q <= 0.0 {
        return Err(ZocError::DegenerateQuantile);
    }
    Ok((f.mean() / q).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BsymLemma {
    WBoundary,
    ArchBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BsymVerdict {
    pub lemma: BsymLemma,
    pub n: usize,
    pub condition_value: f64,
    pub holds: bool,
    pub quasiconcavity_ok: bool,
    /// F(mode), compared against `mode_threshold` as a quick screen.
    pub cdf_at_mode: f64,
    pub mode_threshold: f64,
    pub notes: String,
}

/// Grid abscissae covering the central 99.99 % of the mass.
fn mass_grid<D: GainDistribution + ?Sized>(f: &D, points: usize) -> Vec<f64> {
    let (lo, hi) = (5e-5, 1.0 - 5e-5);
    (0..points)
        .map(|i| q(f, lo + (hi - lo) * i as f64 / (points - 1) as f64))
        .collect()
}

/// True when the samples rise then fall (either part possibly empty), i.e.
/// no interior point sits clearly below a value on both sides.
fn is_unimodal(vals: &[f64]) -> bool {
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * scale.max(f64::MIN_POSITIVE);
    let mut suffix = vec![f64::NEG_INFINITY; vals.len() + 1];
    for i in (0..vals.len()).rev() {
        suffix[i] = suffix[i + 1].max(vals[i]);
    }
    let mut prefix = f64::NEG_INFINITY;
    for (i, &v) in vals.iter().enumerate() {
        prefix = prefix.max(v);
        if v < prefix.min(suffix[i]) - tol {
            return false;
        }
    }
    true
}

/// Sufficient condition for the W-boundary problem to be solved on the
/// identity line: f′(F⁻¹(1 − 1/n)) < 0, with f quasi-concave.
pub fn bsym_check_w<D: GainDistribution + ?Sized>(f: &D, n: usize) -> Result<BsymVerdict> {
    check_n(n)?;
    let nf = n as f64;
    let x = f.quantile(1.0 - 1.0 / nf)?;
    let value = f.pdf_derivative(x);
    let grid = mass_grid(f, ToleranceConfig::default().grid_points);
    let pdf: Vec<f64> = grid.iter().map(|&x| f.pdf(x)).collect();
    let qc = is_unimodal(&pdf);
    let holds = value < 0.0;
    let mut notes = Vec::new();
    if !holds {
        notes.push(format!("f'(F^-1(1-1/n)) = {value:.6} is not negative"));
    }
    if !qc {
        notes.push("density is not unimodal on the grid".to_string());
    }
    Ok(BsymVerdict {
        lemma: BsymLemma::WBoundary,
        n,
        condition_value: value,
        holds,
        quasiconcavity_ok: qc,
        cdf_at_mode: f.cdf(f.mode()),
        mode_threshold: 1.0 - 1.0 / nf,
        notes: notes.join("; "),
    })
}

/// Sufficient conditions for the Archimedean-boundary problem: the function
/// g(x) = F(x)^{(2−n)/(n−1)} f(x) / (n − 1) is quasi-concave and
/// f′(x*)/f(x*)² < ((n−2)/(n−1)) (1 − 1/n)^{1−n} at x* = F⁻¹((1 − 1/n)^{n−1}).
/// `condition_value` is the left side minus the right side.
pub fn bsym_check_arch<D: GainDistribution + ?Sized>(f: &D, n: usize) -> Result<BsymVerdict> {
    check_n(n)?;
    let nf = n as f64;
    let level = arch_level(n);
    let x = f.quantile(level)?;
    let fx = f.pdf(x);
    let rhs = (nf - 2.0) / (nf - 1.0) / level;
    let value = f.pdf_derivative(x) / (fx * fx) - rhs;

    let grid = mass_grid(f, ToleranceConfig::default().grid_points);
    let expo = (2.0 - nf) / (nf - 1.0);
    let g: Vec<f64> = grid
        .iter()
        .map(|&x| f.cdf(x).powf(expo) * f.pdf(x) / (nf - 1.0))
        .collect();
    let pdf: Vec<f64> = grid.iter().map(|&x| f.pdf(x)).collect();
    let g_ok = is_unimodal(&g);
    let qc = g_ok && is_unimodal(&pdf);
    let holds = g_ok && value < 0.0;
    let mut notes = Vec::new();
    if value >= 0.0 {
        notes.push(format!("slope condition violated by {value:.6}"));
    }
    if !g_ok {
        notes.push("g is not unimodal on the grid".to_string());
    }
    Ok(BsymVerdict {
        lemma: BsymLemma::ArchBoundary,
        n,
        condition_value: value,
        holds,
        quasiconcavity_ok: qc,
        cdf_at_mode: f.cdf(f.mode()),
        mode_threshold: 1.0 / E,
        notes: notes.join("; "),
    })
}

/// SC capacity of n identically distributed links under a maximally
/// dependent coupling: log₂(1 + F⁻¹(1 − 1/n)).
pub fn sc_n_homogeneous<D: GainDistribution + ?Sized>(f: &D, n: usize) -> Result<ZocResult> {
    check_n(n)?;
    let s = f.quantile(1.0 - 1.0 / n as f64)?;
    Ok(ZocResult::from_threshold(s, SolverStatus::ClosedForm))
}

/// log₂(1 + ρ ln n).
pub fn sc_n_rayleigh(snr: f64, n: usize) -> Result<f64> {
    check_n(n)?;
    Ok(rate_from_snr(snr * (n as f64).ln()))
}

/// log₂(1 + (ρ/m) P⁻¹(m, 1 − 1/n)).
pub fn sc_n_nakagami(m: f64, snr: f64, n: usize) -> Result<f64> {
    check_n(n)?;
    Ok(rate_from_snr(snr / m * reg_gamma_lower_inv(m, 1.0 - 1.0 / n as f64)?))
}

/// SC capacity of heterogeneous links: the threshold s with
/// Σ F_i(s) = n − 1.
pub fn sc_n_heterogeneous(fs: &[&dyn GainDistribution]) -> Result<ZocResult> {
    check_n(fs.len())?;
    let target = (fs.len() - 1) as f64;
    let h = |s: f64| fs.iter().map(|f| f.cdf(s)).sum::<f64>() - target;
    let mut hi = 1.0;
    while h(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 2f64.powi(60) {
            return Err(ZocError::NoConvergence {
                iterations: 60,
                context: "bracket expansion for the selection-combining threshold".into(),
            });
        }
    }
    let s = find_root_bracketed(h, RootBracket::new(0.0, hi)?, &tight())?;
    let mut res = ZocResult::from_threshold(s, SolverStatus::Converged);
    if fs.len() == 2 {
        res.p_star = Some(fs[0].cdf(s));
    }
    Ok(res)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub inner_bits: f64,
    pub outer_w_bits: f64,
    pub outer_jm_bits: f64,
    pub gap_bits: f64,
    pub gap_limit_bits: f64,
    pub bsym_w: bool,
    pub bsym_arch: bool,
    pub notes: String,
}

/// Inner and outer MRC bounds for every n in `lo..=hi`, ordered by n.
/// The bounds are evaluated even when the B-SYM screens fail; the flags
/// record it.
pub fn bounds_report<D: GainDistribution + ?Sized>(f: &D, lo: usize, hi: usize) -> Result<Vec<BoundsReport>> {
    if lo < 2 || hi < lo || hi > 1_000_000 {
        return domain(format!("n range {lo}..={hi} must lie within 2..=1000000"));
    }
    let limit = mrc_gap_limit(f)?;
    (lo..=hi)
        .into_par_iter()
        .map(|n| {
            let inner = mrc_inner_bound(f, n)?;
            let outer_w = mrc_outer_bound_w(f, n)?;
            let outer_jm = mrc_outer_bound_jm(f, n)?;
            let w = bsym_check_w(f, n)?;
            let arch = bsym_check_arch(f, n)?;
            let notes = [("w-boundary", &w), ("arch-boundary", &arch)]
                .iter()
                .filter(|(_, v)| !v.notes.is_empty())
                .map(|(l, v)| format!("{l}: {}", v.notes))
                .collect::<Vec<_>>()
                .join("; ");
            Ok(BoundsReport {
                n,
                inner_bits: inner,
                outer_w_bits: outer_w,
                outer_jm_bits: outer_jm,
                gap_bits: outer_jm - inner,
                gap_limit_bits: limit,
                bsym_w: w.holds && w.quasiconcavity_ok,
                bsym_arch: arch.holds,
                notes,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marginals::Marginal;
    use proptest::prelude::*;

    fn rayleigh(snr: f64) -> Marginal {
        Marginal::rayleigh(snr).unwrap()
    }

    fn nakagami(m: f64, snr: f64) -> Marginal {
        Marginal::nakagami(m, snr).unwrap()
    }

    fn db(x: f64) -> f64 {
        10f64.powf(x / 10.0)
    }

    #[test]
    fn symmetric_rayleigh_maximum() {
        let want = (1.0 + 2.0 * 2f64.ln()).log2();
        let r = rayleigh(1.0);
        let ct = mrc_two_link_ct(&r, &r, 1.0).unwrap();
        assert!((ct.rate_bits - want).abs() < 1e-12);
        assert_eq!(ct.chosen_candidate, Some(Candidate::Tangent));
        assert!((ct.tangent_x.unwrap() - 2f64.ln()).abs() < 1e-6);
        let cf = mrc_two_link_rayleigh(1.0, 1.0, 1.0).unwrap();
        assert!((cf.rate_bits - want).abs() < 1e-14);
        assert!((cf.tangent_x.unwrap() - 2f64.ln()).abs() < 1e-14);
        assert!((max_zoc_two_link(&r, &r, Combiner::Mrc).unwrap().rate_bits - want).abs() < 1e-12);
    }

    #[test]
    fn tangent_and_quantile_cases() {
        let (l1, l2) = (1.0, 3.162);
        let (r1, r2) = (rayleigh(1.0 / l1), rayleigh(1.0 / l2));
        let cf = mrc_two_link_rayleigh(l1, l2, 0.9).unwrap();
        assert!((cf.tangent_x.unwrap() - 0.1795).abs() < 1e-3);
        assert!((cf.snr_threshold - 0.6003).abs() < 1e-3);
        let ct = mrc_two_link_ct(&r1, &r2, 0.9).unwrap();
        assert!((ct.snr_threshold - cf.snr_threshold).abs() < 1e-9);
        assert_eq!(ct.chosen_candidate, Some(Candidate::Tangent));

        let ct = mrc_two_link_ct(&r1, &r2, 0.5).unwrap();
        assert_eq!(ct.chosen_candidate, Some(Candidate::Quantile2));
        assert!((ct.snr_threshold - r2.quantile(0.5).unwrap()).abs() < 1e-15);
        assert!((ct.snr_threshold - 0.2192).abs() < 1e-3);
        assert_eq!(mrc_two_link_rayleigh(l1, l2, 0.5).unwrap().chosen_candidate, Some(Candidate::Quantile2));
    }

    #[test]
    fn zero_t_gives_zero_rate() {
        let r = rayleigh(2.0);
        let n = nakagami(5.0, 1.0);
        assert_eq!(mrc_two_link_ct(&r, &n, 0.0).unwrap().rate_bits, 0.0);
        assert_eq!(mrc_two_link_rayleigh(1.0, 2.0, 0.0).unwrap().rate_bits, 0.0);
        assert!(mrc_two_link_ct(&r, &n, 1.5).is_err());
        assert!(mrc_two_link_rayleigh(0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn sc_two_link_examples() {
        let r = rayleigh(10.0);
        let n = nakagami(5.0, 10.0);
        let res = max_zoc_two_link(&r, &n, Combiner::Sc).unwrap();
        assert!((res.p_star.unwrap() - 0.575).abs() < 1e-3);
        assert!((res.snr_threshold - 8.554).abs() < 1e-2);
        assert!((res.rate_bits - 3.256).abs() < 5e-3);
        let het = sc_n_heterogeneous(&[&r, &n]).unwrap();
        assert!((het.rate_bits - res.rate_bits).abs() < 1e-9);

        let same = max_zoc_two_link(&n, &n, Combiner::Sc).unwrap();
        assert!((same.p_star.unwrap() - 0.5).abs() < 1e-9);
        assert!((same.rate_bits - rate_from_snr(n.median())).abs() < 1e-9);
    }

    #[test]
    fn generic_path_examples() {
        let r = rayleigh(1.0);
        let w = generic_two_link(&BivariateCopula::Countermonotone, &r, &r, Combiner::Sc).unwrap();
        assert!((w.rate_bits - (1.0 + 2f64.ln()).log2()).abs() < 1e-9);
        assert!((w.rate_bits - 0.75971).abs() < 1e-5);

        let cl = generic_two_link(&BivariateCopula::clayton(-0.75).unwrap(), &r, &r, Combiner::Mrc).unwrap();
        assert!(cl.rate_bits > 0.1);
        // Clayton's zero set lies inside W's, so it cannot beat the maximum
        assert!(cl.rate_bits <= max_zoc_two_link(&r, &r, Combiner::Mrc).unwrap().rate_bits + 1e-12);

        for c in [BivariateCopula::Independence, BivariateCopula::Comonotone] {
            let res = generic_two_link(&c, &r, &r, Combiner::Mrc).unwrap();
            assert_eq!(res.rate_bits, 0.0);
            assert_eq!(res.solver_status, SolverStatus::NoZeroSet);
        }
    }

    #[test]
    fn circular_matches_shifted_w() {
        let (r1, r2) = (rayleigh(1.0), rayleigh(db(-5.0)));
        for t in [0.1, 0.4, 0.7, 0.95, 1.0] {
            for comb in [Combiner::Mrc, Combiner::Sc] {
                let a = generic_two_link(&BivariateCopula::circular(t).unwrap(), &r1, &r2, comb).unwrap();
                let b = generic_two_link(&BivariateCopula::shifted_w(t).unwrap(), &r1, &r2, comb).unwrap();
                assert!((a.rate_bits - b.rate_bits).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn outer_and_inner_bound_examples() {
        let r = rayleigh(1.0);
        let two = (1.0 + 2.0 * 2f64.ln()).log2();
        assert!((mrc_outer_bound_w(&r, 2).unwrap() - two).abs() < 1e-12);
        assert!((mrc_outer_bound_w(&r, 4).unwrap() - (1.0 + 4.0 * 4f64.ln()).log2()).abs() < 1e-12);
        assert!((mrc_outer_bound_w(&r, 4).unwrap() - 2.7104).abs() < 1e-4);
        let n5 = nakagami(5.0, 1.0);
        assert!((mrc_outer_bound_w(&n5, 2).unwrap() - 1.520).abs() < 2e-3);

        assert!((mrc_outer_bound_jm(&r, 4).unwrap() - 5f64.log2()).abs() < 1e-12);
        assert!((mrc_outer_bound_jm(&n5, 2).unwrap() - 3f64.log2()).abs() < 1e-12);
        assert!((mrc_outer_bound_jm(&rayleigh(2.0), 2).unwrap() - 5f64.log2()).abs() < 1e-12);

        assert!((mrc_inner_bound(&r, 2).unwrap() - two).abs() < 1e-12);
        let three = (1.0 - 3.0 * (1.0f64 - 4.0 / 9.0).ln()).log2();
        assert!((mrc_inner_bound(&r, 3).unwrap() - three).abs() < 1e-12);
        assert!((three - 1.466).abs() < 1e-3);
        for n in [2, 3, 7, 50, 1000] {
            for snr in [0.1, 1.0, 10.0] {
                let a = mrc_inner_bound(&rayleigh(snr), n).unwrap();
                let b = mrc_inner_bound_rayleigh(snr, n).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert!(mrc_outer_bound_w(&r, 1).is_err());
        assert!(mrc_inner_bound(&r, 0).is_err());
    }

    #[test]
    fn inner_bound_approaches_gamma_limit() {
        let f = nakagami(5.0, 1.0);
        let n = 100_000usize;
        let limit = rate_from_snr(n as f64 * 0.2 * reg_gamma_lower_inv(5.0, 1.0 / E).unwrap());
        assert!((mrc_inner_bound(&f, n).unwrap() - limit).abs() < 1e-4);
    }

    #[test]
    fn gap_limit_examples() {
        let want = -(1.0 - (E - 1.0).ln()).log2();
        for snr in [0.1, 1.0, 10.0] {
            let g = mrc_gap_limit(&rayleigh(snr)).unwrap();
            assert!((g - want).abs() < 1e-12);
            assert!((g - 1.12).abs() < 0.01);
        }
        let g = mrc_gap_limit(&nakagami(5.0, 1.0)).unwrap();
        assert!((g - 0.328).abs() < 5e-3);
    }

    #[test]
    fn bsym_examples() {
        for n in 2..=10 {
            assert!(bsym_check_w(&rayleigh(1.0), n).unwrap().holds);
            assert!(bsym_check_arch(&rayleigh(1.0), n).unwrap().holds);
        }
        let weib = Marginal::weibull(1.0, 6.0).unwrap();
        let v = bsym_check_w(&weib, 2).unwrap();
        assert!(!v.holds);
        assert!((v.condition_value - 1.98).abs() < 0.05);
        assert!(v.quasiconcavity_ok);
        assert!(!bsym_check_arch(&weib, 2).unwrap().holds);

        let n5 = nakagami(5.0, 1.0);
        assert!(bsym_check_w(&n5, 2).unwrap().holds);
        let a = bsym_check_arch(&n5, 4).unwrap();
        assert!(a.holds && a.quasiconcavity_ok);
        assert!(a.cdf_at_mode < 1.0 - 1.0 / 4.0);
    }

    #[test]
    fn unimodality_scan() {
        assert!(is_unimodal(&[1.0, 2.0, 3.0, 2.0, 1.0]));
        assert!(is_unimodal(&[3.0, 2.0, 1.0]));
        assert!(is_unimodal(&[1.0, 1.0, 1.0]));
        assert!(!is_unimodal(&[1.0, 3.0, 1.0, 3.0, 1.0]));
        assert!(!is_unimodal(&[3.0, 1.0, 3.0]));
    }

    #[test]
    fn sc_homogeneous_examples() {
        let r = rayleigh(1.0);
        assert!((sc_n_homogeneous(&r, 2).unwrap().rate_bits - 0.75971).abs() < 1e-5);
        let r10 = rayleigh(10.0);
        let want = (1.0 + 10.0 * 10f64.ln()).log2();
        assert!((sc_n_homogeneous(&r10, 10).unwrap().rate_bits - want).abs() < 1e-12);
        assert!((want - 4.5865).abs() < 1e-4);
        let n10 = nakagami(5.0, 10.0);
        assert!((sc_n_homogeneous(&n10, 2).unwrap().rate_bits - 3.369).abs() < 2e-3);

        for n in [2, 3, 5, 10, 40] {
            for snr in [0.3, 1.0, 10.0] {
                let gen = sc_n_homogeneous(&rayleigh(snr), n).unwrap().rate_bits;
                assert!((gen - sc_n_rayleigh(snr, n).unwrap()).abs() < 1e-9);
                for m in [0.5, 2.0, 5.0] {
                    let gen = sc_n_homogeneous(&nakagami(m, snr), n).unwrap().rate_bits;
                    assert!((gen - sc_n_nakagami(m, snr, n).unwrap()).abs() < 1e-9);
                }
                let f = nakagami(5.0, snr);
                let list: Vec<&dyn GainDistribution> = vec![&f; n];
                let het = sc_n_heterogeneous(&list).unwrap().rate_bits;
                assert!((het - sc_n_homogeneous(&f, n).unwrap().rate_bits).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sc_capacity_grows_with_m() {
        let rates: Vec<f64> = [2.0, 5.0, 10.0]
            .iter()
            .map(|&m| sc_n_homogeneous(&nakagami(m, 10.0), 2).unwrap().rate_bits)
            .collect();
        assert!(rates[0] < rates[1] && rates[1] < rates[2]);
    }

    #[test]
    fn bounds_report_properties() {
        let r = rayleigh(1.0);
        let rows = bounds_report(&r, 2, 10).unwrap();
        assert_eq!(rows.len(), 9);
        assert_eq!(rows[0].n, 2);
        assert!((rows[0].inner_bits - rows[0].outer_w_bits).abs() < 1e-12);
        let f = nakagami(5.0, 1.0);
        let rows = bounds_report(&f, 2, 10).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].gap_bits >= w[0].gap_bits - 1e-12);
        }
        for row in &rows {
            assert!(row.gap_bits <= 0.328 + 5e-3);
            assert!(row.gap_bits <= row.gap_limit_bits + 1e-9);
            assert!(row.bsym_w && row.bsym_arch, "{row:?}");
        }
        assert_eq!(bounds_report(&f, 2, 2).unwrap().len(), 1);
        let weib = Marginal::weibull(1.0, 6.0).unwrap();
        let rows = bounds_report(&weib, 2, 2).unwrap();
        assert!(!rows[0].bsym_w);
        assert!(!rows[0].notes.is_empty());
        assert!(bounds_report(&f, 1, 4).is_err());
    }

    #[test]
    fn n2_collapse() {
        for f in [rayleigh(1.0), rayleigh(3.0), nakagami(5.0, 1.0), nakagami(2.0, 0.5)] {
            let two = max_zoc_two_link(&f, &f, Combiner::Mrc).unwrap().rate_bits;
            assert!((mrc_inner_bound(&f, 2).unwrap() - two).abs() < 1e-9);
            assert!((mrc_outer_bound_w(&f, 2).unwrap() - two).abs() < 1e-9);
        }
    }

    #[test]
    fn monotone_in_t_and_weak_link() {
        let ts: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let (weak, s5, s10) = (rayleigh(db(-5.0)), rayleigh(db(5.0)), rayleigh(db(10.0)));
        let mut prev = 0.0;
        for &t in &ts {
            let a = mrc_two_link_ct(&weak, &s5, t).unwrap().rate_bits;
            let b = mrc_two_link_ct(&weak, &s10, t).unwrap().rate_bits;
            assert!(a >= prev - 1e-12);
            prev = a;
            if t <= 0.85 {
                assert!((a - b).abs() < 1e-6, "t={t}: {a} vs {b}");
            }
        }
    }

    proptest! {
        #[test]
        fn closed_form_generic_and_ct_agree(l1 in 0.05f64..20.0, l2 in 0.05f64..20.0, t in 0.0f64..=1.0) {
            let (f1, f2) = (rayleigh(1.0 / l1), rayleigh(1.0 / l2));
            let cf = mrc_two_link_rayleigh(l1, l2, t).unwrap().rate_bits;
            let ct = mrc_two_link_ct(&f1, &f2, t).unwrap().rate_bits;
            let gen = generic_two_link(&BivariateCopula::shifted_w(t).unwrap(), &f1, &f2, Combiner::Mrc).unwrap().rate_bits;
            prop_assert!((cf - ct).abs() < 1e-6, "{} {}", cf, ct);
            prop_assert!((ct - gen).abs() < 1e-12);
        }

        #[test]
        fn candidate_dominance(m1 in 0.5f64..8.0, m2 in 0.5f64..8.0, s1 in 0.1f64..10.0, s2 in 0.1f64..10.0, t in 0.0f64..=1.0) {
            let (f1, f2) = (nakagami(m1, s1), nakagami(m2, s2));
            let res = mrc_two_link_ct(&f1, &f2, t).unwrap();
            prop_assert!(res.rate_bits >= 0.0);
            prop_assert!((res.rate_bits - rate_from_snr(res.snr_threshold)).abs() < 1e-12);
            prop_assert!(res.snr_threshold <= q(&f1, t) + 1e-12);
            prop_assert!(res.snr_threshold <= q(&f2, t) + 1e-12);
        }

        #[test]
        fn sc_heterogeneous_matches_two_link(s1 in 0.1f64..20.0, s2 in 0.1f64..20.0, m in 0.5f64..8.0) {
            let (f1, f2) = (rayleigh(s1), nakagami(m, s2));
            let het = sc_n_heterogeneous(&[&f1, &f2]).unwrap().rate_bits;
            let two = max_zoc_two_link(&f1, &f2, Combiner::Sc).unwrap().rate_bits;
            prop_assert!((het - two).abs() < 1e-9, "{} {}", het, two);
        }

        #[test]
        fn thresholds_scale_with_snr(c in 0.1f64..10.0, t in 0.05f64..=1.0, n in 2usize..12) {
            let base = mrc_two_link_ct(&rayleigh(1.0), &rayleigh(2.0), t).unwrap().snr_threshold;
            let scaled = mrc_two_link_ct(&rayleigh(c), &rayleigh(2.0 * c), t).unwrap().snr_threshold;
            prop_assert!((scaled - c * base).abs() <= 1e-8 * (1.0 + c * base));
            let base = sc_n_homogeneous(&nakagami(3.0, 1.0), n).unwrap().snr_threshold;
            let scaled = sc_n_homogeneous(&nakagami(3.0, c), n).unwrap().snr_threshold;
            prop_assert!((scaled - c * base).abs() <= 1e-10 * (1.0 + c * base));
        }

        #[test]
        fn bound_ordering(m in 0.5f64..10.0, n in 2usize..200) {
            let f = nakagami(m, 1.0);
            let inner = mrc_inner_bound(&f, n).unwrap();
            prop_assert!(inner <= mrc_outer_bound_w(&f, n).unwrap() + 1e-9);
            prop_assert!(inner <= mrc_outer_bound_jm(&f, n).unwrap() + 1e-9);
        }
    }
}
