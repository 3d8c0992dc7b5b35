//! Monte Carlo checks of zero-outage claims: draw dependent gain vectors from
//! explicit couplings and count outages at and just above a claimed rate.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::copulas::{ArchLowerCopula, BivariateCopula, Copula};
use crate::error::{domain, Result, ZocError};
use crate::marginals::GainDistribution;
use crate::rng::UniformStream;
use crate::table::format_float;
use crate::zoc::{self, snr_from_rate, Combiner};

/// Samples per parallel work unit. Output never depends on it.
const CHUNK: usize = 4096;

/// Largest double below one; keeps F⁻¹ finite on boundary draws.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Relative slack when comparing a combiner value with the threshold, so
/// that rounding in F⁻¹ on the exact support is not counted as an outage.
const ROUNDING_SLACK: f64 = 1e-9;

/// Joint law used to draw gain vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Copula(Copula),
    /// V_i = frac(U + (i−1)/n), a maximally dependent coupling.
    Rotation { n: usize },
    /// Interval rearrangement attaining the heterogeneous SC capacity.
    HeteroSc,
}

impl Coupling {
    /// Required number of marginals, if fixed by the coupling.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Copula(c) => Some(c.dim()),
            Self::Rotation { n } => Some(*n),
            Self::HeteroSc => None,
        }
    }
}

impl FromStr for Coupling {
    type Err = String;

    /// `rotation:n=<k>`, `hetero_sc`, or any copula spec.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let head = s.split(':').next().unwrap_or("").trim().to_ascii_lowercase();
        match head.as_str() {
            "hetero_sc" if !s.contains(':') => Ok(Self::HeteroSc),
            "rotation" => {
                let n = s
                    .split_once(':')
                    .and_then(|(_, r)| r.trim().strip_prefix("n="))
                    .and_then(|v| v.trim().parse::<usize>().ok())
                    .ok_or_else(|| format!("expected rotation:n=<integer>, got '{s}'"))?;
                if n < 2 {
                    return Err(format!("rotation needs n >= 2, got {n}"));
                }
                Ok(Self::Rotation { n })
            }
            _ => s.parse().map(Self::Copula),
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Copula(c) => c.fmt(f),
            Self::Rotation { n } => write!(f, "rotation:n={n}"),
            Self::HeteroSc => f.write_str("hetero_sc"),
        }
    }
}

/// N gain vectors of length n, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    gains: Vec<f64>,
    dim: usize,
    pub seed: u64,
    pub coupling: Coupling,
}

impl SampleBatch {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.gains.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.gains[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.gains.chunks_exact(self.dim)
    }

    /// `x1,...,xn` header, one sample per line.
    pub fn to_csv(&self) -> String {
        let header: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
        let mut out = header.join(",");
        out.push('\n');
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Generates `count` rows in parallel chunks; `fill(first, len)` returns the
/// uniforms of rows first..first+len, row-major.
fn build<F>(fs: &[&dyn GainDistribution], count: usize, fill: F) -> Vec<f64>
where
    F: Fn(usize, usize) -> Vec<f64> + Sync,
{
    let n = fs.len();
    let starts: Vec<usize> = (0..count).step_by(CHUNK).collect();
    starts
        .into_par_iter()
        .flat_map_iter(|first| {
            let len = CHUNK.min(count - first);
            let mut u = fill(first, len);
            for (k, v) in u.iter_mut().enumerate() {
                let f = fs[k % n];
                *v = f.quantile(v.clamp(0.0, BELOW_ONE)).expect("probability below one");
            }
            u
        })
        .collect()
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(ZocError::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// X_i = F_i⁻¹(U_i) with U drawn from the copula.
pub fn gains_from_copula(c: &Copula, fs: &[&dyn GainDistribution], count: usize, seed: u64) -> Result<SampleBatch> {
    check_dim(c.dim(), fs.len())?;
    let gains = match c {
        Copula::Bivariate(b) => build(fs, count, |first, len| bivariate_uniforms(b, seed, first, len)),
        Copula::ArchLower(a) => build(fs, count, |first, len| arch_uniforms(a, seed, first, len)),
    };
    Ok(SampleBatch {
        gains,
        dim: fs.len(),
        seed,
        coupling: Coupling::Copula(*c),
    })
}

fn bivariate_uniforms(c: &BivariateCopula, seed: u64, first: usize, len: usize) -> Vec<f64> {
    c.sample_range(seed, first, len)
        .into_iter()
        .flat_map(|(u, v)| [u, v])
        .collect()
}

fn arch_uniforms(a: &ArchLowerCopula, seed: u64, first: usize, len: usize) -> Vec<f64> {
    a.sample_range(seed, first, len).into_iter().flatten().collect()
}

fn rotation_uniforms(n: usize, seed: u64, first: usize, len: usize) -> Vec<f64> {
    let mut stream = UniformStream::at_sample(seed, 1, first);
    let mut out = Vec::with_capacity(len * n);
    for _ in 0..len {
        let u = stream.next_open01();
        for i in 0..n {
            let v = u + i as f64 / n as f64;
            out.push(v - v.floor());
        }
    }
    out
}

/// Maximally dependent SC coupling for n identically distributed links:
/// max_i X_i ≥ F⁻¹(1 − 1/n) on every sample.
pub fn rotation_coupling_sc<D: GainDistribution>(f: &D, n: usize, count: usize, seed: u64) -> Result<SampleBatch> {
    let fs: Vec<&dyn GainDistribution> = vec![f; n];
    coupled_gains(&Coupling::Rotation { n }, &fs, count, seed)
}

/// SC coupling for heterogeneous links: each sample has at least one
/// X_i ≥ s*, where Σ F_i(s*) = n − 1.
pub fn hetero_sc_coupling(fs: &[&dyn GainDistribution], count: usize, seed: u64) -> Result<SampleBatch> {
    let s = zoc::sc_n_heterogeneous(fs)?.snr_threshold;
    let lower: Vec<f64> = fs.iter().map(|f| f.cdf(s)).collect();
    // I_i = [c_{i-1}, c_i) has length q_i = 1 − F_i(s*)
    let mut edges = vec![0.0];
    for p in &lower {
        edges.push(edges.last().unwrap() + (1.0 - p));
    }
    let n = fs.len();
    let gains = build(fs, count, |first, len| {
        let mut stream = UniformStream::at_sample(seed, 1, first);
        let mut out = Vec::with_capacity(len * n);
        for _ in 0..len {
            let u = stream.next_open01();
            let hit = (0..n).find(|&i| u < edges[i + 1]).unwrap_or(n - 1);
            for j in 0..n {
                let v = if j == hit {
                    lower[j] + (u - edges[j])
                } else if u < edges[j] {
                    u
                } else {
                    u - (1.0 - lower[j])
                };
                out.push(v.clamp(0.0, 1.0));
            }
        }
        out
    });
    Ok(SampleBatch {
        gains,
        dim: n,
        seed,
        coupling: Coupling::HeteroSc,
    })
}

/// Dispatches on the coupling kind.
pub fn coupled_gains(coupling: &Coupling, fs: &[&dyn GainDistribution], count: usize, seed: u64) -> Result<SampleBatch> {
    match coupling {
        Coupling::Copula(c) => gains_from_copula(c, fs, count, seed),
        Coupling::Rotation { n } => {
            check_dim(*n, fs.len())?;
            let gains = build(fs, count, |first, len| rotation_uniforms(*n, seed, first, len));
            Ok(SampleBatch {
                gains,
                dim: *n,
                seed,
                coupling: *coupling,
            })
        }
        Coupling::HeteroSc => hetero_sc_coupling(fs, count, seed),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ZeroOutage,
    OutageObserved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageReport {
    pub rate_bits: f64,
    pub threshold: f64,
    pub outage_count: usize,
    pub sample_count: usize,
    pub min_combiner_value: f64,
    pub seed: u64,
    pub verdict: Verdict,
}

/// Counts samples whose combined gain falls below 2^rate − 1.
pub fn empirical_outage(batch: &SampleBatch, comb: Combiner, rate_bits: f64) -> Result<OutageReport> {
    if !(rate_bits >= 0.0) {
        return domain(format!("rate must be non-negative, got {rate_bits}"));
    }
    let threshold = snr_from_rate(rate_bits);
    let cut = threshold - ROUNDING_SLACK * threshold.max(1.0);
    let (count, min) = batch
        .gains
        .par_chunks(batch.dim * CHUNK)
        .map(|block| {
            block.chunks_exact(batch.dim).fold((0usize, f64::INFINITY), |(c, m), row| {
                let l = comb.apply(row);
                (c + usize::from(l < cut), m.min(l))
            })
        })
        .reduce(|| (0, f64::INFINITY), |a, b| (a.0 + b.0, a.1.min(b.1)));
    Ok(OutageReport {
        rate_bits,
        threshold,
        outage_count: count,
        sample_count: batch.len(),
        min_combiner_value: min,
        seed: batch.seed,
        verdict: if count == 0 {
            Verdict::ZeroOutage
        } else {
            Verdict::OutageObserved
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub coupling: String,
    pub combiner: Combiner,
    pub claimed_rate_bits: f64,
    pub delta_bits: f64,
    pub samples: usize,
    pub seed: u64,
    pub at_claim: OutageReport,
    pub above_claim: OutageReport,
    pub passed: bool,
}

/// Draws one batch and checks it for zero outage at the claim and for some
/// outage at claim + delta.
pub fn verify_zoc(
    coupling: &Coupling,
    fs: &[&dyn GainDistribution],
    comb: Combiner,
    claimed_rate_bits: f64,
    samples: usize,
    seed: u64,
    delta_bits: f64,
) -> Result<Verification> {
    if samples < 1000 {
        return domain(format!("verification needs at least 1000 samples, got {samples}"));
    }
    if !(delta_bits > 0.0) {
        return domain(format!("delta must be positive, got {delta_bits}"));
    }
    let batch = coupled_gains(coupling, fs, samples, seed)?;
    let at_claim = empirical_outage(&batch, comb, claimed_rate_bits)?;
    let above_claim = empirical_outage(&batch, comb, claimed_rate_bits + delta_bits)?;
    let passed = at_claim.verdict == Verdict::ZeroOutage && above_claim.verdict == Verdict::OutageObserved;
    Ok(Verification {
        coupling: coupling.to_string(),
        combiner: comb,
        claimed_rate_bits,
        delta_bits,
        samples,
        seed,
        at_claim,
        above_claim,
        passed,
    })
}

fn homogeneous(fs: &[&dyn GainDistribution]) -> bool {
    // marginals are compared through a few quantiles; the trait has no Eq
    let probe = [0.1, 0.5, 0.9];
    fs.windows(2).all(|w| {
        probe
            .iter()
            .all(|&p| w[0].quantile(p).ok() == w[1].quantile(p).ok())
    })
}

/// The analytic zero-outage rate that `coupling` attains with marginals `fs`
/// under `comb`. Refuses combinations without a known optimum.
pub fn matched_claim(coupling: &Coupling, fs: &[&dyn GainDistribution], comb: Combiner) -> Result<f64> {
    if let Some(d) = coupling.dim() {
        check_dim(d, fs.len())?;
    }
    match (coupling, comb) {
        (Coupling::Copula(Copula::Bivariate(c)), _) => Ok(zoc::generic_two_link(c, fs[0], fs[1], comb)?.rate_bits),
        (Coupling::Copula(Copula::ArchLower(a)), Combiner::Mrc) => {
            if !homogeneous(fs) {
                return Err(ZocError::Unsupported(
                    "the Archimedean lower bound is only characterized for identical marginals".into(),
                ));
            }
            zoc::mrc_inner_bound(fs[0], a.dim())
        }
        (Coupling::Rotation { n }, Combiner::Sc) => {
            if !homogeneous(fs) {
                return Err(ZocError::Unsupported(
                    "rotation coupling is optimal only for identical marginals; use hetero_sc".into(),
                ));
            }
            Ok(zoc::sc_n_homogeneous(fs[0], *n)?.rate_bits)
        }
        (Coupling::HeteroSc, Combiner::Sc) => Ok(zoc::sc_n_heterogeneous(fs)?.rate_bits),
        (Coupling::HeteroSc, Combiner::Mrc) if fs.len() > 2 => Err(ZocError::Unsupported(
            "no optimal coupling is known for heterogeneous MRC with more than two links".into(),
        )),
        _ => Err(ZocError::Unsupported(format!(
            "no analytic zero-outage rate for coupling {coupling} with {comb}"
        ))),
    }
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `sample` and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at significance 0.01.
pub fn ks_critical_01(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marginals::Marginal;

    fn rayleigh(snr: f64) -> Marginal {
        Marginal::rayleigh(snr).unwrap()
    }

    fn nakagami(m: f64, snr: f64) -> Marginal {
        Marginal::nakagami(m, snr).unwrap()
    }

    fn bi(c: BivariateCopula) -> Copula {
        Copula::Bivariate(c)
    }

    #[test]
    fn deterministic_and_chunk_independent() {
        let r = rayleigh(1.0);
        let fs: Vec<&dyn GainDistribution> = vec![&r, &r];
        let c = bi(BivariateCopula::clayton(-0.75).unwrap());
        let a = gains_from_copula(&c, &fs, 10_000, 3).unwrap();
        let b = gains_from_copula(&c, &fs, 10_000, 3).unwrap();
        assert_eq!(a, b);
        // rows 0..5000 of a longer batch equal a shorter batch
        let short = gains_from_copula(&c, &fs, 5000, 3).unwrap();
        assert_eq!(short.row(4999), a.row(4999));
        // the serial sampler produces the same uniforms
        let serial = BivariateCopula::clayton(-0.75).unwrap().sample(10_000, 3);
        let (u, v) = serial[7777];
        let row = a.row(7777);
        assert_eq!(row[0], r.quantile(u).unwrap());
        assert_eq!(row[1], r.quantile(v).unwrap());
    }

    #[test]
    fn shifted_w_one_lies_on_countermonotone_curve() {
        let r = rayleigh(1.0);
        let fs: Vec<&dyn GainDistribution> = vec![&r, &r];
        let b = gains_from_copula(&bi(BivariateCopula::shifted_w(1.0).unwrap()), &fs, 5000, 1).unwrap();
        for row in b.rows() {
            let x2 = -(-(-row[0]).exp()).ln_1p();
            assert!((row[1] - x2).abs() <= 1e-9 * (1.0 + x2), "{row:?}");
        }
    }

    #[test]
    fn clayton_has_no_joint_deep_fades() {
        let r = rayleigh(1.0);
        let fs: Vec<&dyn GainDistribution> = vec![&r, &r];
        let b = gains_from_copula(&bi(BivariateCopula::clayton(-0.75).unwrap()), &fs, 2000, 0x5EED).unwrap();
        assert_eq!(b.rows().filter(|r| r[0] < 0.05 && r[1] < 0.05).count(), 0);
    }

    #[test]
    fn independence_is_uncorrelated() {
        let r = rayleigh(1.0);
        let fs: Vec<&dyn GainDistribution> = vec![&r, &r];
        let n = 20_000;
        let b = gains_from_copula(&bi(BivariateCopula::Independence), &fs, n, 9).unwrap();
        let us: Vec<(f64, f64)> = b.rows().map(|x| (r.cdf(x[0]), r.cdf(x[1]))).collect();
        let mean = |k: fn(&(f64, f64)) -> f64| us.iter().map(k).sum::<f64>() / n as f64;
        let (ma, mb) = (mean(|p| p.0), mean(|p| p.1));
        let cov = us.iter().map(|(a, b)| (a - ma) * (b - mb)).sum::<f64>() / n as f64;
        let corr = cov * 12.0;
        assert!(corr.abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn dimension_is_checked() {
        let r = rayleigh(1.0);
        let fs: Vec<&dyn GainDistribution> = vec![&r, &r, &r];
        let c = bi(BivariateCopula::Countermonotone);
        assert!(matches!(
            gains_from_copula(&c, &fs, 10, 0),
            Err(ZocError::DimensionMismatch { expected: 2, got: 3 })
        ));
        let rot = Coupling::Rotation { n: 4 };
        assert!(coupled_gains(&rot, &fs, 10, 0).is_err());
    }

    #[test]
    fn rotation_floor_and_margins() {
        for n in [2, 3, 5, 10] {
            let f = nakagami(5.0, 10.0);
            let b = rotation_coupling_sc(&f, n, 10_000, 21).unwrap();
            let floor = f.quantile(1.0 - 1.0 / n as f64).unwrap();
            assert!(b.rows().all(|r| Combiner::Sc.apply(r) >= floor - 1e-9));
            for i in 0..n {
                let col: Vec<f64> = b.rows().map(|r| r[i]).collect();
                assert!(ks_statistic(&col, |x| f.cdf(x)) < ks_critical_01(col.len()), "n={n} i={i}");
            }
        }
        // n = 2 is the W coupling: V_2 = 1 − V_1 up to the half shift
        let r = rayleigh(1.0);
        let b = rotation_coupling_sc(&r, 2, 1000, 2).unwrap();
        for row in b.rows() {
            let (v1, v2) = (r.cdf(row[0]), r.cdf(row[1]));
            assert!(((v2 - v1).rem_euclid(1.0) - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn hetero_floor_and_margins() {
        let (a, b, c) = (rayleigh(10.0), nakagami(5.0, 10.0), nakagami(2.0, 3.0));
        let fs: Vec<&dyn GainDistribution> = vec![&a, &b, &c];
        let s = zoc::sc_n_heterogeneous(&fs).unwrap().snr_threshold;
        let batch = hetero_sc_coupling(&fs, 10_000, 77).unwrap();
        assert!(batch.rows().all(|r| Combiner::Sc.apply(r) >= s - 1e-9));
        for (i, f) in fs.iter().enumerate() {
            let col: Vec<f64> = batch.rows().map(|r| r[i]).collect();
            assert!(ks_statistic(&col, |x| f.cdf(x)) < ks_critical_01(col.len()), "margin {i}");
        }
    }

    #[test]
    fn hetero_matches_rotation_for_identical_links() {
        let f = rayleigh(2.0);
        let n = 4;
        let fs: Vec<&dyn GainDistribution> = vec![&f; n];
        let het = hetero_sc_coupling(&fs, 20_000, 5).unwrap();
        let rot = rotation_coupling_sc(&f, n, 20_000, 6).unwrap();
        let mh: Vec<f64> = het.rows().map(|r| Combiner::Sc.apply(r)).collect();
        let mr: Vec<f64> = rot.rows().map(|r| Combiner::Sc.apply(r)).collect();
        let floor = f.quantile(0.75).unwrap();
        assert!(mh.iter().chain(&mr).all(|&m| m >= floor - 1e-9));
        // two-sample comparison of the max through the rotation's empirical CDF
        let mut sorted = mr.clone();
        sorted.sort_by(f64::total_cmp);
        let ecdf = |x: f64| sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64;
        assert!(ks_statistic(&mh, ecdf) < 1.63 * (2.0 / 20_000.0f64).sqrt());
    }

    #[test]
    fn outage_counter_examples() {
        let r = rayleigh(1.0);
        let fs: Vec<&dyn GainDistribution> = vec![&r, &r];
        let w = bi(BivariateCopula::Countermonotone);
        let batch = gains_from_copula(&w, &fs, 100_000, 0x5EED).unwrap();
        assert_eq!(empirical_outage(&batch, Combiner::Mrc, 0.0).unwrap().outage_count, 0);
        let claim = (1.0 + 2.0 * 2f64.ln()).log2();
        let at = empirical_outage(&batch, Combiner::Mrc, claim).unwrap();
        assert_eq!(at.verdict, Verdict::ZeroOutage);
        assert!(at.min_combiner_value >= snr_from_rate(claim) - 1e-6);
        let above = empirical_outage(&batch, Combiner::Mrc, claim + 0.05).unwrap();
        assert_eq!(above.verdict, Verdict::OutageObserved);
        assert!(above.outage_count > 0 && above.outage_count <= above.sample_count);
        assert!(empirical_outage(&batch, Combiner::Mrc, -1.0).is_err());
    }

    #[test]
    fn outage_counter_calibration_under_independence() {
        let rho = 1.0;
        let r = rayleigh(rho);
        let fs: Vec<&dyn GainDistribution> = vec![&r, &r];
        let n = 100_000;
        let batch = gains_from_copula(&bi(BivariateCopula::Independence), &fs, n, 12).unwrap();
        for s in [0.2, 0.7, 1.5] {
            let rate = zoc::rate_from_snr(s);
            let got = empirical_outage(&batch, Combiner::Sc, rate).unwrap().outage_count as f64 / n as f64;
            let p = (1.0 - (-s / rho).exp()).powi(2);
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((got - p).abs() < 3.0 * sigma, "s={s}: {got} vs {p}");
            // MRC: sum of two iid exponentials is Gamma(2)
            let got = empirical_outage(&batch, Combiner::Mrc, rate).unwrap().outage_count as f64 / n as f64;
            let p = 1.0 - (-s).exp() * (1.0 + s);
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((got - p).abs() < 3.0 * sigma, "mrc s={s}: {got} vs {p}");
        }
    }

    #[test]
    fn verify_examples() {
        let (r1, r2) = (rayleigh(1.0), rayleigh(1.0 / 3.162));
        let fs: Vec<&dyn GainDistribution> = vec![&r1, &r2];
        let c = Coupling::Copula(bi(BivariateCopula::shifted_w(0.9).unwrap()));
        let claim = matched_claim(&c, &fs, Combiner::Mrc).unwrap();
        assert!((claim - 1.6003f64.log2()).abs() < 1e-3);
        let v = verify_zoc(&c, &fs, Combiner::Mrc, claim, 100_000, 0x5EED, 0.05).unwrap();
        assert!(v.passed, "{v:?}");

        let r = rayleigh(1.0);
        let fs: Vec<&dyn GainDistribution> = vec![&r; 3];
        let c = Coupling::Copula(Copula::ArchLower(ArchLowerCopula::new(3).unwrap()));
        let claim = matched_claim(&c, &fs, Combiner::Mrc).unwrap();
        assert!(verify_zoc(&c, &fs, Combiner::Mrc, claim, 100_000, 1, 0.05).unwrap().passed);

        let n = nakagami(5.0, 10.0);
        let fs: Vec<&dyn GainDistribution> = vec![&n; 5];
        let c = Coupling::Rotation { n: 5 };
        let claim = matched_claim(&c, &fs, Combiner::Sc).unwrap();
        assert!(verify_zoc(&c, &fs, Combiner::Sc, claim, 100_000, 2, 0.05).unwrap().passed);

        // an overstated claim fails
        let v = verify_zoc(&c, &fs, Combiner::Sc, claim + 0.1, 10_000, 2, 0.05).unwrap();
        assert!(!v.passed);
        assert!(verify_zoc(&c, &fs, Combiner::Sc, claim, 999, 2, 0.05).is_err());
    }

    #[test]
    fn clayton_claim_verifies() {
        let r = rayleigh(1.0);
        let fs: Vec<&dyn GainDistribution> = vec![&r, &r];
        let c = Coupling::Copula(bi(BivariateCopula::clayton(-0.75).unwrap()));
        let claim = matched_claim(&c, &fs, Combiner::Mrc).unwrap();
        assert!(claim > 0.0);
        let v = verify_zoc(&c, &fs, Combiner::Mrc, claim, 100_000, 0x5EED, 0.05).unwrap();
        assert!(v.passed, "{v:?}");
    }

    #[test]
    fn unsupported_claims_are_refused() {
        let (a, b, c) = (rayleigh(1.0), rayleigh(2.0), nakagami(3.0, 1.0));
        let fs: Vec<&dyn GainDistribution> = vec![&a, &b, &c];
        assert!(matches!(
            matched_claim(&Coupling::HeteroSc, &fs, Combiner::Mrc),
            Err(ZocError::Unsupported(_))
        ));
        let arch = Coupling::Copula(Copula::ArchLower(ArchLowerCopula::new(3).unwrap()));
        assert!(matches!(matched_claim(&arch, &fs, Combiner::Mrc), Err(ZocError::Unsupported(_))));
        assert!(matches!(
            matched_claim(&Coupling::Rotation { n: 3 }, &fs, Combiner::Sc),
            Err(ZocError::Unsupported(_))
        ));
        assert!(matched_claim(&Coupling::HeteroSc, &fs, Combiner::Sc).is_ok());
    }

    #[test]
    fn coupling_strings() {
        assert_eq!("rotation:n=4".parse::<Coupling>().unwrap(), Coupling::Rotation { n: 4 });
        assert_eq!("hetero_sc".parse::<Coupling>().unwrap(), Coupling::HeteroSc);
        assert!(matches!("arch_lower:n=3".parse::<Coupling>().unwrap(), Coupling::Copula(Copula::ArchLower(_))));
        assert!(matches!("w".parse::<Coupling>().unwrap(), Coupling::Copula(Copula::Bivariate(_))));
        assert!("rotation:n=1".parse::<Coupling>().is_err());
        assert!("rotation".parse::<Coupling>().is_err());
        for s in ["rotation:n=7", "hetero_sc", "shifted_w:t=0.5"] {
            assert_eq!(s.parse::<Coupling>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn csv_export() {
        let r = rayleigh(1.0);
        let fs: Vec<&dyn GainDistribution> = vec![&r; 3];
        let b = coupled_gains(&Coupling::Rotation { n: 3 }, &fs, 4, 0).unwrap();
        let csv = b.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x1,x2,x3");
        assert_eq!(lines.len(), 5);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 3));
        assert!(!csv.contains('\r'));
    }
}
