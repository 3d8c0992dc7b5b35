//! Command-line front end. Every subcommand is a pure function of its
//! arguments returning the text to emit, so tests can call them directly.

use std::fmt;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::copulas::Copula;
use crate::error::ZocError;
use crate::marginals::{GainDistribution, Marginal};
use crate::montecarlo::{coupled_gains, matched_claim, verify_zoc, Coupling};
use crate::table::{round_sig9, Cell, CsvTable};
use crate::zoc::{self, Combiner};

pub const DEFAULT_SEED: u64 = 0x5EED;

/// Exit status for solver and other runtime failures.
pub const EXIT_SOLVER: i32 = 3;
/// Exit status when a Monte Carlo verification fails.
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "zerocap", version, about = "Zero-outage capacity of dependent fading links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-link MRC capacity against the copula parameter t.
    CurveT(CurveArgs),
    /// Two-link MRC capacity over a grid of average SNRs at fixed t.
    SnrGrid(SnrGridArgs),
    /// Inner and outer MRC bounds for n identical links.
    Bounds(BoundsArgs),
    /// Selection-combining capacity.
    Sc(ScArgs),
    /// Monte Carlo check of a zero-outage claim.
    Verify(VerifyArgs),
    /// B-SYM sufficient conditions for a marginal.
    Bsym(BsymArgs),
    /// Export coupled gain samples.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `lo:hi:count`, evenly spaced and inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || format!("expected lo:hi:count, got '{s}'");
        let [lo, hi, count] = parts.as_slice() else {
            return Err(bad());
        };
        let lo: f64 = lo.parse().map_err(|_| bad())?;
        let hi: f64 = hi.parse().map_err(|_| bad())?;
        let count: usize = count.parse().map_err(|_| bad())?;
        if count == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(format!("grid '{s}' must have lo <= hi and count >= 1"));
        }
        if count == 1 && lo != hi {
            return Err(format!("single-point grid '{s}' needs lo == hi"));
        }
        Ok(Self { lo, hi, count })
    }
}

/// `lo:hi` (inclusive) or a single `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected lo:hi, got '{s}'");
        let (lo, hi) = match s.split_once(':') {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => {
                let n = s.trim().parse().map_err(|_| bad())?;
                (n, n)
            }
        };
        if lo < 2 || hi < lo || hi > 1_000_000 {
            return Err(format!("n range '{s}' must lie within 2..=1000000"));
        }
        Ok(Self { lo, hi })
    }
}

/// A marginal spec without its SNR, e.g. `rayleigh` or `nakagami:m=5`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family(String);

impl Family {
    pub fn at_db(&self, snr_db: f64) -> Result<Marginal, String> {
        let sep = if self.0.contains(':') { ',' } else { ':' };
        format!("{}{sep}snr_db={snr_db}", self.0).parse()
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains("snr_db") {
            return Err("the family must not fix snr_db; it comes from the grid".into());
        }
        let fam = Self(s.trim().to_string());
        fam.at_db(0.0)?;
        Ok(fam)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Args)]
pub struct TableOpts {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Use the short column names of the plotted data files (`capac`, ...).
    #[arg(long)]
    pub paper_columns: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    /// Marginal of each link; give exactly two.
    #[arg(long = "dist", required = true, num_args = 1)]
    pub dists: Vec<Marginal>,
    /// Copula parameter grid as `lo:hi:count`.
    #[arg(long, default_value = "0:1:101", allow_hyphen_values = true)]
    pub t_grid: Grid,
    #[command(flatten)]
    pub table: TableOpts,
}

#[derive(Debug, Clone, Args)]
pub struct SnrGridArgs {
    /// Marginal family without SNR, e.g. `rayleigh` or `nakagami:m=5`.
    #[arg(long, default_value = "rayleigh")]
    pub family: Family,
    /// Copula parameter of the shifted countermonotonic copula.
    #[arg(long, default_value_t = 0.5)]
    pub t: f64,
    /// Average SNR grid in dB, used for both links.
    #[arg(long, default_value = "-10:10:21", allow_hyphen_values = true)]
    pub db_grid: Grid,
    #[command(flatten)]
    pub table: TableOpts,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    /// Marginal shared by all links, e.g. `rayleigh:snr_db=0`.
    #[arg(long)]
    pub dist: Marginal,
    /// Link counts as `lo:hi` or a single `n`.
    #[arg(long, default_value = "2:10")]
    pub n_range: NRange,
    #[command(flatten)]
    pub table: TableOpts,
}

#[derive(Debug, Clone, Args)]
pub struct ScArgs {
    /// One marginal for identical links, or one per link.
    #[arg(long = "dist", required = true, num_args = 1)]
    pub dists: Vec<Marginal>,
    /// Link counts for identical links.
    #[arg(long, default_value = "2:10")]
    pub n_range: NRange,
    /// Defaults to CSV for identical links and JSON for a list.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Use the short column names of the plotted data files.
    #[arg(long)]
    pub paper_columns: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CouplingOpts {
    /// Copula spec, e.g. `shifted_w:t=0.9` or `arch_lower:n=3`.
    #[arg(long, conflicts_with = "coupling")]
    pub copula: Option<Copula>,
    /// `rotation` or `hetero_sc`.
    #[arg(long)]
    pub coupling: Option<String>,
    /// Number of links; a single --dist is repeated to this length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Marginal of each link, e.g. `rayleigh:snr_db=0`.
    #[arg(long = "dist", required = true, num_args = 1)]
    pub dists: Vec<Marginal>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

impl CouplingOpts {
    fn resolve(&self) -> Result<(Coupling, Vec<Marginal>), CliError> {
        let coupling = match (&self.copula, self.coupling.as_deref()) {
            (Some(c), _) => Coupling::Copula(*c),
            (None, Some("rotation")) => {
                let n = self.n.or((self.dists.len() > 1).then_some(self.dists.len()));
                let n = n.ok_or_else(|| CliError::Usage("rotation needs --n or one --dist per link".into()))?;
                format!("rotation:n={n}").parse().map_err(CliError::Usage)?
            }
            (None, Some(other)) => other.parse().map_err(CliError::Usage)?,
            (None, None) => return Err(CliError::Usage("give --copula or --coupling".into())),
        };
        let n = coupling.dim().or(self.n).unwrap_or(self.dists.len());
        let dists = if self.dists.len() == 1 {
            vec![self.dists[0]; n]
        } else {
            self.dists.clone()
        };
        if dists.len() != n {
            return Err(CliError::Usage(format!(
                "coupling {coupling} needs {n} marginals, got {}",
                dists.len()
            )));
        }
        Ok((coupling, dists))
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub coupling: CouplingOpts,
    /// `mrc` or `sc`.
    #[arg(long, default_value = "mrc")]
    pub combiner: Combiner,
    /// Monte Carlo sample count (at least 1000).
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Probe rate above the claim, in bits.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Claimed rate in bits; computed from the coupling when omitted.
    #[arg(long)]
    pub claim: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct BsymArgs {
    /// Link gain marginal, e.g. `nakagami:m=5,snr_db=0`.
    #[arg(long)]
    pub dist: Marginal,
    /// Number of links.
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub coupling: CouplingOpts,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug)]
pub enum CliError {
    /// Arguments that parse but do not fit together.
    Usage(String),
    Solver(ZocError),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "{m}"),
            Self::Solver(e) => write!(f, "{e}"),
            Self::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ZocError> for CliError {
    fn from(e: ZocError) -> Self {
        Self::Solver(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Solver(_) | Self::Io(_) => EXIT_SOLVER,
        }
    }
}

/// Text produced by a subcommand plus whether it reports a failed check.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub failed_check: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, failed_check: false }
    }
}

fn dyns(ms: &[Marginal]) -> Vec<&dyn GainDistribution> {
    ms.iter().map(|m| m as &dyn GainDistribution).collect()
}

/// Rounds every float to nine significant digits so JSON matches CSV.
fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round_sig9(x))) {
                *n = x;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable report");
    round_json(&mut v);
    serde_json::to_string_pretty(&v).expect("valid JSON") + "\n"
}

fn render(mut table: CsvTable, opts: &TableOpts, aliases: &[(&str, &str)]) -> String {
    if opts.paper_columns {
        for (from, to) in aliases {
            table.rename(from, to);
        }
    }
    match opts.format {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(&table.to_json()),
    }
}

pub fn cmd_curve_t(args: &CurveArgs) -> Result<CsvTable, CliError> {
    let [f1, f2] = args.dists.as_slice() else {
        return Err(CliError::Usage(format!("curve-t needs two --dist, got {}", args.dists.len())));
    };
    let ts = args.t_grid.points();
    let rates = ts
        .par_iter()
        .map(|&t| Ok(zoc::mrc_two_link_ct(f1, f2, t)?.rate_bits))
        .collect::<Result<Vec<f64>, ZocError>>()?;
    let mut table = CsvTable::new(["t", "capacity_bits"]);
    for (t, r) in ts.into_iter().zip(rates) {
        table.push(vec![t.into(), r.into()]);
    }
    Ok(table)
}

pub fn cmd_snr_grid(args: &SnrGridArgs) -> Result<CsvTable, CliError> {
    let dbs = args.db_grid.points();
    let cells: Vec<(f64, f64)> = dbs.iter().flat_map(|&a| dbs.iter().map(move |&b| (a, b))).collect();
    let rates = cells
        .par_iter()
        .map(|&(a, b)| {
            let f1 = args.family.at_db(a).map_err(CliError::Usage)?;
            let f2 = args.family.at_db(b).map_err(CliError::Usage)?;
            Ok(zoc::mrc_two_link_ct(&f1, &f2, args.t)?.rate_bits)
        })
        .collect::<Result<Vec<f64>, CliError>>()?;
    let mut table = CsvTable::new(["snr1_db", "snr2_db", "capacity_bits"]);
    for ((a, b), r) in cells.into_iter().zip(rates) {
        table.push(vec![a.into(), b.into(), r.into()]);
    }
    Ok(table)
}

pub fn cmd_bounds(args: &BoundsArgs) -> Result<CsvTable, CliError> {
    let rows = zoc::bounds_report(&args.dist, args.n_range.lo, args.n_range.hi)?;
    let mut table = CsvTable::new(["n", "inner", "outer_w", "outer_jm", "gap", "gap_limit", "bsym_w", "bsym_arch"]);
    for r in rows {
        table.push(vec![
            r.n.into(),
            r.inner_bits.into(),
            r.outer_w_bits.into(),
            r.outer_jm_bits.into(),
            r.gap_bits.into(),
            r.gap_limit_bits.into(),
            r.bsym_w.into(),
            r.bsym_arch.into(),
        ]);
    }
    Ok(table)
}

/// Result of `sc`: a table for identical links, a record for a list.
#[derive(Debug, Clone, PartialEq)]
pub enum ScOutput {
    Table(CsvTable),
    Record(Value),
}

pub fn cmd_sc(args: &ScArgs) -> Result<ScOutput, CliError> {
    if let [f] = args.dists.as_slice() {
        let ns: Vec<usize> = (args.n_range.lo..=args.n_range.hi).collect();
        let rates = ns
            .par_iter()
            .map(|&n| Ok(zoc::sc_n_homogeneous(f, n)?.rate_bits))
            .collect::<Result<Vec<f64>, ZocError>>()?;
        let mut table = CsvTable::new(["n", "capacity_bits"]);
        for (n, r) in ns.into_iter().zip(rates) {
            table.push(vec![n.into(), r.into()]);
        }
        return Ok(ScOutput::Table(table));
    }
    let res = zoc::sc_n_heterogeneous(&dyns(&args.dists))?;
    let mut v = json!({
        "n": args.dists.len(),
        "p_star": res.p_star,
        "s_star": res.snr_threshold,
        "rate": res.rate_bits,
    });
    round_json(&mut v);
    Ok(ScOutput::Record(v))
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Output, CliError> {
    let (coupling, dists) = args.coupling.resolve()?;
    let fs = dyns(&dists);
    let claim = match args.claim {
        Some(c) => c,
        None => matched_claim(&coupling, &fs, args.combiner)?,
    };
    let v = verify_zoc(&coupling, &fs, args.combiner, claim, args.samples, args.coupling.seed, args.delta)?;
    Ok(Output {
        text: to_json(&v),
        failed_check: !v.passed,
    })
}

pub fn cmd_bsym(args: &BsymArgs) -> Result<Value, CliError> {
    let f = &args.dist;
    let w = zoc::bsym_check_w(f, args.n)?;
    let arch = zoc::bsym_check_arch(f, args.n)?;
    let mode = f.mode();
    let mut v = json!({
        "dist": f.to_string(),
        "n": args.n,
        "lemma1": w,
        "lemma2": arch,
        "mode": mode,
        "cdf_at_mode": f.cdf(mode),
        "one_minus_inv_n": 1.0 - 1.0 / args.n as f64,
        "inv_e": (-1.0f64).exp(),
    });
    round_json(&mut v);
    Ok(v)
}

pub fn cmd_sample(args: &SampleArgs) -> Result<String, CliError> {
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let (coupling, dists) = args.coupling.resolve()?;
    Ok(coupled_gains(&coupling, &dyns(&dists), args.samples, args.coupling.seed)?.to_csv())
}

/// Runs one parsed command and returns its text.
pub fn run(command: &Command) -> Result<Output, CliError> {
    const T_ALIASES: &[(&str, &str)] = &[("capacity_bits", "capac")];
    const GRID_ALIASES: &[(&str, &str)] = &[("snr1_db", "snr1"), ("snr2_db", "snr2"), ("capacity_bits", "capac")];
    let out = match command {
        Command::CurveT(a) => render(cmd_curve_t(a)?, &a.table, T_ALIASES),
        Command::SnrGrid(a) => render(cmd_snr_grid(a)?, &a.table, GRID_ALIASES),
        Command::Bounds(a) => render(cmd_bounds(a)?, &a.table, &[]),
        Command::Sc(a) => match cmd_sc(a)? {
            ScOutput::Table(t) => {
                let opts = TableOpts {
                    format: a.format.unwrap_or(Format::Csv),
                    paper_columns: a.paper_columns,
                };
                render(t, &opts, T_ALIASES)
            }
            ScOutput::Record(v) => match a.format {
                Some(Format::Csv) => {
                    let mut t = CsvTable::new(["n", "p_star", "s_star", "rate"]);
                    let num = |k: &str| v[k].as_f64().map_or(Cell::Float(f64::NAN), Cell::Float);
                    t.push(vec![a.dists.len().into(), num("p_star"), num("s_star"), num("rate")]);
                    t.to_csv()
                }
                _ => serde_json::to_string_pretty(&v).expect("valid JSON") + "\n",
            },
        },
        Command::Verify(a) => return cmd_verify(a),
        Command::Bsym(a) => serde_json::to_string_pretty(&cmd_bsym(a)?).expect("valid JSON") + "\n",
        Command::Sample(a) => cmd_sample(a)?,
    };
    Ok(Output::ok(out))
}
