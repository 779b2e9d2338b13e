//! Resolved command invocations and their execution.
//!
//! An [`Invocation`] carries every parameter a command needs, so it is what a
//! run manifest stores and what `replay` executes again.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use switchrun::exact::exact_mn_cdf_series;
use switchrun::montecarlo::gamma_scan;
use switchrun::rng::mix_seed;
use switchrun::{
    bounds_mn_less, classify_gamma_series, exact_mn_cdf, log_lambda, run_trials, BernoulliParams,
    GammaFamily, TrialReport,
};

use crate::config::NamedExperiment;
use crate::error::{CliError, Result};
use crate::table::{Cell, Format, Table};
use crate::tables;

/// Seed used when none is given on the command line.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Inclusive integer range written `LO:HI`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub lo: u64,
    pub hi: u64,
}

impl IntRange {
    pub fn single(v: u64) -> Self {
        Self { lo: v, hi: v }
    }
}

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| format!("invalid integer {t:?}: {e}"))
        };
        let range = match s.split_once(':') {
            Some((lo, hi)) => Self {
                lo: parse(lo)?,
                hi: parse(hi)?,
            },
            None => Self::single(parse(s)?),
        };
        if range.lo > range.hi {
            return Err(format!("empty range {s}"));
        }
        Ok(range)
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}:{}", self.lo, self.hi)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Invocation {
    Exact {
        #[serde(rename = "N")]
        n: usize,
        #[serde(rename = "K")]
        k: usize,
        p: f64,
        format: Format,
    },
    Bounds {
        #[serde(rename = "N")]
        n: IntRange,
        #[serde(rename = "K")]
        k: IntRange,
        p: f64,
        format: Format,
    },
    Tables {
        table: u8,
        seed: u64,
        format: Format,
    },
    Simulate {
        experiments: Vec<NamedExperiment>,
        format: Format,
    },
    Slln {
        experiments: Vec<NamedExperiment>,
        format: Format,
    },
    Gamma {
        a: f64,
        b: f64,
        p: f64,
        seed: u64,
        runs: u64,
        #[serde(rename = "N")]
        n: IntRange,
        format: Format,
    },
}

impl Invocation {
    pub fn name(&self) -> &'static str {
        match self {
            Invocation::Exact { .. } => "exact",
            Invocation::Bounds { .. } => "bounds",
            Invocation::Tables { .. } => "tables",
            Invocation::Simulate { .. } => "simulate",
            Invocation::Slln { .. } => "slln",
            Invocation::Gamma { .. } => "gamma",
        }
    }

    /// The single seed of the run, when there is one.
    pub fn seed(&self) -> Option<u64> {
        match self {
            Invocation::Tables { seed, table, .. } if *table != 2 => Some(*seed),
            Invocation::Gamma { seed, .. } => Some(*seed),
            Invocation::Simulate { experiments, .. } | Invocation::Slln { experiments, .. }
                if experiments.len() == 1 =>
            {
                Some(experiments[0].config.seed)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub files: Vec<OutputFile>,
}

fn params(p: f64) -> Result<BernoulliParams> {
    Ok(BernoulliParams::new(p)?)
}

fn file(name: String, text: String) -> OutputFile {
    OutputFile {
        name,
        bytes: text.into_bytes(),
    }
}

/// One `lower,exact,upper,verdict` evaluation. Bounds are left empty when
/// `N < 2K`.
fn envelope_cells(n: usize, k: usize, exact: f64, p: BernoulliParams) -> Result<Vec<Cell>> {
    if n < 2 * k {
        return Ok(vec![
            Cell::Empty,
            Cell::Prob(exact),
            Cell::Empty,
            Cell::text("NA"),
        ]);
    }
    let env = bounds_mn_less(n, k, p)?;
    let verdict = if env.contains(exact) {
        "OK"
    } else {
        "VIOLATED"
    };
    Ok(vec![
        Cell::Prob(env.lower),
        Cell::Prob(exact),
        Cell::Prob(env.upper),
        Cell::text(verdict),
    ])
}

fn exact(n: usize, k: usize, p: f64, format: Format) -> Result<CommandOutput> {
    let b = params(p)?;
    let value = exact_mn_cdf(n, k, b)?;
    let mut table = Table::new(
        format!("P(M_N < K - 1) for N = {n}, K = {k}, p = {p}"),
        &["lower", "exact", "upper", "verdict"],
    );
    table.push(envelope_cells(n, k, value, b)?);
    let text = table.render(format)?;
    Ok(CommandOutput {
        files: vec![file(format!("exact.{}", format.extension()), text.clone())],
        stdout: text,
    })
}

fn bounds(n: IntRange, k: IntRange, p: f64, format: Format) -> Result<CommandOutput> {
    let b = params(p)?;
    if k.lo < 1 {
        return Err(CliError::Usage("K must be at least 1".into()));
    }
    let mut table = Table::new(
        format!("Envelope on P(M_N < K - 1), p = {p}"),
        &["N", "K", "p", "lower", "exact", "upper", "verdict"],
    );
    for kk in k.lo..=k.hi {
        let kk = kk as usize;
        let n_lo = (n.lo as usize).max(2 * kk);
        if n_lo > n.hi as usize {
            continue;
        }
        let series = exact_mn_cdf_series(n.hi as usize, kk, b)?;
        for nn in n_lo..=n.hi as usize {
            let mut row = vec![Cell::Int(nn as i64), Cell::Int(kk as i64), Cell::Prob(p)];
            row.extend(envelope_cells(nn, kk, series[nn - 1], b)?);
            table.push(row);
        }
    }
    if table.rows.is_empty() {
        return Err(CliError::Usage(format!(
            "no (N, K) pair with N >= 2K in N={n}, K={k}"
        )));
    }
    let text = table.render(format)?;
    Ok(CommandOutput {
        files: vec![file(format!("bounds.{}", format.extension()), text.clone())],
        stdout: text,
    })
}

fn tables_cmd(id: u8, seed: u64, format: Format) -> Result<CommandOutput> {
    let text = tables::table(id, seed)?.render(format)?;
    Ok(CommandOutput {
        files: vec![file(
            format!("table{id}.{}", format.extension()),
            text.clone(),
        )],
        stdout: text,
    })
}

fn opt_int(v: Option<i64>) -> Cell {
    v.map_or(Cell::Empty, Cell::Int)
}

fn opt_prob(v: Option<f64>) -> Cell {
    v.map_or(Cell::Empty, Cell::Prob)
}

pub fn summary_table(name: &str, report: &TrialReport) -> Table {
    let mut table = Table::new(
        format!(
            "Experiment {name}: p = {}, seed = {}",
            report.config.p.p(),
            report.config.seed
        ),
        &[
            "N",
            "trials",
            "mean_M",
            "sd_M",
            "mean_ratio",
            "alpha1",
            "alpha2",
            "frac_below_alpha1",
            "frac_ge_alpha2",
            "gamma_threshold",
            "frac_gamma_hit",
            "pattern",
        ],
    );
    for point in &report.points {
        table.push(vec![
            Cell::Int(point.n as i64),
            Cell::Int(point.trials as i64),
            Cell::Prob(point.mean_m),
            Cell::Prob(point.sd_m),
            Cell::Prob(point.mean_ratio),
            opt_int(point.alpha1),
            opt_int(point.alpha2),
            opt_prob(point.frac_below_alpha1),
            opt_prob(point.frac_at_or_above_alpha2),
            opt_int(point.gamma_threshold),
            opt_prob(point.frac_gamma_hit),
            Cell::Text(format!("{{{}}}", point.representative_pattern)),
        ]);
    }
    table
}

fn simulate(experiments: &[NamedExperiment], format: Format) -> Result<CommandOutput> {
    let mut out = CommandOutput {
        stdout: String::new(),
        files: Vec::new(),
    };
    for exp in experiments {
        let report = run_trials(&exp.config)?;
        let summary = summary_table(&exp.name, &report).render(format)?;
        out.files.push(file(
            format!("{}.report.json", exp.name),
            report.to_json()? + "\n",
        ));
        out.files.push(file(
            format!("{}.trials.csv", exp.name),
            report.to_raw_csv()?,
        ));
        out.files.push(file(
            format!("{}.summary.{}", exp.name, format.extension()),
            summary.clone(),
        ));
        if !out.stdout.is_empty() {
            out.stdout.push('\n');
        }
        out.stdout += &summary;
    }
    Ok(out)
}

pub fn slln_table(name: &str, report: &TrialReport) -> Result<Table> {
    let p = report.config.p;
    let mut table = Table::new(
        format!(
            "M_N / log_λ N for experiment {name}: p = {}, seed = {}",
            p.p(),
            report.config.seed
        ),
        &[
            "N",
            "trials",
            "log_lambda_N",
            "mean_M",
            "mean_ratio",
            "abs_gap",
        ],
    );
    for point in &report.points {
        table.push(vec![
            Cell::Int(point.n as i64),
            Cell::Int(point.trials as i64),
            Cell::Prob(log_lambda(point.n as f64, p)?),
            Cell::Prob(point.mean_m),
            Cell::Prob(point.mean_ratio),
            Cell::Prob((1.0 - point.mean_ratio).abs()),
        ]);
    }
    Ok(table)
}

fn slln(experiments: &[NamedExperiment], format: Format) -> Result<CommandOutput> {
    let mut out = CommandOutput {
        stdout: String::new(),
        files: Vec::new(),
    };
    for exp in experiments {
        let report = run_trials(&exp.config)?;
        let text = slln_table(&exp.name, &report)?.render(format)?;
        out.files.push(file(
            format!("{}.slln.{}", exp.name, format.extension()),
            text.clone(),
        ));
        if !out.stdout.is_empty() {
            out.stdout.push('\n');
        }
        out.stdout += &text;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn gamma(
    a: f64,
    b: f64,
    p: f64,
    seed: u64,
    runs: u64,
    n: IntRange,
    format: Format,
) -> Result<CommandOutput> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(CliError::Usage("gamma coefficients must be finite".into()));
    }
    let bp = params(p)?;
    if n.hi < 2 {
        return Err(CliError::Usage(
            "the scanned N range must reach at least 2".into(),
        ));
    }
    let family = GammaFamily { a, b };
    let verdict = format!("{:?}", classify_gamma_series(family, bp));
    let mut stdout = format!("{verdict}\n");
    let mut files = Vec::new();
    if runs > 0 {
        let mut table = Table::new(
            format!(
                "{verdict}: M_N >= ceil(γ_N) - 1 with γ_N = {a}·log_λ N + {b}, p = {p}, N in {n}"
            ),
            &[
                "run",
                "seed",
                "hits",
                "hit_fraction",
                "first_hit",
                "last_hit",
            ],
        );
        // N = 1 has no switches and is skipped by the scan.
        let scanned = (n.hi - n.lo.max(2) + 1) as f64;
        for run in 0..runs {
            let run_seed = mix_seed(seed, 0, run);
            let scan = gamma_scan(family, bp, run_seed, n.lo, n.hi);
            let at = |v: Option<u64>| v.map_or(Cell::Empty, |x| Cell::Int(x as i64));
            table.push(vec![
                Cell::Int(run as i64),
                Cell::Text(run_seed.to_string()),
                Cell::Int(scan.hits as i64),
                Cell::Prob(scan.hits as f64 / scanned),
                at(scan.first_hit),
                at(scan.last_hit),
            ]);
        }
        let text = table.render(format)?;
        files.push(file(format!("gamma.{}", format.extension()), text.clone()));
        stdout += &text;
    }
    Ok(CommandOutput { stdout, files })
}

pub fn execute(invocation: &Invocation) -> Result<CommandOutput> {
    match invocation {
        Invocation::Exact { n, k, p, format } => exact(*n, *k, *p, *format),
        Invocation::Bounds { n, k, p, format } => bounds(*n, *k, *p, *format),
        Invocation::Tables {
            table,
            seed,
            format,
        } => tables_cmd(*table, *seed, *format),
        Invocation::Simulate {
            experiments,
            format,
        } => simulate(experiments, *format),
        Invocation::Slln {
            experiments,
            format,
        } => slln(experiments, *format),
        Invocation::Gamma {
            a,
            b,
            p,
            seed,
            runs,
            n,
            format,
        } => gamma(*a, *b, *p, *seed, *runs, *n, *format),
    }
}
