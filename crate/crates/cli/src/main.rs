use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use switchrun_cli::config::{load_config, NamedExperiment};
use switchrun_cli::{
    execute, replay, write_run, CliError, Format, IntRange, Invocation, Result, DEFAULT_SEED,
};

/// Longest runs of switches in Bernoulli sequences.
#[derive(Parser)]
#[command(name = "switchrun", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output format for tables.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Directory for output files and the run manifest.
    #[arg(long, env = "SWITCHRUN_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Overrides {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the trial count of every experiment.
    #[arg(long)]
    trials: Option<u64>,
    /// Override the seed of every experiment.
    #[arg(long)]
    seed: Option<u64>,
    /// Override ε of every experiment.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact P(M_N < K - 1) with its envelope.
    Exact {
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Envelope check over ranges of N and K (written LO:HI).
    Bounds {
        #[arg(long = "N")]
        n: IntRange,
        #[arg(long = "K")]
        k: IntRange,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Emit Table 1 (longest blocks), 2 (log_λ N grid) or 3 (ten runs).
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        table: u8,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Run the configured Monte-Carlo experiments.
    Simulate {
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
    },
    /// Convergence of M_N / log_λ N for the configured experiments.
    Slln {
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
    },
    /// Classify Σ (pq)^(γ_N/2) for γ_N = a·log_λ N + b and scan simulated paths.
    Gamma {
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of simulated paths.
        #[arg(long)]
        trials: Option<u64>,
        /// Range of N scanned on each path, LO:HI.
        #[arg(long = "N")]
        n: Option<IntRange>,
        /// Take defaults from the first experiment of a config.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Re-run a manifest and compare output checksums.
    Replay {
        manifest: PathBuf,
        /// Also write the regenerated run here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn experiments(o: Overrides) -> Result<Vec<NamedExperiment>> {
    let mut list = load_config(&o.config)?;
    for exp in &mut list {
        if let Some(t) = o.trials {
            exp.config.trials = t;
        }
        if let Some(s) = o.seed {
            exp.config.seed = s;
        }
        if let Some(e) = o.epsilon {
            exp.config.epsilon = e;
        }
        exp.config.validate()?;
    }
    Ok(list)
}

#[allow(clippy::too_many_arguments)]
fn gamma_invocation(
    a: Option<f64>,
    b: Option<f64>,
    p: Option<f64>,
    seed: Option<u64>,
    trials: Option<u64>,
    n: Option<IntRange>,
    config: Option<PathBuf>,
    format: Format,
) -> Result<Invocation> {
    let base = match config {
        Some(path) => {
            let list = load_config(&path)?;
            let first = list.into_iter().next().ok_or_else(|| CliError::Config {
                path: path.display().to_string(),
                message: "no experiments".into(),
            })?;
            Some(first.config)
        }
        None => None,
    };
    let family = base.as_ref().and_then(|c| c.gamma);
    let a = a
        .or(family.map(|g| g.a))
        .ok_or_else(|| CliError::Usage("--a is required unless the config sets gamma_a".into()))?;
    let grid_range = base.as_ref().map(|c| IntRange {
        lo: *c.n_grid.iter().min().expect("validated grid"),
        hi: *c.n_grid.iter().max().expect("validated grid"),
    });
    Ok(Invocation::Gamma {
        a,
        b: b.or(family.map(|g| g.b)).unwrap_or(0.0),
        p: p.or(base.as_ref().map(|c| c.p.p())).unwrap_or(0.5),
        seed: seed
            .or(base.as_ref().map(|c| c.seed))
            .unwrap_or(DEFAULT_SEED),
        runs: trials.or(base.as_ref().map(|c| c.trials)).unwrap_or(20),
        n: n.or(grid_range).unwrap_or(IntRange {
            lo: 1000,
            hi: 100_000,
        }),
        format,
    })
}

fn emit(invocation: Invocation, out: Option<&Path>) -> Result<()> {
    let output = execute(&invocation)?;
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(output.stdout.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))?;
    if let Some(dir) = out {
        let manifest = write_run(dir, &invocation, &output)?;
        eprintln!(
            "wrote {} file(s) and {}",
            output.files.len(),
            manifest.display()
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Exact { n, k, p, output } => emit(
            Invocation::Exact {
                n,
                k,
                p,
                format: output.format,
            },
            output.out.as_deref(),
        ),
        Command::Bounds { n, k, p, output } => emit(
            Invocation::Bounds {
                n,
                k,
                p,
                format: output.format,
            },
            output.out.as_deref(),
        ),
        Command::Tables {
            table,
            seed,
            output,
        } => emit(
            Invocation::Tables {
                table,
                seed,
                format: output.format,
            },
            output.out.as_deref(),
        ),
        Command::Simulate { overrides, output } => emit(
            Invocation::Simulate {
                experiments: experiments(overrides)?,
                format: output.format,
            },
            output.out.as_deref(),
        ),
        Command::Slln { overrides, output } => emit(
            Invocation::Slln {
                experiments: experiments(overrides)?,
                format: output.format,
            },
            output.out.as_deref(),
        ),
        Command::Gamma {
            a,
            b,
            p,
            seed,
            trials,
            n,
            config,
            output,
        } => emit(
            gamma_invocation(a, b, p, seed, trials, n, config, output.format)?,
            output.out.as_deref(),
        ),
        Command::Replay { manifest, out } => {
            let outcome = replay(&manifest, out.as_deref())?;
            for f in &outcome.matched {
                println!("match    {f}");
            }
            for f in &outcome.mismatched {
                println!("MISMATCH {f}");
            }
            if outcome.is_identical() {
                Ok(())
            } else {
                Err(CliError::Internal(format!(
                    "{} output(s) differ from {}",
                    outcome.mismatched.len(),
                    manifest.display()
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
