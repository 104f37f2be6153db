//! spectrank: rank-spectrum independence tests from the command line.
//!
//! Subcommands: `test` (statistics on a CSV), `simulate` (seeded size/power
//! Monte Carlo), `moments` (closed-form trace-power mean/covariance), and
//! `verify` (the exact small-instance oracle suite).
//!
//! Exit codes: 0 success, 1 usage or input error, 2 partial success (at
//! least one requested statistic undefined on this input).

mod csvio;
mod output;
mod verify;

use std::io::Read;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spectrank::moments::{self, MomentParams};
use spectrank::rank::{self, TiePolicy};
use spectrank::sim::{self, Scenario, SimConfig, StatChoice};
use spectrank::stats::{self, Sidedness, Statistic, TestConfig};
use spectrank::Error;

#[derive(Parser)]
#[command(
    name = "spectrank",
    about = "High-dimensional independence tests from the spectrum of Spearman's rank correlation matrix",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run test statistics on a CSV of observations.
    Test(TestArgs),
    /// Monte Carlo size/power simulation over the built-in scenarios.
    Simulate(SimulateArgs),
    /// Evaluate the closed-form mean/variance/covariance of trace powers.
    Moments(MomentsArgs),
    /// Run the exact-arithmetic oracle suite and report pass/fail.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Orientation {
    /// rows are observations, columns are variables (default)
    RowsObservations,
    /// rows are variables, columns are observations
    RowsVariables,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SidednessArg {
    Default,
    Upper,
    TwoSided,
}

impl SidednessArg {
    fn resolve(self) -> Option<Sidedness> {
        match self {
            SidednessArg::Default => None,
            SidednessArg::Upper => Some(Sidedness::Upper),
            SidednessArg::TwoSided => Some(Sidedness::TwoSided),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct TestArgs {
    /// Input CSV path, or '-' for stdin.
    #[arg(long, short = 'i', default_value = "-")]
    input: String,
    /// Statistics to run (repeatable, comma-separable), or 'all'.
    #[arg(long = "stat", short = 's', default_value = "all")]
    stats: Vec<String>,
    #[arg(long, value_enum, default_value_t = Orientation::RowsObservations)]
    orientation: Orientation,
    /// Trace power for W2/W7.
    #[arg(long, default_value_t = 4)]
    k: u32,
    /// Penalty exponent for W7.
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = SidednessArg::Default)]
    sidedness: SidednessArg,
    /// Fail on tied observations instead of averaging ranks.
    #[arg(long)]
    strict_ties: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario id (h01, h02, h03, ha11, ha12, ha21, ha22, ha31, ha32).
    #[arg(long, conflicts_with = "preset")]
    scenario: Option<String>,
    /// Full published grid: table1, table2 or table3.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, requires = "scenario")]
    n: Option<usize>,
    #[arg(long, requires = "scenario")]
    p: Option<usize>,
    /// Statistics to evaluate (repeatable) for --scenario runs.
    #[arg(long = "stat", short = 's', default_value = "w2,w6,w7")]
    stats: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    reps: u32,
    /// Master seed; falls back to SPECTRANK_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 4)]
    k: u32,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    p: u32,
    /// Trace power (for the mean and variance).
    #[arg(long, conflicts_with_all = ["k1", "k2"])]
    k: Option<u32>,
    /// First trace power of a covariance query.
    #[arg(long, requires = "k2")]
    k1: Option<u32>,
    /// Second trace power of a covariance query.
    #[arg(long, requires = "k1")]
    k2: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest rank-vector size for the exact moment checks (3..=8).
    #[arg(long, default_value_t = 8)]
    max_n: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Moments(args) => cmd_moments(args),
        Command::Verify(args) => verify::cmd_verify(args.max_n),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn parse_stats(specs: &[String]) -> Result<Vec<Statistic>, AnyError> {
    let mut out = Vec::new();
    for spec in specs {
        for part in spec.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            if part.eq_ignore_ascii_case("all") {
                out.extend(Statistic::ALL);
            } else {
                out.push(Statistic::from_str(part)?);
            }
        }
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err("no statistics selected".into());
    }
    Ok(out)
}

fn cmd_test(args: TestArgs) -> Result<ExitCode, AnyError> {
    let stats = parse_stats(&args.stats)?;
    let raw = if args.input == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(&args.input).map_err(|e| format!("{}: {e}", args.input))?
    };
    let parsed = csvio::parse_numeric_csv(&raw)?;
    // header names label variables, which only makes sense in the default
    // orientation
    let variables = match args.orientation {
        Orientation::RowsObservations => parsed.header.clone(),
        Orientation::RowsVariables => None,
    };
    let rows = match args.orientation {
        Orientation::RowsObservations => parsed.rows,
        Orientation::RowsVariables => csvio::transpose(parsed.rows),
    };
    let data = rank::DataMatrix::from_rows(&rows)?;

    let tie_policy = if args.strict_ties {
        TiePolicy::Error
    } else {
        TiePolicy::Average
    };
    let needs_rank = stats.iter().any(|s| s.is_rank_based());
    let spearman = if needs_rank {
        Some(rank::spearman_matrix(&rank::build_ensemble(
            &data, tie_policy,
        )?))
    } else {
        None
    };

    let mut reports = Vec::new();
    let mut undefined: Vec<(Statistic, String)> = Vec::new();
    for &statistic in &stats {
        let config = TestConfig {
            statistic,
            k: args.k,
            delta: args.delta,
            alpha: args.alpha,
            sidedness: args.sidedness.resolve(),
        };
        let result = match statistic {
            Statistic::W2 => stats::compute_w2(spearman.as_ref().unwrap(), &config),
            Statistic::W6 => stats::compute_w6(spearman.as_ref().unwrap(), &config),
            Statistic::W7 => stats::compute_w7(spearman.as_ref().unwrap(), &config),
            _ => stats::compute_reference(&data, &config),
        };
        match result {
            Ok(rep) => reports.push(rep),
            Err(Error::Undefined { statistic, reason }) => {
                undefined.push((Statistic::from_str(&statistic)?, reason))
            }
            Err(other) => return Err(other.into()),
        }
    }
    let ties = spearman.as_ref().map(|s| s.any_ties()).unwrap_or(false);
    if ties {
        eprintln!("warning: ties detected; rank statistics assume continuous data");
    }

    let body = output::render_test(
        &reports,
        &undefined,
        &data,
        variables.as_deref(),
        ties,
        args.format,
    )?;
    output::emit(&body, args.out.as_deref())?;
    Ok(if undefined.is_empty() {
        ExitCode::from(0)
    } else {
        ExitCode::from(2)
    })
}

fn seed_from_env() -> u64 {
    std::env::var("SPECTRANK_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, AnyError> {
    if args.reps == 0 {
        return Err("--reps must be at least 1".into());
    }
    let seed = args.seed.unwrap_or_else(seed_from_env);
    let cells: Vec<SimConfig> = if let Some(preset) = &args.preset {
        match preset.as_str() {
            "table1" => sim::preset_table1(args.reps, seed),
            "table2" => sim::preset_table2(args.reps, seed),
            "table3" => sim::preset_table3(args.reps, seed),
            other => return Err(format!("unknown preset {other:?}").into()),
        }
    } else if let Some(scenario) = &args.scenario {
        let scenario = Scenario::from_str(scenario)?;
        let (n, p) = match (args.n, args.p) {
            (Some(n), Some(p)) => (n, p),
            _ => return Err("--scenario requires --n and --p".into()),
        };
        let stats = parse_stats(&args.stats)?
            .into_iter()
            .map(|s| StatChoice::new(s).with_k(args.k).with_delta(args.delta))
            .collect();
        vec![SimConfig {
            scenario,
            n,
            p,
            replications: args.reps,
            master_seed: seed,
            alpha: args.alpha,
            stats,
        }]
    } else {
        return Err("choose --preset or --scenario".into());
    };

    let results = sim::table_sweep(&cells);
    let body = output::render_sim(&results, args.format)?;
    output::emit(&body, args.out.as_deref())?;
    Ok(ExitCode::from(0))
}

fn cmd_moments(args: MomentsArgs) -> Result<ExitCode, AnyError> {
    let params = MomentParams::new(args.n, args.p)?;
    let mut records: Vec<output::MomentRecord> = Vec::new();
    match (args.k, args.k1, args.k2) {
        (Some(k), None, None) => {
            records.push(output::MomentRecord {
                quantity: "mean_tr",
                n: args.n,
                p: args.p,
                k1: k,
                k2: None,
                value: moments::mean_tr(params, k)?,
            });
            records.push(output::MomentRecord {
                quantity: "var_g",
                n: args.n,
                p: args.p,
                k1: k,
                k2: None,
                value: moments::var_g(params, k)?,
            });
        }
        (None, Some(k1), Some(k2)) => {
            let c = params.c();
            records.push(output::MomentRecord {
                quantity: "cov_g",
                n: args.n,
                p: args.p,
                k1,
                k2: Some(k2),
                value: moments::ratio_to_f64(&moments::cov_g_exact(k1, k2, &c)?),
            });
        }
        _ => return Err("provide --k, or both --k1 and --k2".into()),
    }
    let body = output::render_moments(&records, args.format)?;
    output::emit(&body, args.out.as_deref())?;
    Ok(ExitCode::from(0))
}
