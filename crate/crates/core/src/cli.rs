//! Command-line driver. Exit codes: 0 success, 1 usage, 2 invalid input
//! data, 3 numeric failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{export_report, run_bench, BenchConfig, ReportFormat};
use crate::data::{ColumnKind, RoleAssignment};
use crate::error::{Error, Result};
use crate::estimators::{estimate, kl_entropy_result, EstimateParams, EstimatorKind, DEFAULT_K};
use crate::io::{parse_kinds, read_csv, write_csv};
use crate::knn::SearchStrategy;
use crate::selftest;
use crate::simulators::{generate, Scenario, ScenarioSpec};

pub const RESULT_SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mixed-cmi", version, about = "kNN estimates of (conditional) mutual information on mixed-type data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate I(X;Y|Z) (or I(X;Y) with no --z) from a CSV file.
    Estimate(EstimateArgs),
    /// Draw a simulated dataset and write it as CSV.
    Simulate(SimulateArgs),
    /// Run the replicated scenario grid and write a report.
    Bench(BenchArgs),
    /// Run the internal consistency checks.
    Selftest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Search {
    Auto,
    Brute,
    Tree,
}

impl From<Search> for SearchStrategy {
    fn from(s: Search) -> Self {
        match s {
            Search::Auto => SearchStrategy::Auto,
            Search::Brute => SearchStrategy::BruteForce,
            Search::Tree => SearchStrategy::KdTree,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// CSV file with a header row.
    pub input: PathBuf,
    /// Column kinds, e.g. `cont,disc,cat`; overrides any sidecar or in-file declaration.
    #[arg(long)]
    pub types: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub y: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub z: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// proposed, fp, ravk1, ravk2, ksg or kl.
    #[arg(long, default_value = "proposed")]
    pub estimator: EstimatorKind,
    /// Report max(estimate, 0) (default).
    #[arg(long, overrides_with = "no_clamp")]
    pub clamp: bool,
    #[arg(long)]
    pub no_clamp: bool,
    /// Report the estimate in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
    /// Norm for the KL entropy estimator; `inf` for the max norm.
    #[arg(long, default_value_t = f64::INFINITY)]
    pub p_norm: f64,
    #[arg(long, value_enum, default_value_t = Search::Auto)]
    pub search: Search,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// egg_chain, disc_unif_cont, four_point_discrete or gauss_discrete_mixture (or sim1..sim4).
    #[arg(long)]
    pub scenario: Scenario,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',')]
    pub scenarios: Vec<Scenario>,
    #[arg(long, value_delimiter = ',')]
    pub estimators: Vec<EstimatorKind>,
    #[arg(long = "n-grid", value_delimiter = ',')]
    pub n_grid: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// Base seed for all replication seeds.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Clamp each estimate at zero (off by default).
    #[arg(long)]
    pub clamp: bool,
    #[arg(long, value_enum, default_value_t = Search::Auto)]
    pub search: Search,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct EstimateOutput {
    pub schema_version: u32,
    /// Estimate in `units`.
    pub estimate: f64,
    /// Estimate in nats.
    pub nats: f64,
    pub units: &'static str,
    pub estimator: EstimatorKind,
    pub k: usize,
    pub n: usize,
    pub clamped: bool,
}

fn exit_code(err: &Error) -> i32 {
    if err.is_validation() || matches!(err, Error::Io(_)) {
        EXIT_INVALID_DATA
    } else {
        EXIT_NUMERIC
    }
}

fn open_output<'a>(path: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

fn cmd_estimate(args: &EstimateArgs, stdout: &mut dyn Write) -> Result<()> {
    let kinds: Option<Vec<ColumnKind>> = args.types.as_deref().map(parse_kinds).transpose()?;
    let ds = read_csv(&args.input, kinds.as_deref())?;
    let params = EstimateParams {
        k: args.k,
        clamp: !args.no_clamp,
        p_norm: args.p_norm,
        strategy: args.search.into(),
    };

    let result = if args.estimator == EstimatorKind::KlEntropy {
        let target = if args.x.is_empty() {
            ds.clone()
        } else {
            let cols = args.x.iter().map(|c| ds.column_index(c)).collect::<Result<Vec<_>>>()?;
            ds.project(&cols)?
        };
        kl_entropy_result(&target, params)?
    } else {
        let roles = RoleAssignment::from_names(&ds, &args.x, &args.y, &args.z)?;
        estimate(args.estimator, &ds, &roles, params)?
    };

    let nats = result.estimate;
    let out = EstimateOutput {
        schema_version: RESULT_SCHEMA_VERSION,
        estimate: if args.bits { nats / std::f64::consts::LN_2 } else { nats },
        nats,
        units: if args.bits { "bits" } else { "nats" },
        estimator: args.estimator,
        k: args.k,
        n: result.n,
        clamped: result.clamped,
    };
    let mut w = open_output(&args.output, stdout)?;
    serde_json::to_writer(&mut w, &out)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let (ds, _) = generate(&ScenarioSpec {
        id: args.scenario,
        n: args.n,
        seed: args.seed,
    })?;
    let mut w = open_output(&args.output, stdout)?;
    write_csv(&ds, &mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_bench(args: &BenchArgs, stdout: &mut dyn Write) -> Result<()> {
    let defaults = BenchConfig::default();
    let config = BenchConfig {
        scenarios: if args.scenarios.is_empty() { defaults.scenarios } else { args.scenarios.clone() },
        estimators: if args.estimators.is_empty() { defaults.estimators } else { args.estimators.clone() },
        n_grid: if args.n_grid.is_empty() { defaults.n_grid } else { args.n_grid.clone() },
        replications: args.reps,
        k: args.k,
        base_seed: args.seed,
        clamp: args.clamp,
        strategy: args.search.into(),
    };
    let report = run_bench(&config)?;
    let format = match args.format {
        Format::Csv => ReportFormat::Csv,
        Format::Json => ReportFormat::Json,
    };
    let mut w = open_output(&args.output, stdout)?;
    export_report(&report, format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn validate_usage(cli: &Cli) -> std::result::Result<(), String> {
    if let Command::Estimate(a) = &cli.command {
        if a.estimator != EstimatorKind::KlEntropy && (a.x.is_empty() || a.y.is_empty()) {
            return Err("estimate needs --x and --y column lists (only --estimator kl can omit them)".into());
        }
        if a.estimator == EstimatorKind::KlEntropy && !(a.y.is_empty() && a.z.is_empty()) {
            return Err("--estimator kl takes its columns from --x only".into());
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the subcommand; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    if let Err(msg) = validate_usage(&cli) {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_USAGE;
    }

    let outcome = match &cli.command {
        Command::Estimate(a) => cmd_estimate(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Bench(a) => cmd_bench(a, stdout),
        Command::Selftest => {
            let checks = selftest::run_checks();
            return match selftest::report(&checks, &mut *stdout) {
                Ok(true) => EXIT_OK,
                _ => EXIT_NUMERIC,
            };
        }
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
