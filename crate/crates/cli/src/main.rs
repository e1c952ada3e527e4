//! `sieve`: simulate the Bernoulli sieve, print normalization constants,
//! run verification suites and tabulate limit laws.

mod size;
mod suites;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use sieve::limits::{self, LimitLaw};
use sieve::mc::{self, ExperimentPlan, RunConfig, Size, Summary, Target};
use sieve::processes::DEFAULT_EPS;
use sieve::{DistributionSpec, Error};

use suites::Suite;

#[derive(Parser)]
#[command(name = "sieve", version, about = "Bernoulli sieve simulation and limit constants")]
struct Cli {
    /// Worker threads for replicate-parallel runs [default: all cores]
    #[arg(long, global = true, env = "SIEVE_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run replicates of one target and write the sample
    Simulate(SimulateArgs),
    /// Print regime, centering and scaling as JSON
    Constants {
        #[arg(long, value_parser = parse_law)]
        law: DistributionSpec,
        #[arg(long, value_parser = size::parse_integer)]
        n: u64,
    },
    /// Run a named verification suite; exits 1 when a check fails
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long, value_parser = parse_law, default_value = "beta:1")]
        law: DistributionSpec,
        #[arg(long, value_parser = parse_positive)]
        replicates: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ball count for suites that simulate occupancy
        #[arg(long, value_parser = parse_positive)]
        n: Option<u64>,
    },
    /// Tabulate a limit distribution function on an even grid as CSV
    LimitCdf {
        #[arg(long, value_enum)]
        kind: LawKind,
        /// Index for stable-c, in (1, 2)
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u64).range(2..))]
        points: u64,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = parse_law)]
    law: DistributionSpec,
    #[arg(long, default_value = "k_n", value_parser = parse_target)]
    target: Target,
    /// Ball count (scientific notation allowed if integral)
    #[arg(long, value_parser = size::parse_integer, conflicts_with_all = ["t", "x"])]
    n: Option<u64>,
    /// Poisson time
    #[arg(long, conflicts_with = "x")]
    t: Option<f64>,
    /// Walk level
    #[arg(long)]
    x: Option<f64>,
    #[arg(long, default_value_t = 1000, value_parser = parse_positive)]
    replicates: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Truncation budget for infinite series
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// Report (X - b_n)/a_n alongside the raw value (needs --n)
    #[arg(long)]
    normalize: bool,
    /// Sample file; stdout when absent
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the JSON summary here
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LawKind {
    Normal,
    StableC,
    StableD,
}

fn parse_law(s: &str) -> Result<DistributionSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_positive(s: &str) -> Result<u64, String> {
    match size::parse_integer(s)? {
        0 => Err("must be at least 1".into()),
        v => Ok(v),
    }
}

/// Failure classes mapped to exit status.
enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let unwrapped = match &e {
            Error::Replicate { source, .. } => source.as_ref(),
            other => other,
        };
        match unwrapped {
            Error::InvalidLaw(_)
            | Error::LawSyntax { .. }
            | Error::Unclassifiable(_)
            | Error::RegimeMismatch { .. }
            | Error::KindMismatch(_)
            | Error::Overflow { .. }
            | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Internal(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn simulate(args: SimulateArgs, threads: Option<usize>) -> Result<ExitCode, Failure> {
    let size = match (args.n, args.t, args.x) {
        (Some(n), None, None) => Size::Balls(n),
        (None, Some(t), None) => Size::Time(t),
        (None, None, Some(x)) => Size::Level(x),
        _ => return Err(Failure::Usage("give exactly one of --n, --t, --x".into())),
    };
    let mut plan = ExperimentPlan::new(args.law, args.target, size, args.replicates, args.seed);
    plan.eps = args.eps;
    if args.normalize {
        let Size::Balls(n) = size else {
            return Err(Failure::Usage("--normalize needs --n".into()));
        };
        let norm = limits::normalization(&plan.spec, n)?;
        plan = plan.with_normalization(norm);
    }
    let sample = mc::run_experiment(&plan, threads)?;
    let summary = Summary::new(&plan, &sample, RunConfig::new(threads));
    if let Some(path) = &args.summary {
        summary.write(BufWriter::new(File::create(path)?))?;
    }
    let mut out = open_output(&args.output)?;
    match args.format {
        Format::Csv => mc::write_samples_csv(&sample, &mut out)?,
        Format::Json => {
            summary.write(&mut out)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn print_json(value: &serde_json::Value) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::Internal(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let threads = cli.threads.map(|t| t as usize);
    match cli.command {
        Command::Simulate(args) => simulate(args, threads),
        Command::Constants { law, n } => {
            let norm = limits::normalization(&law, n)?;
            let mut value = serde_json::to_value(norm).map_err(|e| Failure::Internal(e.to_string()))?;
            value["law"] = json!(law.to_string());
            value["limit_law"] = json!(norm.limit_law(&law));
            print_json(&value)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, law, replicates, seed, n } => {
            let opts = suites::Options { replicates, seed, threads, n };
            let report = suites::run(suite, &law, &opts)?;
            print_json(&serde_json::to_value(&report).map_err(|e| Failure::Internal(e.to_string()))?)?;
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::LimitCdf { kind, alpha, from, to, points } => {
            let law = match (kind, alpha) {
                (LawKind::Normal, None) => LimitLaw::Normal,
                (LawKind::StableD, None) => LimitLaw::StableD,
                (LawKind::StableC, Some(a)) => LimitLaw::StableC(a),
                (LawKind::StableC, None) => return Err(Failure::Usage("stable-c needs --alpha".into())),
                (_, Some(_)) => return Err(Failure::Usage("--alpha only applies to stable-c".into())),
            };
            law.validate()?;
            if !(from.is_finite() && to.is_finite() && from < to) {
                return Err(Failure::Usage("need finite --from < --to".into()));
            }
            let mut out = io::stdout().lock();
            writeln!(out, "x,cdf")?;
            for i in 0..points {
                let x = from + (to - from) * i as f64 / (points - 1) as f64;
                writeln!(out, "{x},{}", law.cdf(x)?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
