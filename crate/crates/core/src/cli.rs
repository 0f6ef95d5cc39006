//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::estimators::{estimate, EstimatorConfig, Method};
use crate::simulation::{preset, run_sweep, Scale, ScenarioSpec};
use crate::spectral::{SnapshotMatrix, Spectrum};
use crate::tracy_widom::{tw_cdf, tw_quantile, Beta};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sigcount", version, about = "Estimate the number of signals from sample-covariance eigenvalues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the number of signals in an eigenvalue or snapshot file.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo scenario and report misdetection rates.
    Simulate(SweepArgs),
    /// Run a Monte Carlo sweep over p or n (same harness as `simulate`).
    Sweep(SweepArgs),
    /// Tracy-Widom quantile (`--alpha`) or CDF (`--x`).
    Tw(TwArgs),
    /// Write the per-step decision trace of a sequential estimator as CSV.
    Trace(TraceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputKind {
    /// One eigenvalue per line.
    Eigs,
    /// CSV with p rows and n columns of snapshots.
    Snapshots,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input file.
    input: PathBuf,
    /// Number of samples behind the eigenvalues (required for `eigs`).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "eigs")]
    input_kind: InputKind,
}

#[derive(Debug, Args)]
struct TestArgs {
    /// False-alarm level of the Tracy-Widom test.
    #[arg(long, default_value_t = 0.005)]
    alpha: f64,
    /// Target detection probability of the signal-search test.
    #[arg(long, default_value_t = 0.995)]
    alpha0: f64,
    /// 1 for real data, 2 for complex data.
    #[arg(long, default_value_t = 1)]
    beta: u32,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// aic, mdl, maic, rmt, srmt, sns, a comma list, or all.
    #[arg(long, default_value = "all")]
    method: String,
    #[command(flatten)]
    test: TestArgs,
    /// Also write the decision trace (of SNS when several methods run).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[command(flatten)]
    input: InputArgs,
    /// rmt, srmt or sns.
    #[arg(long, default_value = "sns")]
    method: String,
    #[command(flatten)]
    test: TestArgs,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Scenario file.
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in figure scenario, fig1 .. fig11.
    #[arg(long)]
    preset: Option<String>,
    /// Override the number of trials per point.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the estimator list.
    #[arg(long)]
    methods: Option<String>,
    /// Use the full grid and 3000 trials for presets.
    #[arg(long)]
    full: bool,
    /// Write the CSV here and print a summary table; CSV goes to standard
    /// output otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("query").required(true).args(["alpha", "x"])))]
struct TwArgs {
    /// Upper-tail probability; prints s with 1 - F(s) = alpha.
    #[arg(long)]
    alpha: Option<f64>,
    /// Prints F(x).
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, default_value_t = 1)]
    beta: u32,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::UnknownKey(_) => EXIT_USAGE,
            Error::Numerical { .. } | Error::NotConverged { .. } | Error::Domain(_) => EXIT_NUMERICAL,
            Error::InvalidInput(_) | Error::DegenerateModel(_) | Error::Parse { .. } | Error::Io(_) => EXIT_DATA,
        };
        Self { code, message: err.to_string() }
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Estimate(a) => cmd_estimate(a, out),
        Command::Simulate(a) | Command::Sweep(a) => cmd_sweep(a, out),
        Command::Tw(a) => cmd_tw(a, out),
        Command::Trace(a) => cmd_trace(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn beta_arg(beta: u32) -> std::result::Result<Beta, Failure> {
    Beta::from_index(beta).map_err(|e| Failure::usage(e.to_string()))
}

fn config_from(test: &TestArgs) -> std::result::Result<EstimatorConfig, Failure> {
    let config = EstimatorConfig {
        alpha: test.alpha,
        alpha0: test.alpha0,
        beta: beta_arg(test.beta)?,
        ..EstimatorConfig::default()
    };
    config.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(config)
}

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })
}

fn data_error(message: String) -> Failure {
    Failure { code: EXIT_DATA, message }
}

/// Eigenvalues one per line; blank lines and `#` comments are skipped.
fn parse_eigs(text: &str) -> std::result::Result<Vec<f64>, Failure> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim().trim_end_matches(',');
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| data_error(format!("line {}: `{line}` is not a number", idx + 1)))?;
        values.push(v);
    }
    Ok(values)
}

fn parse_snapshots(text: &str) -> std::result::Result<SnapshotMatrix, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| data_error(format!("snapshot CSV: {e}")))?;
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| data_error(format!("row {}: `{f}` is not a number", idx + 1)))
            })
            .collect::<std::result::Result<Vec<f64>, Failure>>()?;
        rows.push(row);
    }
    Ok(SnapshotMatrix::from_rows(&rows)?)
}

fn load_spectrum(input: &InputArgs) -> std::result::Result<Spectrum, Failure> {
    let text = read_text(&input.input)?;
    match input.input_kind {
        InputKind::Eigs => {
            let n = input
                .n
                .ok_or_else(|| Failure::usage("--n is required with --input-kind eigs"))?;
            Ok(Spectrum::new(parse_eigs(&text)?, n)?)
        }
        InputKind::Snapshots => {
            let x = parse_snapshots(&text)?;
            if let Some(n) = input.n {
                if n != x.n() {
                    return Err(data_error(format!("--n {n} disagrees with the {} snapshot columns", x.n())));
                }
            }
            Ok(Spectrum::from_snapshots(&x)?)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| data_error(format!("{}: {e}", path.display())))
}

fn cmd_estimate(args: EstimateArgs, out: &mut dyn Write) -> CliResult {
    let methods = Method::parse_list(&args.method).map_err(|e| Failure::usage(e.to_string()))?;
    let config = config_from(&args.test)?;
    let spectrum = load_spectrum(&args.input)?;
    let mut traced = None;
    for &m in &methods {
        let est = estimate(m, &spectrum, &config)?;
        let _ = writeln!(out, "{},{}", m, est.q_hat);
        if methods.len() == 1 || m == Method::Sns {
            traced = Some(est.trace);
        }
    }
    if let Some(path) = &args.trace {
        let trace = match traced {
            Some(t) => t,
            None => estimate(Method::Sns, &spectrum, &config)?.trace,
        };
        write_file(path, &trace.to_csv())?;
    }
    Ok(())
}

fn cmd_trace(args: TraceArgs, out: &mut dyn Write) -> CliResult {
    let method: Method = args.method.parse().map_err(|e: Error| Failure::usage(e.to_string()))?;
    if !matches!(method, Method::Rmt | Method::SignalSearch | Method::Sns) {
        return Err(Failure::usage(format!("`{method}` is not a sequential estimator; use rmt, srmt or sns")));
    }
    let config = config_from(&args.test)?;
    let spectrum = load_spectrum(&args.input)?;
    let csv = estimate(method, &spectrum, &config)?.trace.to_csv();
    match &args.out {
        Some(path) => write_file(path, &csv),
        None => {
            let _ = write!(out, "{csv}");
            Ok(())
        }
    }
}

fn cmd_sweep(args: SweepArgs, out: &mut dyn Write) -> CliResult {
    let scale = if args.full { Scale::Full } else { Scale::Desk };
    let mut spec = match (&args.scenario, &args.preset) {
        (Some(path), _) => ScenarioSpec::parse_with_scale(&read_text(path)?, scale)?,
        (None, Some(name)) => preset(name, scale).map_err(|e| Failure::usage(e.to_string()))?,
        (None, None) => return Err(Failure::usage("give a scenario file or --preset")),
    };
    if let Some(t) = args.trials {
        spec.trials = t;
    }
    if let Some(s) = args.seed {
        spec.base_seed = s;
    }
    if let Some(m) = &args.methods {
        spec.methods = Method::parse_list(m).map_err(|e| Failure::usage(e.to_string()))?;
    }
    spec.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let result = run_sweep(&spec)?;
    let csv = result.to_csv();
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            let _ = write!(out, "{}", result.summary());
        }
        None => {
            let _ = write!(out, "{csv}");
        }
    }
    Ok(())
}

fn cmd_tw(args: TwArgs, out: &mut dyn Write) -> CliResult {
    let beta = beta_arg(args.beta)?;
    let value = match (args.alpha, args.x) {
        (Some(alpha), None) => tw_quantile(alpha, beta).map_err(|e| Failure::usage(e.to_string()))?,
        (None, Some(x)) => tw_cdf(x, beta),
        _ => return Err(Failure::usage("give exactly one of --alpha and --x")),
    };
    let _ = writeln!(out, "{value:.6}");
    Ok(())
}
