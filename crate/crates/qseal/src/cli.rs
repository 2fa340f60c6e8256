//! Command-line front end: `verify`, `channel`, `attack`, `sweep` and
//! `scaling` subcommands emitting CSV or JSON-lines reports.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on runtime failures
//! (including verification failures). When `--out` is given nothing is
//! written to stdout.

use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::harness::{
    run_experiment, scaling_table, ExperimentConfig, MessageSelection, SchemeSpec,
};
use crate::infometrics::{ChannelMatrix, DEFAULT_CHANNEL_DIM_LIMIT};
use crate::report::{emit, fmt_sig, render_rows, render_scaling, ReportFormat};
use crate::seal::{MESSAGE_BITS_LIMIT, STATE_BITS_LIMIT};

#[derive(Debug, Parser)]
#[command(
    name = "qseal",
    version,
    about = "Imperfect quantum string seal simulator and attack analyzer"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the built-in verification suite and print a pass/fail table
    Verify,
    /// Print one decode channel matrix p(i | i')
    Channel(ChannelCmd),
    /// Report on the attack against a single sealed message
    Attack(AttackCmd),
    /// Sweep the full (n, nu, message) grid
    Sweep(SweepCmd),
    /// Tabulate readability and faultless-decode scaling over n
    Scaling(ScalingCmd),
}

#[derive(Debug, Clone, Args)]
struct SchemeArgs {
    /// String lengths in bits, comma separated (e.g. 4,8,16)
    #[arg(long, value_delimiter = ',', value_parser = parse_n)]
    n: Option<Vec<u32>>,

    /// Base angle Theta in radians; must lie in (0, pi/4)
    #[arg(long, value_parser = parse_theta, conflicts_with = "theta_deg")]
    theta: Option<f64>,

    /// Base angle Theta in degrees; must lie in (0, 45)
    #[arg(long, value_parser = parse_theta_deg)]
    theta_deg: Option<f64>,

    /// Exponent alpha; must lie in (0, 1/2)
    #[arg(long, value_parser = parse_alpha, default_value = "0.25")]
    alpha: f64,

    /// Scheme: "canonical" or "dense:PATH"
    #[arg(long, default_value = "canonical")]
    scheme: String,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Report format
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,

    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Jsonl => ReportFormat::Jsonl,
        }
    }
}

#[derive(Debug, Args)]
struct ChannelCmd {
    #[command(flatten)]
    scheme: SchemeArgs,

    /// Attack strength nu; must lie in [0, 1]
    #[arg(long, value_delimiter = ',', value_parser = parse_nu, default_value = "0.5")]
    nu: Vec<f64>,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct AttackCmd {
    #[command(flatten)]
    scheme: SchemeArgs,

    /// Attack strength nu; must lie in [0, 1]
    #[arg(long, value_delimiter = ',', value_parser = parse_nu, default_value = "0.5")]
    nu: Vec<f64>,

    /// The sealed message index to attack
    #[arg(long, default_value = "0")]
    messages: String,

    /// Monte Carlo trials (0 = analytic only)
    #[arg(long, default_value = "0")]
    trials: u64,

    /// Master seed for Monte Carlo sampling
    #[arg(long, default_value = "0")]
    seed: u64,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepCmd {
    #[command(flatten)]
    scheme: SchemeArgs,

    /// Attack strengths, comma separated; each must lie in [0, 1]
    #[arg(long, value_delimiter = ',', value_parser = parse_nu, default_value = "0.5")]
    nu: Vec<f64>,

    /// Monte Carlo trials per grid cell (0 = analytic only)
    #[arg(long, default_value = "0")]
    trials: u64,

    /// Master seed; sub-seeds derive from it per grid cell
    #[arg(long, default_value = "0")]
    seed: u64,

    /// Messages per scheme point: "all" or a sample count
    #[arg(long, default_value = "64")]
    messages: String,

    /// Run grid cells sequentially instead of in parallel
    #[arg(long)]
    serial: bool,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ScalingCmd {
    /// String lengths in bits, comma separated
    #[arg(long, value_delimiter = ',', value_parser = parse_n)]
    n: Option<Vec<u32>>,

    /// Base angle Theta in radians; must lie in (0, pi/4)
    #[arg(long, value_parser = parse_theta, conflicts_with = "theta_deg")]
    theta: Option<f64>,

    /// Base angle Theta in degrees; must lie in (0, 45)
    #[arg(long, value_parser = parse_theta_deg)]
    theta_deg: Option<f64>,

    /// Exponent alpha; must lie in (0, 1/2)
    #[arg(long, value_parser = parse_alpha, default_value = "0.25")]
    alpha: f64,

    #[command(flatten)]
    output: OutputArgs,
}

fn parse_n(s: &str) -> Result<u32, String> {
    let n: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if n >= 1 {
        Ok(n)
    } else {
        Err("n must be at least 1".into())
    }
}

fn parse_theta(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < FRAC_PI_4 {
        Ok(v)
    } else {
        Err("theta must lie in (0, pi/4) radians".into())
    }
}

fn parse_theta_deg(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 45.0 {
        Ok(v.to_radians())
    } else {
        Err("theta-deg must lie in (0, 45) degrees".into())
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 0.5 {
        Ok(v)
    } else {
        Err("alpha must lie in (0, 1/2)".into())
    }
}

fn parse_nu(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err("nu must lie in [0, 1]".into())
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

/// Parses argv and runs; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            2
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Verify => run_verify(),
        Command::Channel(cmd) => run_channel(cmd).map(|()| 0),
        Command::Attack(cmd) => run_attack(cmd).map(|()| 0),
        Command::Sweep(cmd) => run_sweep(cmd).map(|()| 0),
        Command::Scaling(cmd) => run_scaling(cmd).map(|()| 0),
    }
}

fn run_verify() -> Result<i32, CliError> {
    let checks = crate::verify::run_all();
    let mut failed = 0;
    for check in &checks {
        let tag = if check.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {:<36} {}", check.name, check.detail);
        if !check.passed {
            failed += 1;
        }
    }
    println!("{} checks, {} failed", checks.len(), failed);
    Ok(if failed == 0 { 0 } else { 1 })
}

fn channel_dim_limit() -> Result<u64, CliError> {
    match std::env::var("QSEAL_DENSE_LIMIT") {
        Ok(value) => value
            .parse::<u64>()
            .map_err(|_| usage(format!("QSEAL_DENSE_LIMIT must be an integer, got {value:?}"))),
        Err(_) => Ok(DEFAULT_CHANNEL_DIM_LIMIT),
    }
}

fn resolve_theta(scheme: &SchemeArgs) -> Result<f64, CliError> {
    scheme
        .theta
        .or(scheme.theta_deg)
        .ok_or_else(|| usage("canonical schemes need --theta or --theta-deg"))
}

fn resolve_scheme(scheme: &SchemeArgs, mc_trials: u64) -> Result<SchemeSpec, CliError> {
    if scheme.scheme == "canonical" {
        let n_values = scheme
            .n
            .clone()
            .ok_or_else(|| usage("canonical schemes need --n"))?;
        for &n in &n_values {
            if n > MESSAGE_BITS_LIMIT {
                return Err(usage(format!(
                    "n must lie in [1, {MESSAGE_BITS_LIMIT}] for message-space commands, got {n}"
                )));
            }
            if mc_trials > 0 && n > STATE_BITS_LIMIT {
                return Err(usage(format!(
                    "Monte Carlo sampling needs n <= {STATE_BITS_LIMIT}, got {n}; rerun with --trials 0"
                )));
            }
        }
        Ok(SchemeSpec::Canonical {
            n_values,
            theta: resolve_theta(scheme)?,
            alpha: scheme.alpha,
        })
    } else if let Some(path) = scheme.scheme.strip_prefix("dense:") {
        Ok(SchemeSpec::DenseFile(PathBuf::from(path)))
    } else {
        Err(usage(format!(
            "scheme must be \"canonical\" or \"dense:PATH\", got {:?}",
            scheme.scheme
        )))
    }
}

fn single_nu(nu: &[f64]) -> Result<f64, CliError> {
    match nu {
        [v] => Ok(*v),
        _ => Err(usage("exactly one --nu value is expected here")),
    }
}

fn parse_messages(text: &str) -> Result<MessageSelection, CliError> {
    if text == "all" {
        return Ok(MessageSelection::All);
    }
    let count: u64 = text
        .parse()
        .map_err(|_| usage(format!("--messages must be \"all\" or a count, got {text:?}")))?;
    if count == 0 {
        return Err(usage("--messages must be at least 1"));
    }
    Ok(MessageSelection::Sample(count))
}

fn run_channel(cmd: &ChannelCmd) -> Result<(), CliError> {
    let limit = channel_dim_limit()?;
    let nu = single_nu(&cmd.nu)?;
    let spec = resolve_scheme(&cmd.scheme, 0)?;
    let amps = match &spec {
        SchemeSpec::Canonical {
            n_values,
            theta,
            alpha,
        } => {
            let [n] = n_values.as_slice() else {
                return Err(usage("channel prints one matrix; pass a single --n"));
            };
            let params = crate::seal::SealParameters::new(*n, *theta, *alpha)?;
            crate::seal::AmplitudeMatrix::product_form(&params)?
        }
        SchemeSpec::DenseFile(path) => crate::harness::load_dense_scheme(path)?,
        SchemeSpec::DenseMatrix(m) => m.clone(),
    };
    if amps.dim() > limit {
        return Err(usage(format!(
            "channel matrices are limited to dimension {limit} (override with QSEAL_DENSE_LIMIT)"
        )));
    }
    let channel = ChannelMatrix::from_amplitudes_with_limit(&amps, nu, limit)?;
    let mut out = String::new();
    for i in 0..channel.dim() {
        match cmd.output.format {
            FormatArg::Csv => {
                let line: Vec<String> = channel.row(i).iter().map(|&p| fmt_sig(p)).collect();
                out.push_str(&line.join(","));
            }
            FormatArg::Jsonl => {
                out.push_str(&serde_json::to_string(channel.row(i)).expect("row serializes"));
            }
        }
        out.push('\n');
    }
    emit(&out, cmd.output.out.as_deref())?;
    Ok(())
}

fn run_attack(cmd: &AttackCmd) -> Result<(), CliError> {
    let nu = single_nu(&cmd.nu)?;
    let spec = resolve_scheme(&cmd.scheme, cmd.trials)?;
    if let SchemeSpec::Canonical { n_values, .. } = &spec {
        if n_values.len() != 1 {
            return Err(usage("attack reports on one scheme; pass a single --n"));
        }
    }
    let message: u64 = cmd
        .messages
        .parse()
        .map_err(|_| usage(format!("--messages must be a message index, got {:?}", cmd.messages)))?;
    let config = ExperimentConfig {
        scheme: spec,
        nu_grid: vec![nu],
        trials: cmd.trials,
        seed: cmd.seed,
        messages: MessageSelection::Explicit(vec![message]),
        parallel: false,
        channel_dim_limit: channel_dim_limit()?,
    };
    let rows = run_experiment(&config)?;
    let rendered = render_rows(&rows, cmd.output.format.into())?;
    emit(&rendered, cmd.output.out.as_deref())?;
    Ok(())
}

fn run_sweep(cmd: &SweepCmd) -> Result<(), CliError> {
    let config = ExperimentConfig {
        scheme: resolve_scheme(&cmd.scheme, cmd.trials)?,
        nu_grid: cmd.nu.clone(),
        trials: cmd.trials,
        seed: cmd.seed,
        messages: parse_messages(&cmd.messages)?,
        parallel: !cmd.serial,
        channel_dim_limit: channel_dim_limit()?,
    };
    let rows = run_experiment(&config)?;
    let rendered = render_rows(&rows, cmd.output.format.into())?;
    emit(&rendered, cmd.output.out.as_deref())?;
    Ok(())
}

fn run_scaling(cmd: &ScalingCmd) -> Result<(), CliError> {
    let n_values = cmd
        .n
        .clone()
        .ok_or_else(|| usage("scaling needs --n"))?;
    let theta = cmd
        .theta
        .or(cmd.theta_deg)
        .ok_or_else(|| usage("scaling needs --theta or --theta-deg"))?;
    let rows = scaling_table(theta, cmd.alpha, &n_values)?;
    let rendered = render_scaling(&rows, cmd.output.format.into())?;
    emit(&rendered, cmd.output.out.as_deref())?;
    Ok(())
}
