//! Command-line front end: scenario simulation, analytic solves, stage-cap
//! optimization, and beacon-field codec utilities.
//!
//! Exit codes: 0 on success, 2 for configuration and usage errors, 3 for
//! runtime failures such as a non-converging solve.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::codec::{ati_start_time, decode_bic, encode_bic, BeaconIntervalControl, BIC_LEN};
use crate::error::{Error, Result};
use crate::markov::{solve_fixed_point, ChainParams, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::planner::optimize_m;
use crate::sim::{run_experiment, sweep_figures, Preset, ScenarioConfig, SweepResult};
use crate::types::AbftLayout;

const EXIT_CONFIG: i32 = 2;
const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "abft",
    about = "Simulator and analytical toolkit for A-BFT random-access beam training",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a Monte Carlo scenario or a named benchmark preset.
    Simulate(SimulateArgs),
    /// Solve the chain model's fixed point for (P, m, s).
    Analyze(AnalyzeArgs),
    /// Evaluate every backoff-stage cap and report the best.
    OptimizeM(OptimizeArgs),
    /// Encode or decode the Beacon Interval Control field.
    #[command(subcommand)]
    Codec(CodecCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Scenario file (strict JSON mirroring the library's ScenarioConfig).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named benchmark preset.
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Preset>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Master seed; falls back to ABFT_SEED, then 0.
    #[arg(long, env = "ABFT_SEED")]
    seed: Option<u64>,
    /// Replications per point; presets default to 100000.
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Admission floor P in (0, 1].
    #[arg(long)]
    p: f64,
    /// Backoff-stage cap in 1..=5.
    #[arg(long)]
    m: u32,
    /// Average contenders per slot.
    #[arg(long)]
    s: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: u32,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    /// Average contenders per slot.
    #[arg(long)]
    s: f64,
    /// Admission floor P in (0, 1].
    #[arg(long)]
    p: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Output file for the JSON plan; stdout table otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum CodecCommand {
    /// Pack field values into the 6-byte element (prints hex).
    Encode(EncodeArgs),
    /// Unpack a hex element into field values.
    Decode {
        /// 12 hex characters (6 bytes).
        hex: String,
    },
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[arg(long)]
    abft_length: u32,
    #[arg(long)]
    fss: u32,
    /// Overload-indicator bit.
    #[arg(long, default_value_t = false)]
    oi: bool,
    #[arg(long, default_value_t = 0)]
    e_abft_length: u32,
    /// Opaque bits of the element as 12 hex characters.
    #[arg(long)]
    payload: Option<String>,
}

fn parse_preset(value: &str) -> Result<Preset> {
    value.parse()
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Range { .. } | Error::Config(_) | Error::Truncated { .. } => EXIT_CONFIG,
        Error::Numerical(_) | Error::Convergence { .. } => EXIT_RUNTIME,
    }
}

/// Parses arguments from the process environment, runs the command, and
/// returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Analyze(args) => analyze(args),
        Command::OptimizeM(args) => optimize(args),
        Command::Codec(CodecCommand::Encode(args)) => codec_encode(args),
        Command::Codec(CodecCommand::Decode { hex }) => codec_decode(&hex),
    }
}

/// Writes to stdout, exiting quietly if the downstream reader went away.
fn emit(text: impl std::fmt::Display) {
    use std::io::Write;
    if write!(std::io::stdout(), "{text}").is_err() {
        std::process::exit(0);
    }
}

fn emit_line(text: impl std::fmt::Display) {
    emit(format_args!("{text}\n"));
}

fn write_output(out: &Option<PathBuf>, contents: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, contents)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            emit_line(contents);
            Ok(())
        }
    }
}

fn render(result: &SweepResult, format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Csv => result.to_csv(),
        OutputFormat::Json => serde_json::to_string_pretty(result)
            .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))?,
    })
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let seed = args.seed.unwrap_or(0);
    let result = match (&args.preset, &args.config) {
        (Some(preset), None) => sweep_figures(*preset, args.trials, seed)?,
        (None, Some(path)) => {
            let raw = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let mut config: ScenarioConfig = serde_json::from_str(&raw)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            if let Some(seed) = args.seed {
                config.master_seed = seed;
            }
            if let Some(trials) = args.trials {
                config.trials = trials;
            }
            run_experiment(&config)?
        }
        _ => {
            return Err(Error::Config(
                "exactly one of --preset or --config is required".into(),
            ))
        }
    };

    let rendered = render(&result, args.format)?;
    let summarize_to_stderr = args.out.is_none();
    write_output(&args.out, &rendered)?;
    for point in &result.points {
        let line = format!(
            "x={} {} mean={:.4} ci95={:.4}",
            point.x, point.metric, point.mean, point.ci95
        );
        if summarize_to_stderr {
            eprintln!("{line}");
        } else {
            emit_line(&line);
        }
    }
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let params = ChainParams::new(args.p, args.m, args.s).validate()?;
    let solution = solve_fixed_point(&params, args.tol, args.max_iter)?;
    let json = serde_json::to_string_pretty(&solution)
        .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))?;
    write_output(&args.out, &json)?;
    eprintln!(
        "pe={:.10} p_tr={:.10} b000={:.10} residual={:.3e} iterations={}",
        solution.p_e, solution.p_tr, solution.b000, solution.residual, solution.iterations
    );
    Ok(())
}

fn optimize(args: OptimizeArgs) -> Result<()> {
    let plan = optimize_m(args.s, args.p)?;
    match (args.format, &args.out) {
        (OutputFormat::Json, _) | (_, Some(_)) => {
            let json = serde_json::to_string_pretty(&plan)
                .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))?;
            write_output(&args.out, &json)?;
            if args.out.is_some() {
                emit(&plan);
            }
        }
        (OutputFormat::Csv, None) => emit(&plan),
    }
    Ok(())
}

fn parse_hex(hex: &str) -> Result<Vec<u8>> {
    let hex = hex.trim();
    if !hex.len().is_multiple_of(2) {
        return Err(Error::Config(format!(
            "hex string has odd length {}",
            hex.len()
        )));
    }
    (0..hex.len())
        .step_by(2)
        .map(|at| {
            u8::from_str_radix(&hex[at..at + 2], 16)
                .map_err(|e| Error::Config(format!("bad hex at offset {at}: {e}")))
        })
        .collect()
}

fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn codec_encode(args: EncodeArgs) -> Result<()> {
    let mut fields = BeaconIntervalControl::new(
        args.abft_length,
        args.fss,
        args.oi,
        args.e_abft_length,
    );
    if let Some(hex) = &args.payload {
        let bytes = parse_hex(hex)?;
        if bytes.len() != BIC_LEN {
            return Err(Error::Config(format!(
                "payload must be {BIC_LEN} bytes, got {}",
                bytes.len()
            )));
        }
        let mut payload = [0u8; BIC_LEN];
        payload.copy_from_slice(&bytes);
        fields = fields.with_payload(payload);
    }
    let bytes = encode_bic(&fields)?;
    emit_line(to_hex(&bytes));
    Ok(())
}

fn codec_decode(hex: &str) -> Result<()> {
    let bytes = parse_hex(hex)?;
    let fields = decode_bic(&bytes)?;
    let mut report = format!(
        "abft_length = {}\nfss = {}\noi = {}\ne_abft_length = {}\npayload = {}\n",
        fields.abft_length,
        fields.fss,
        fields.oi as u8,
        fields.e_abft_length,
        to_hex(&fields.payload)
    );
    let layout = AbftLayout::new(
        fields.abft_length,
        fields.e_abft_length,
        fields.fss,
    );
    if layout.validate().is_ok() {
        let ati = ati_start_time(&layout);
        report.push_str(&format!(
            "next_ati_start = {} slots ({} us)\n",
            ati.start_time_slots, ati.start_time_us
        ));
    }
    emit(report);
    Ok(())
}
