//! `gbsqec` command-line front end.
//!
//! Subcommands:
//!
//! * `table`: phase and parity bits of every GBS, by live simulation.
//! * `correct`: one protocol run with errors given as `--flip Q` / `--rot Q:RAD`.
//! * `sweep`: exhaustive or sampled verification over register sizes.
//! * `trace`: JSON gate list of the discrimination and correction circuits.
//!
//! Exit codes: `0` all runs passed, `1` a correction failed, `2` usage or
//! validation error.

pub mod report;
pub mod sweep;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use gbs_qec::correct::{CorrectionOptions, ParityStrategy};
use gbs_qec::trace::{trace, TraceSelection};
use gbs_qec::{build, enumerate, signature_of, ErrorSpec64, GbsLabel, Mode};
use serde::Serialize;
use thiserror::Error;

use crate::report::{bits, text_line, CsvRow, RunReport, SweepOutput, SweepSummary};
use crate::sweep::{run_case, run_sweep, FlipMode, SweepCase, SweepConfig};

/// Environment variable overriding the default pass tolerance.
pub const TOLERANCE_ENV: &str = "GBS_QEC_TOLERANCE";
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Discrete,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => Mode::Full,
            ModeArg::Discrete => Mode::Discrete,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gbsqec",
    version,
    about = "Discrimination and automated error correction of generalized Bell states"
)]
pub struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Phase and parity readouts of every GBS on n qubits.
    Table {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run part 1, inject errors, run part 2, report the syndrome.
    Correct(CorrectArgs),
    /// Verify restoration over many labels and errors.
    Sweep(SweepArgs),
    /// Export the circuits as an ordered JSON gate list.
    Trace {
        /// GBS label `n:x:+` or `n:x:-`.
        #[arg(allow_hyphen_values = true)]
        label: String,
        /// Only part 1 (discrimination) or part 2 (correction).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        part: Option<u8>,
        /// Only this step of part 2.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        step: Option<u8>,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        #[arg(long)]
        pretty: bool,
    },
}

#[derive(Debug, Args)]
pub struct CorrectArgs {
    /// GBS label `n:x:+` or `n:x:-`.
    #[arg(allow_hyphen_values = true)]
    pub label: String,
    /// Bit flip on qubit Q (1-based). Repeatable.
    #[arg(long = "flip", value_name = "Q")]
    pub flips: Vec<String>,
    /// Phase rotation diag(1, e^{i RAD}) on qubit Q. Repeatable.
    #[arg(long = "rot", value_name = "Q:RAD", allow_hyphen_values = true)]
    pub rots: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Pass iff fidelity >= 1 - tolerance.
    #[arg(long, env = TOLERANCE_ENV, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Read all parities before correcting any (debug; fails by design).
    #[arg(long)]
    pub batch_parity: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Register sizes: `N` or `LO..HI` (inclusive).
    #[arg(long, value_name = "RANGE")]
    pub n: String,
    /// Every label, every flip subset, every delta.
    #[arg(long, conflicts_with = "sampled")]
    pub exhaustive: bool,
    /// K random cases per register size.
    #[arg(long, value_name = "K")]
    pub sampled: Option<usize>,
    /// Comma-separated rotation angles in radians.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub deltas: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = TOLERANCE_ENV, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Read all parities before correcting any (debug; fails by design).
    #[arg(long)]
    pub batch_parity: bool,
    /// Record wall time per case (makes output nondeterministic).
    #[arg(long)]
    pub timing: bool,
    /// Print every case in text mode, not only failures.
    #[arg(long)]
    pub verbose: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Parses `N` or `LO..HI`.
pub fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<usize>, CliError> {
    let bad = || CliError::Usage(format!("invalid range `{s}` (expected N or LO..HI)"));
    match s.split_once("..") {
        Some((lo, hi)) => {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            Ok(lo.trim().parse().map_err(|_| bad())?..=hi.trim().parse().map_err(|_| bad())?)
        }
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            Ok(n..=n)
        }
    }
}

fn parse_label(s: &str) -> Result<GbsLabel, CliError> {
    s.parse()
        .map_err(|e: gbs_qec::Error| CliError::Usage(e.to_string()))
}

/// Builds the error list from `--flip` / `--rot` in command-line order.
fn error_spec(args: &CorrectArgs, matches: &ArgMatches, n: usize) -> Result<ErrorSpec64, CliError> {
    let mut ops: Vec<(usize, ErrorOp)> = Vec::new();
    let flip_idx = matches.indices_of("flips").into_iter().flatten();
    for (idx, raw) in flip_idx.zip(&args.flips) {
        let q = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid --flip `{raw}`")))?;
        ops.push((idx, ErrorOp::Flip(q)));
    }
    let rot_idx = matches.indices_of("rots").into_iter().flatten();
    for (idx, raw) in rot_idx.zip(&args.rots) {
        let bad = || CliError::Usage(format!("invalid --rot `{raw}` (expected Q:RADIANS)"));
        let (q, d) = raw.split_once(':').ok_or_else(bad)?;
        let q = q.trim().parse().map_err(|_| bad())?;
        let d: f64 = d.trim().parse().map_err(|_| bad())?;
        if !d.is_finite() {
            return Err(bad());
        }
        ops.push((idx, ErrorOp::Rot(q, d)));
    }
    ops.sort_by_key(|(i, _)| *i);
    let spec = ops
        .into_iter()
        .fold(ErrorSpec64::identity(), |s, (_, op)| match op {
            ErrorOp::Flip(q) => s.flip(q),
            ErrorOp::Rot(q, d) => s.rot(q, d),
        });
    spec.validate(n)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(spec)
}

enum ErrorOp {
    Flip(usize),
    Rot(usize, f64),
}

/// Output sink: stdout or `--out FILE`.
fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T, pretty: bool) -> Result<(), CliError> {
    if pretty {
        serde_json::to_writer_pretty(&mut *w, value)?;
    } else {
        serde_json::to_writer(&mut *w, value)?;
    }
    writeln!(w)?;
    Ok(())
}

/// One row of the discrimination table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct TableRow {
    pub state: String,
    pub label: GbsLabel,
    pub ket: String,
    pub parity: Vec<u8>,
    pub phi: u8,
}

fn ket(label: &GbsLabel) -> String {
    let n = label.n();
    format!(
        "(|{:0n$b}⟩ {} |{:0n$b}⟩)/√2",
        label.x(),
        label.sign().as_char(),
        label.x_bar(),
    )
}

/// Discrimination results of every GBS on `n` qubits, read off a simulation
/// of the phase and parity circuits.
pub fn table_rows(n: usize) -> Result<Vec<TableRow>, CliError> {
    let labels = enumerate(n).map_err(|e| CliError::Usage(e.to_string()))?;
    labels
        .iter()
        .enumerate()
        .map(|(k, label)| {
            let mut state = build::<f64>(label);
            let sig = signature_of(&mut state).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(TableRow {
                state: format!("ψ{}", k + 1),
                label: *label,
                ket: ket(label),
                parity: sig.parity,
                phi: sig.phi,
            })
        })
        .collect()
}

fn cmd_table(n: usize, format: Format, w: &mut dyn Write) -> Result<i32, CliError> {
    if !(2..=gbs_qec::statevector::MAX_QUBITS - 1).contains(&n) {
        return Err(CliError::Usage(format!("--n {n} out of range")));
    }
    let rows = table_rows(n)?;
    match format {
        Format::Json => write_json(w, &rows, false)?,
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(["state", "label", "ket", "p", "phi"])?;
            for r in &rows {
                csv.write_record([
                    r.state.as_str(),
                    &r.label.to_string(),
                    &r.ket,
                    &bits(&r.parity),
                    &r.phi.to_string(),
                ])?;
            }
            csv.flush()?;
        }
        Format::Text => {
            let ket_width = rows
                .iter()
                .map(|r| r.ket.chars().count())
                .max()
                .unwrap_or(0);
            let p_head = if n == 2 {
                "p".to_string()
            } else {
                format!("p1..p{}", n - 1)
            };
            let p_width = p_head.len().max(n - 1);
            writeln!(
                w,
                "{:<6} {:<ket_width$}  {:<p_width$}  φ",
                "state", "ket", p_head
            )?;
            for r in &rows {
                let pad = ket_width - r.ket.chars().count();
                writeln!(
                    w,
                    "{:<6} {}{}  {:<p_width$}  {}",
                    r.state,
                    r.ket,
                    " ".repeat(pad),
                    bits(&r.parity),
                    r.phi
                )?;
            }
        }
    }
    Ok(0)
}

fn write_reports(
    reports: &[RunReport],
    format: Format,
    verbose: bool,
    w: &mut dyn Write,
    with_summary: bool,
) -> Result<(), CliError> {
    let summary = SweepSummary::of(reports);
    match format {
        Format::Json if with_summary => write_json(
            w,
            &SweepOutput {
                summary,
                cases: reports.to_vec(),
            },
            false,
        )?,
        Format::Json => write_json(w, &reports[0], false)?,
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            for r in reports {
                csv.serialize(CsvRow::from(r))?;
            }
            csv.flush()?;
        }
        Format::Text => {
            for r in reports.iter().filter(|r| verbose || !r.pass) {
                writeln!(w, "{}", text_line(r))?;
            }
            if with_summary {
                writeln!(
                    w,
                    "total {} passed {} failed {} worst fidelity {:.15}",
                    summary.total, summary.passed, summary.failed, summary.worst_fidelity
                )?;
            }
        }
    }
    Ok(())
}

fn parity(batch: bool) -> ParityStrategy {
    if batch {
        ParityStrategy::Batch
    } else {
        ParityStrategy::Sequential
    }
}

fn cmd_correct(
    args: &CorrectArgs,
    matches: &ArgMatches,
    w: &mut dyn Write,
) -> Result<i32, CliError> {
    let label = parse_label(&args.label)?;
    let errors = error_spec(args, matches, label.n())?;
    if !(args.tolerance >= 0.0 && args.tolerance < 1.0) {
        return Err(CliError::Usage(format!(
            "tolerance {} outside [0, 1)",
            args.tolerance
        )));
    }
    let case = SweepCase {
        label,
        errors,
        rng_seed: args.seed,
    };
    let options = CorrectionOptions {
        mode: args.mode.into(),
        parity: parity(args.batch_parity),
    };
    let report = run_case(&case, options, args.tolerance, true);
    write_reports(std::slice::from_ref(&report), args.format, true, w, false)?;
    Ok(if report.pass { 0 } else { 1 })
}

fn cmd_sweep(args: &SweepArgs, w: &mut dyn Write) -> Result<i32, CliError> {
    let flip_mode = match (args.exhaustive, args.sampled) {
        (true, _) => FlipMode::Exhaustive,
        (false, Some(k)) => FlipMode::Sampled(k),
        (false, None) => {
            return Err(CliError::Usage(
                "one of --exhaustive or --sampled K is required".into(),
            ))
        }
    };
    let config = SweepConfig {
        n_range: parse_range(&args.n)?,
        flip_mode,
        delta_set: args.deltas.clone(),
        mode: args.mode.into(),
        seed: args.seed,
        tolerance: args.tolerance,
        parity: parity(args.batch_parity),
        timing: args.timing,
    };
    let reports = run_sweep(&config)?;
    write_reports(&reports, args.format, args.verbose, w, true)?;
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { 1 })
}

fn cmd_trace(
    label: &str,
    part: Option<u8>,
    step: Option<u8>,
    mode: Mode,
    pretty: bool,
    w: &mut dyn Write,
) -> Result<i32, CliError> {
    let label = parse_label(label)?;
    let mut selection = match part {
        Some(1) => TraceSelection::part1_only(),
        Some(_) => TraceSelection::part2_only(mode),
        None => TraceSelection::all(mode),
    };
    if let Some(s) = step {
        if part == Some(1) {
            return Err(CliError::Usage("--step applies to part 2 only".into()));
        }
        if s == 1 && mode == Mode::Discrete {
            return Err(CliError::Usage("discrete mode has no step 1".into()));
        }
        selection = TraceSelection {
            part1: false,
            ..selection
        }
        .only_step(usize::from(s));
    }
    write_json(w, &trace(&label, selection), pretty)?;
    Ok(0)
}

fn dispatch(cli: &Cli, matches: &ArgMatches) -> Result<i32, CliError> {
    let mut w = sink(&cli.out)?;
    let code = match &cli.command {
        Command::Table { n, format } => cmd_table(*n, *format, &mut *w)?,
        Command::Correct(args) => {
            let sub = matches
                .subcommand_matches("correct")
                .expect("correct subcommand matches");
            cmd_correct(args, sub, &mut *w)?
        }
        Command::Sweep(args) => cmd_sweep(args, &mut *w)?,
        Command::Trace {
            label,
            part,
            step,
            mode,
            pretty,
        } => cmd_trace(label, *part, *step, (*mode).into(), *pretty, &mut *w)?,
    };
    w.flush()?;
    Ok(code)
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli, &matches) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            e.exit_code()
        }
    }
}
