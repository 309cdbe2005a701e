//! `dopgolay` command-line driver.
//!
//! Exit codes: 0 success, 1 a check or criterion failed, 2 usage or input error.
//! Doppler shifts are in radians per PRI. For a target closing at speed `V`
//! on carrier `f0` with pulse repetition interval `T`, `θ = 2π f0 (2V/c) T`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dopgolay_core::trains::{Loaded, TrainDocument};

pub mod acceptance;
pub mod commands;
pub mod manifest;
pub mod seed;

#[derive(Debug, Parser)]
#[command(
    name = "dopgolay",
    version,
    about = "Doppler-resilient Golay pulse trains: generate, verify, evaluate, simulate",
    after_help = "Doppler shifts are radians per PRI: θ = 2π·f0·(2V/c)·PRI for carrier f0 and closing speed V."
)]
pub struct Cli {
    /// Directory for output files and run manifests.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Seed: a seed-pair source for `generate` (`builtin8` or a JSON file),
    /// a 64-bit RNG seed for `simulate` and `accept`.
    #[arg(long, global = true)]
    pub seed: Option<String>,

    /// Output format for tables and reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a pulse train or Alamouti waveform matrix and write it as JSON.
    Generate(commands::generate::Args),
    /// Run the structural checks on a train file.
    Verify(commands::verify::Args),
    /// Evaluate an ambiguity function over Doppler shifts.
    Ambiguity(commands::ambiguity::Args),
    /// Peak-sidelobe suppression of one waveform relative to another.
    Compare(commands::compare::Args),
    /// Simulate point-target returns from a scenario file.
    Simulate(commands::simulate::Args),
    /// Run the acceptance criteria and write a pass/fail report.
    Accept(commands::accept::Args),
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn exit_code(self) -> ExitCode {
        match self {
            Outcome::Pass => ExitCode::SUCCESS,
            Outcome::Fail => ExitCode::from(1),
        }
    }
}

pub const USAGE_ERROR: u8 = 2;

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Generate(args) => commands::generate::run(cli, args),
        Command::Verify(args) => commands::verify::run(cli, args),
        Command::Ambiguity(args) => commands::ambiguity::run(cli, args),
        Command::Compare(args) => commands::compare::run(cli, args),
        Command::Simulate(args) => commands::simulate::run(cli, args),
        Command::Accept(args) => commands::accept::run(cli, args),
    }
}

pub fn run(cli: &Cli) -> ExitCode {
    match execute(cli) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}

/// Reads and parses a train document without validating its contents.
pub fn read_document(path: &Path) -> Result<(TrainDocument, Vec<u8>)> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let doc = serde_json::from_slice(&bytes).with_context(|| format!("cannot parse train file {}", path.display()))?;
    Ok((doc, bytes))
}

/// Reads, parses and validates a train document.
pub fn load_waveform(path: &Path) -> Result<(Loaded, Vec<u8>)> {
    let (doc, bytes) = read_document(path)?;
    let loaded = doc
        .load()
        .with_context(|| format!("invalid train file {}", path.display()))?;
    Ok((loaded, bytes))
}

pub fn rng_seed(cli: &Cli) -> Result<Option<u64>> {
    cli.seed
        .as_deref()
        .map(|s| {
            s.parse::<u64>()
                .with_context(|| format!("--seed must be a 64-bit unsigned integer here, got {s:?}"))
        })
        .transpose()
}

pub fn to_json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text.into_bytes())
}
