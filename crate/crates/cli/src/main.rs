use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use onebit_limfb::harness::{
    csv, run_experiment, run_oracle_check, ExperimentConfig, Mode, SnrGrid, Split, DEFAULT_SEED,
    DEFAULT_TRIALS,
};

/// Limited-feedback capacity experiments for one-bit ADC receivers.
#[derive(Debug, Parser)]
#[command(name = "limfb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// SISO capacity: perfect CSIT, B-bit phase feedback, no CSIT.
    Siso(Flags),
    /// MISO capacity for each (B1, B2) feedback split.
    Miso(Flags),
    /// MISO capacity loss relative to perfect CSIT.
    Loss(Flags),
    /// Compare closed-form capacities with the exact quantized channel.
    OracleCheck(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// Transmit antennas (1 for siso, default 4 otherwise).
    #[arg(long)]
    nt: Option<usize>,
    /// siso: phase-feedback bits, repeatable (default 1 and 2).
    /// miso/loss with --sweep-splits: total bits B (default nt).
    #[arg(long)]
    bits: Vec<u32>,
    /// Direction/phase split `b1,b2`, repeatable.
    #[arg(long)]
    split: Vec<Split>,
    /// Compare every split of --bits with b1, b2 >= 1.
    #[arg(long)]
    sweep_splits: bool,
    /// SNR grid in dB as start:step:stop.
    #[arg(long, default_value = "-10:1:30", allow_hyphen_values = true)]
    snr: SnrGrid,
    /// Channel realizations per SNR point (random tuples for oracle-check).
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Draw one RVQ codebook per split instead of one per realization.
    #[arg(long)]
    fixed_codebook: bool,
}

fn build_config(mode: Mode, f: &Flags) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(mode);
    cfg.snr = f.snr;
    cfg.trials = f.trials;
    cfg.seed = f.seed;
    cfg.fixed_codebook = f.fixed_codebook;
    if let Some(nt) = f.nt {
        cfg.nt = nt;
    }
    match mode {
        Mode::Siso => {
            if !f.split.is_empty() || f.sweep_splits {
                bail!("--split/--sweep-splits apply to miso and loss only");
            }
            if !f.bits.is_empty() {
                cfg.phase_bits = f.bits.clone();
            }
        }
        Mode::Miso | Mode::Loss => {
            if f.bits.len() > 1 {
                bail!("miso/loss take a single --bits (total feedback bits)");
            }
            let total = f.bits.first().copied().unwrap_or(cfg.nt as u32);
            let mut splits = f.split.clone();
            if f.sweep_splits || splits.is_empty() {
                splits.extend(Split::sweep(total));
            }
            cfg.splits = splits;
        }
        Mode::OracleCheck => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let (mode, flags) = match &cli.command {
        Command::Siso(f) => (Mode::Siso, f),
        Command::Miso(f) => (Mode::Miso, f),
        Command::Loss(f) => (Mode::Loss, f),
        Command::OracleCheck(f) => (Mode::OracleCheck, f),
    };
    let cfg = build_config(mode, flags)?;
    if mode == Mode::OracleCheck {
        let report = run_oracle_check(cfg.seed, cfg.trials)?;
        let mut out = output(&flags.out)?;
        writeln!(out, "{report}")?;
        out.flush()?;
        return Ok(report.passed());
    }
    let rows = run_experiment(&cfg)?;
    csv::write_csv(&rows, output(&flags.out)?)?;
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
