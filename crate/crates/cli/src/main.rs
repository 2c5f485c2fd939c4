//! `genfreq` command-line tool: generate waveforms, estimate frequency traces
//! and compare them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "genfreq", version, about = "Generalized frequency of multi-phase voltage waveforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a sampled test waveform as CSV
    Generate(GenerateArgs),
    /// Estimate the frequency trace of a waveform CSV
    Estimate(EstimateArgs),
    /// Compare two trace CSVs over a time window
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    /// Single-phase rotating pair in quadrature
    Example1,
    /// Balanced three-phase
    Example2,
    /// Damped dq transient, written in the stationary frame
    Example3,
    /// One-channel dc, optionally exponential
    Dc,
    /// Three-phase with a temporary unbalanced sag
    Fault,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Geo,
    Pll,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Central,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Placement {
    Output,
    Input,
    Both,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct GenerateArgs {
    pub scenario: Scenario,
    /// Output file (stdout if omitted)
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// `key = value` config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Amplitude, V
    #[arg(long)]
    pub v: Option<f64>,
    /// Nominal frequency, Hz
    #[arg(long)]
    pub f: Option<f64>,
    /// Phase offset of example1, rad
    #[arg(long)]
    pub phi: Option<f64>,
    /// Sample rate, Hz (20 kHz for fault, 10 kHz otherwise)
    #[arg(long)]
    pub fs: Option<f64>,
    /// Duration, s
    #[arg(long)]
    pub dur: Option<f64>,
    /// Start time, s
    #[arg(long)]
    pub t0: Option<f64>,
    /// Standard deviation of additive Gaussian noise, V
    #[arg(long)]
    pub noise: Option<f64>,
    /// Noise seed (defaults to $GENFREQ_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exponential rate of the dc scenario, 1/s
    #[arg(long)]
    pub decay: Option<f64>,
    /// Relative sag of phases b and c during the fault
    #[arg(long)]
    pub sag: Option<f64>,
    /// Fault inception time, s
    #[arg(long)]
    pub tfault: Option<f64>,
    /// Fault clearing time, s
    #[arg(long)]
    pub tclear: Option<f64>,
    /// Phase jump of phase b during the fault, rad
    #[arg(long)]
    pub jump: Option<f64>,
    /// Relative third-harmonic amplitude during the fault
    #[arg(long)]
    pub harmonic: Option<f64>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct EstimateArgs {
    /// Waveform CSV
    pub input: PathBuf,
    #[arg(short, long, value_enum)]
    pub method: Option<Method>,
    /// Output trace file (stdout if omitted)
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Low-pass time constant, s (0 disables filtering)
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
    /// Where the low-pass filter is applied
    #[arg(long, value_enum)]
    pub placement: Option<Placement>,
    /// Absolute |v| mask threshold, V
    #[arg(long)]
    pub mask: Option<f64>,
    /// PLL proportional gain
    #[arg(long)]
    pub kp: Option<f64>,
    /// PLL integral gain
    #[arg(long)]
    pub ki: Option<f64>,
    /// PLL free-running frequency, Hz
    #[arg(long)]
    pub f_init: Option<f64>,
    /// Also write the voltage curve coordinates to this CSV
    #[arg(long, value_name = "PATH")]
    pub emit_curve: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct CompareArgs {
    pub trace_a: PathBuf,
    pub trace_b: PathBuf,
    /// Time window `start,end`, s (defaults to the span of the first trace)
    #[arg(long)]
    pub window: Option<String>,
    /// Machine-readable CSV report
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Estimate(a) => commands::estimate(&a),
        Command::Compare(a) => commands::compare(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("genfreq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
