use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sideways_cli::{exit, fuzz, gen, sweep, table, verify, Format, SweepConfig, UsageError, VerifyConfig};
use sideways_core::rvm::DEFAULT_BUDGET;
use sideways_core::theory::faults::Fault;
use sideways_core::theory::FuzzConfig;
use sideways_core::Algorithm;

#[derive(Parser)]
#[command(name = "sideways", version, about = "Popcount programs for a restricted register machine")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Output {
    /// csv or markdown.
    #[arg(long, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exhaustive correctness, step-law and lower-bound checks.
    Verify {
        /// Largest width checked (at most 12).
        #[arg(long, default_value_t = 12)]
        width: u32,
        /// Run under a deliberately broken interpreter.
        #[arg(long)]
        mutant: Option<Fault>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-input step counts for one program.
    Sweep {
        #[arg(long)]
        width: u32,
        #[arg(long)]
        algo: Algorithm,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Sampled inputs when the width is too large to enumerate.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Random-program search for prefix-invariant and divergence violations.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Programs for the invariant check.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Programs for the MSB-flip divergence check.
        #[arg(long, default_value_t = 1000)]
        divergence_count: usize,
        #[arg(long, default_value_t = 4)]
        min_width: u32,
        #[arg(long, default_value_t = 16)]
        max_width: u32,
        #[arg(long, default_value_t = 24)]
        max_len: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        mutant: Option<Fault>,
        #[command(flatten)]
        output: Output,
    },
    /// Print a generated program.
    Gen {
        #[arg(long)]
        algo: Option<Algorithm>,
        #[arg(long)]
        width: u32,
        /// Emit the constant builder for this value instead.
        #[arg(long)]
        constant: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complexity summary with measured operation counts.
    Table {
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Usage(String),
    Io(std::io::Error),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(Failure::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Returns whether every check passed.
fn run(cmd: Cmd) -> Result<bool, Failure> {
    match cmd {
        Cmd::Verify { width, mutant, out } => {
            let r = verify(&VerifyConfig {
                max_width: width,
                fault: mutant,
            })?;
            emit(&r.text(), out.as_ref())?;
            Ok(r.passed())
        }
        Cmd::Sweep {
            width,
            algo,
            seed,
            samples,
            budget,
            output,
        } => {
            let cfg = SweepConfig {
                width,
                algo,
                seed,
                samples,
                budget,
            };
            emit(&sweep(&cfg, output.format)?, output.out.as_ref())?;
            Ok(true)
        }
        Cmd::Fuzz {
            seed,
            count,
            divergence_count,
            min_width,
            max_width,
            max_len,
            budget,
            mutant,
            output,
        } => {
            let cfg = FuzzConfig {
                seed,
                programs: count,
                min_width,
                max_width,
                max_len,
                budget,
                ..FuzzConfig::default()
            };
            let r = fuzz(&cfg, divergence_count, mutant, output.format)?;
            emit(&r.text, output.out.as_ref())?;
            Ok(r.violations == 0)
        }
        Cmd::Gen {
            algo,
            width,
            constant,
            out,
        } => {
            emit(&gen(algo, width, constant)?, out.as_ref())?;
            Ok(true)
        }
        Cmd::Table { output } => {
            emit(&table(output.format), output.out.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::SUCCESS });
        }
    };
    match run(cli.cmd) {
        Ok(true) => ExitCode::from(exit::SUCCESS),
        Ok(false) => ExitCode::from(exit::FAILURE),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(exit::USAGE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::FAILURE)
        }
    }
}
