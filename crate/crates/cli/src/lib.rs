//! Subcommand implementations behind the `sideways` binary. Each command
//! renders its report to a `String`; the binary decides where it goes.

pub mod sweep;
pub mod table;
pub mod verify;

use std::fmt;
use std::str::FromStr;

use sideways_core::progs::GenError;
use sideways_core::theory::faults::Fault;
use sideways_core::theory::{fuzz_divergence, fuzz_invariant_with, FuzzConfig};
use sideways_core::{progs, Algorithm};

pub use sweep::{sweep, SweepConfig, SweepRow, CSV_HEADER, EXHAUSTIVE_LIMIT};
pub use table::table;
pub use verify::{verify, VerifyConfig, VerifyReport};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(format!("unknown format {s:?} (csv | markdown)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Markdown => "markdown",
        })
    }
}

/// Parameter problem detected before anything runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl From<GenError> for UsageError {
    fn from(e: GenError) -> Self {
        UsageError(e.to_string())
    }
}

/// Program text for `algo` at `width`, or the constant builder for `target`.
pub fn gen(algo: Option<Algorithm>, width: u32, constant: Option<u64>) -> Result<String, UsageError> {
    let g = match (algo, constant) {
        (Some(a), None) => a.generate(width)?,
        (None, Some(t)) => progs::constant_program(t, width)?,
        _ => return Err(UsageError("give exactly one of --algo or --constant".into())),
    };
    Ok(g.text())
}

#[derive(Debug, Clone)]
pub struct FuzzOutcome {
    pub text: String,
    pub violations: u64,
}

/// Prefix-invariant fuzzing over `cfg.programs` programs plus MSB-flip
/// divergence fuzzing over `divergence_programs` more.
pub fn fuzz(
    cfg: &FuzzConfig,
    divergence_programs: usize,
    fault: Option<Fault>,
    format: Format,
) -> Result<FuzzOutcome, UsageError> {
    if cfg.min_width == 0 || cfg.min_width > cfg.max_width || cfg.max_width > 64 {
        return Err(UsageError(format!(
            "width range {}..={} must lie within 1..=64",
            cfg.min_width, cfg.max_width
        )));
    }
    if cfg.budget == 0 || cfg.max_len == 0 {
        return Err(UsageError("budget and max length must be positive".into()));
    }
    let inv = match fault {
        None => fuzz_invariant_with(cfg, &sideways_core::rvm::Standard),
        Some(f) => fuzz_invariant_with(cfg, f.semantics::<u64>()),
    };
    let div = fuzz_divergence(&FuzzConfig {
        programs: divergence_programs,
        ..cfg.clone()
    });
    let violations = inv.violations + div.violations;

    let mut text = String::new();
    match format {
        Format::Csv => {
            text.push_str("seed,programs,runs,halted,fell_off_end,budget_exhausted,vacuous_cutoffs,snapshots_checked,prefix_violations,divergence_pairs,divergence_violations\n");
            text.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                cfg.seed,
                inv.programs,
                inv.runs,
                inv.halted,
                inv.fell_off_end,
                inv.budget_exhausted,
                inv.vacuous_cutoffs,
                inv.snapshots_checked,
                inv.violations,
                div.pairs,
                div.violations
            ));
        }
        Format::Markdown => {
            text.push_str(&format!(
                "# fuzz seed={} fault={}\n\n",
                cfg.seed,
                fault.map_or("none".to_owned(), |f| f.to_string())
            ));
            text.push_str("| metric | value |\n|---|---|\n");
            for (k, v) in [
                ("programs", inv.programs as u64),
                ("runs", inv.runs),
                ("halted (OUT)", inv.halted),
                ("fell off end", inv.fell_off_end),
                ("budget exhausted", inv.budget_exhausted),
                ("stopped once i > m", inv.vacuous_cutoffs),
                ("snapshots checked", inv.snapshots_checked),
                ("prefix violations", inv.violations),
                ("divergence pairs", div.pairs),
                ("early divergences", div.violations),
            ] {
                text.push_str(&format!("| {k} | {v} |\n"));
            }
            for w in &inv.witnesses {
                text.push_str(&format!(
                    "\nprefix violation: program #{} input {} i={} register {} prefix {} allowed {:?}\n```\n{}```\n",
                    w.program_index,
                    w.input,
                    w.violation.incdec_index,
                    w.violation.register,
                    w.violation.prefix,
                    w.violation.allowed,
                    w.program
                ));
            }
            for w in &div.witnesses {
                text.push_str(&format!(
                    "\nearly divergence: program #{} input {} at i={} < {}\n```\n{}```\n",
                    w.program_index, w.input, w.divergence.incdec_index, w.bound, w.program
                ));
            }
        }
    }
    Ok(FuzzOutcome { text, violations })
}
