use rayon::prelude::*;

use super::TheoryError;
use crate::progs::GeneratedProgram;
use crate::rvm::{execute_with, Semantics, Standard};
use crate::word::Word;

/// Instruction budget per input for [`lower_bound_audit`].
pub const AUDIT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// Program halted without OUT.
    NoOutput,
    WrongOutput,
    /// Fewer increments/decrements than `min(nu, n - nu)`.
    BelowBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditFailure {
    pub kind: FailureKind,
    pub input: String,
    pub nu: u32,
    pub output: Option<u64>,
    pub incdec: u64,
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub width: u32,
    pub inputs: u64,
    /// Inputs with `nu != n/2`, where the bound is asserted.
    pub bound_checked: u64,
    /// Smallest `incdec / bound` over inputs with a positive bound, with
    /// the input where it occurs.
    pub tightest_ratio: Option<(f64, String)>,
    pub worst_incdec: u64,
    pub worst_input: String,
    pub failures: Vec<AuditFailure>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exhaustive audit under the standard semantics.
pub fn lower_bound_audit(g: &GeneratedProgram, width: u32) -> Result<AuditReport, TheoryError> {
    lower_bound_audit_with(g, width, &Standard, AUDIT_BUDGET)
}

/// Runs `g` on all `2^n` inputs: every output must equal the popcount, and
/// every input with `nu != n/2` must cost at least `min(nu, n - nu)`
/// increments/decrements. A run that exhausts `budget` counts as giving
/// no output.
pub fn lower_bound_audit_with<S>(
    g: &GeneratedProgram,
    width: u32,
    semantics: &S,
    budget: u64,
) -> Result<AuditReport, TheoryError>
where
    S: Semantics<u64> + ?Sized,
{
    if !(2..=12).contains(&width) {
        return Err(TheoryError::AuditWidth(width));
    }
    if g.width() != width {
        return Err(TheoryError::WidthMismatch {
            program: g.width(),
            requested: width,
        });
    }

    struct Row {
        input: Word,
        nu: u32,
        output: Option<u64>,
        incdec: u64,
    }

    let rows: Vec<Row> = (0..1u64 << width)
        .into_par_iter()
        .map(|v| -> Result<Row, TheoryError> {
            let input = Word::new(width, v).expect("v < 2^width");
            let r = execute_with(g.program(), input, budget, semantics, &mut ())?;
            Ok(Row {
                input,
                nu: input.popcount_naive(),
                output: r.output.map(|w| w.to_u64()),
                incdec: r.counters.incdec_steps,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut report = AuditReport {
        width,
        inputs: rows.len() as u64,
        bound_checked: 0,
        tightest_ratio: None,
        worst_incdec: 0,
        worst_input: String::new(),
        failures: Vec::new(),
    };
    for row in rows {
        let bound = u64::from(row.nu.min(width - row.nu));
        let fail = |kind| AuditFailure {
            kind,
            input: row.input.to_bits(),
            nu: row.nu,
            output: row.output,
            incdec: row.incdec,
            bound,
        };
        match row.output {
            None => report.failures.push(fail(FailureKind::NoOutput)),
            Some(o) if o != u64::from(row.nu) => report.failures.push(fail(FailureKind::WrongOutput)),
            Some(_) => {}
        }
        if row.incdec > report.worst_incdec || report.worst_input.is_empty() {
            report.worst_incdec = row.incdec;
            report.worst_input = row.input.to_bits();
        }
        if 2 * row.nu == width {
            continue;
        }
        report.bound_checked += 1;
        if row.incdec < bound {
            report.failures.push(fail(FailureKind::BelowBound));
        }
        if bound > 0 {
            let ratio = row.incdec as f64 / bound as f64;
            if report.tightest_ratio.as_ref().is_none_or(|(best, _)| ratio < *best) {
                report.tightest_ratio = Some((ratio, row.input.to_bits()));
            }
        }
    }
    Ok(report)
}
