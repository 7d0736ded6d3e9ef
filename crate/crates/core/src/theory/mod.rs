//! Executable lower-bound machinery: adversary inputs of the form
//! `e(01)^m d^(n-2m-1)`, the prefix invariant those inputs force on every
//! variable, random-program fuzzing of that invariant, the MSB-flip
//! divergence probe, and exhaustive audits of shipped counters.

mod audit;
pub mod faults;
mod fuzz;
mod invariant;
mod probe;

use thiserror::Error;

use crate::rvm::ExecError;
use crate::word::{check_width, render_bits, Scalar, Word, WordError};

pub use audit::{
    lower_bound_audit, lower_bound_audit_with, AuditFailure, AuditReport, FailureKind, AUDIT_BUDGET,
};
pub use fuzz::{
    fuzz_divergence, fuzz_invariant, fuzz_invariant_with, random_program, DivergenceReport, DivergenceWitness,
    FuzzConfig, FuzzReport, FuzzWitness,
};
pub use invariant::{check_prefix_invariant, PrefixChecker, Violation, ViolationReport};
pub use probe::{msb_flip_probe, ProbeResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("adversary parameters need 0 <= m < n/2, got m={m}, n={n}")]
    BadAdversary { m: u32, n: u32 },
    #[error("MSB-flip probe needs e = d (inputs 1(01)^m 1^* or 0(01)^m 0^*)")]
    NotTheoremFamily,
    #[error("input has exactly n/2 ones; the bound does not apply")]
    Balanced,
    #[error("exhaustive audit supports widths 2..=12, got {0}")]
    AuditWidth(u32),
    #[error("program was generated for width {program}, audit asked for {requested}")]
    WidthMismatch { program: u32, requested: u32 },
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Describes the input `e (01)^m d^(n-2m-1)`, written MSB first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdversaryParams {
    e: bool,
    m: u32,
    d: bool,
    n: u32,
}

impl AdversaryParams {
    pub fn new(e: bool, m: u32, d: bool, n: u32) -> Result<Self, TheoryError> {
        check_width::<u64>(n)?;
        if 2 * m >= n {
            return Err(TheoryError::BadAdversary { m, n });
        }
        Ok(AdversaryParams { e, m, d, n })
    }

    pub fn e(&self) -> bool {
        self.e
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn d(&self) -> bool {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Length of the `d` tail.
    pub fn tail(&self) -> u32 {
        self.n - 2 * self.m - 1
    }

    /// Number of ones in the encoded word.
    pub fn nu(&self) -> u32 {
        self.m + u32::from(self.e) + u32::from(self.d) * self.tail()
    }

    /// The families used by the MSB-flip argument have `e = d`.
    pub fn is_theorem_family(&self) -> bool {
        self.e == self.d
    }

    pub fn schedule(&self) -> KSchedule {
        KSchedule { n: self.n, m: self.m }
    }

    pub fn to_bits(self) -> String {
        let bit = |b: bool| if b { '1' } else { '0' };
        let mut s = String::with_capacity(self.n as usize);
        s.push(bit(self.e));
        for _ in 0..self.m {
            s.push_str("01");
        }
        s.extend(std::iter::repeat_n(bit(self.d), self.tail() as usize));
        s
    }

    fn to_u64(self) -> u64 {
        let mut v = u64::from(self.e);
        for _ in 0..self.m {
            v = (v << 2) | 0b01;
        }
        for _ in 0..self.tail() {
            v = (v << 1) | u64::from(self.d);
        }
        v
    }
}

/// Builds the adversary word for `p`.
pub fn adversary_input<T: Scalar>(p: &AdversaryParams) -> Result<Word<T>, TheoryError> {
    Ok(Word::from_u64(p.n, p.to_u64())?)
}

/// Prefix lengths `k_0 = n`, `k_i = 2(m - i) + 1` for `1 <= i <= m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KSchedule {
    pub n: u32,
    pub m: u32,
}

impl KSchedule {
    /// `None` once `i > m`, where the invariant no longer says anything.
    pub fn k(&self, i: u64) -> Option<u32> {
        match i {
            0 => Some(self.n),
            i if i <= u64::from(self.m) => Some(2 * (self.m - i as u32) + 1),
            _ => None,
        }
    }
}

/// `k_value(schedule, i)` as a free function.
pub fn k_value(s: &KSchedule, i: u64) -> Option<u32> {
    s.k(i)
}

pub(crate) fn prefix_bits(bits: u64, k: u32) -> String {
    render_bits(bits, k)
}
