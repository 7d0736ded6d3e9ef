//! A register machine for the restricted model: increment, decrement,
//! AND, OR, assignment, and zero as the only constant.
//!
//! Programs are written in a small line-oriented assembly (see
//! [`parse_program`]) and run by [`execute`], which counts every executed
//! instruction and, separately, every increment/decrement.

mod exec;
mod parse;

use std::fmt;
use std::sync::Arc;

pub use exec::{
    diff_traces, execute, execute_with, first_divergence, Divergence, ExecError, ExecResult,
    HaltReason, Observer, Recorder, Semantics, SnapshotRef, Standard, StepCounters, TraceSnapshot,
    DEFAULT_BUDGET,
};
pub use parse::{parse_program, ParseError, ParseErrorKind};

/// Index into a program's register table. Register 0 is always `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reg(pub(crate) u16);

impl Reg {
    pub const INPUT: Reg = Reg(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Resolved branch destination (an instruction index; `len` means the end).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Target(pub(crate) usize);

impl Target {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instruction {
    Zero(Reg),
    Mov(Reg, Reg),
    Inc(Reg),
    Dec(Reg),
    And(Reg, Reg),
    Or(Reg, Reg),
    /// Branch if the register is zero.
    Bz(Reg, Target),
    Bnz(Reg, Target),
    Beq(Reg, Reg, Target),
    /// Branch if the first register is (unsigned) less than the second.
    Blt(Reg, Reg, Target),
    Jmp(Target),
    Out(Reg),
}

impl Instruction {
    pub fn mnemonic(&self) -> &'static str {
        match self {
            Instruction::Zero(_) => "ZERO",
            Instruction::Mov(..) => "MOV",
            Instruction::Inc(_) => "INC",
            Instruction::Dec(_) => "DEC",
            Instruction::And(..) => "AND",
            Instruction::Or(..) => "OR",
            Instruction::Bz(..) => "BZ",
            Instruction::Bnz(..) => "BNZ",
            Instruction::Beq(..) => "BEQ",
            Instruction::Blt(..) => "BLT",
            Instruction::Jmp(_) => "JMP",
            Instruction::Out(_) => "OUT",
        }
    }

    pub fn is_incdec(&self) -> bool {
        matches!(self, Instruction::Inc(_) | Instruction::Dec(_))
    }

    pub fn is_branch(&self) -> bool {
        matches!(
            self,
            Instruction::Bz(..)
                | Instruction::Bnz(..)
                | Instruction::Beq(..)
                | Instruction::Blt(..)
                | Instruction::Jmp(_)
        )
    }
}

/// A parsed program with registers and labels resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    instructions: Vec<Instruction>,
    registers: Arc<[String]>,
    /// `(name, instruction index)` in definition order.
    labels: Vec<(String, usize)>,
}

impl Program {
    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Register names indexed by [`Reg`]; entry 0 is `x`.
    pub fn registers(&self) -> &[String] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<Reg> {
        self.registers
            .iter()
            .position(|r| r == name)
            .map(|i| Reg(i as u16))
    }

    pub fn labels(&self) -> &[(String, usize)] {
        &self.labels
    }

    pub fn label_target(&self, name: &str) -> Option<usize> {
        self.labels.iter().find(|(l, _)| l == name).map(|&(_, i)| i)
    }

    fn label_name(&self, index: usize) -> &str {
        self.labels
            .iter()
            .find(|&&(_, i)| i == index)
            .map(|(l, _)| l.as_str())
            .expect("every branch target carries a label")
    }

    fn reg_name(&self, r: Reg) -> &str {
        &self.registers[r.index()]
    }
}

impl AsRef<Program> for Program {
    fn as_ref(&self) -> &Program {
        self
    }
}

impl fmt::Display for Program {
    /// Renders the program in the same text format [`parse_program`] reads.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = |r: Reg| self.reg_name(r);
        let l = |t: Target| self.label_name(t.0);
        for idx in 0..=self.instructions.len() {
            let here: Vec<&str> = self
                .labels
                .iter()
                .filter(|&&(_, i)| i == idx)
                .map(|(name, _)| name.as_str())
                .collect();
            let Some(ins) = self.instructions.get(idx) else {
                for name in here {
                    writeln!(f, "{name}:")?;
                }
                break;
            };
            if let Some((last, rest)) = here.split_last() {
                for name in rest {
                    writeln!(f, "{name}:")?;
                }
                write!(f, "{last}: ")?;
            }
            let m = ins.mnemonic();
            match *ins {
                Instruction::Zero(r) | Instruction::Inc(r) | Instruction::Dec(r) | Instruction::Out(r) => {
                    writeln!(f, "{m} {}", n(r))?
                }
                Instruction::Mov(a, b) | Instruction::And(a, b) | Instruction::Or(a, b) => {
                    writeln!(f, "{m} {} {}", n(a), n(b))?
                }
                Instruction::Bz(r, t) | Instruction::Bnz(r, t) => writeln!(f, "{m} {} {}", n(r), l(t))?,
                Instruction::Beq(a, b, t) | Instruction::Blt(a, b, t) => {
                    writeln!(f, "{m} {} {} {}", n(a), n(b), l(t))?
                }
                Instruction::Jmp(t) => writeln!(f, "{m} {}", l(t))?,
            }
        }
        Ok(())
    }
}
