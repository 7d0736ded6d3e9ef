//! Counting programs for the restricted machine, each shipped with an
//! exact formula for the number of increments/decrements it performs.
//!
//! The generators emit assembly text and parse it back, so what
//! [`GeneratedProgram::text`] prints is exactly what runs.

pub mod reference;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rvm::{parse_program, Program};
use crate::word::MAX_WIDTH;

pub use reference::{
    broadword_popcount, broadword_popcount_counted, hakmem_popcount, HAKMEM_OPS,
};

/// Upper bound on `total_steps / log2(target + 2)` for [`constant_program`].
///
/// The program is three instructions per generated power-of-two step
/// (`k_max + popcount(target)` of them, at most `2·log2(target) + 1`) plus
/// the final OUT, so `6·log2(t) + 4` instructions, which is below
/// `8·log2(t + 2)` for every `t ≥ 1`. Target 0 takes two instructions.
pub const CONSTANT_STEP_FACTOR: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("width {0} is outside 1..={MAX_WIDTH}")]
    Width(u32),
    #[error("target {target} does not fit in {width} bits")]
    TargetTooWide { target: u64, width: u32 },
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
}

/// Counting algorithms available as restricted-machine programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Clear the lowest one until nothing is left.
    Wegner,
    /// Fill the lowest zero until the word is all ones, counting down from n.
    Dense,
    /// Wegner and dense interleaved; the first to finish answers.
    Combined,
    /// The two-bit special case with a single decrement.
    TwoBit,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Wegner,
        Algorithm::Dense,
        Algorithm::Combined,
        Algorithm::TwoBit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Wegner => "wegner",
            Algorithm::Dense => "dense",
            Algorithm::Combined => "combined",
            Algorithm::TwoBit => "twobit",
        }
    }

    /// Generates the program for `width`. TwoBit ignores the width argument
    /// only if it equals 2.
    pub fn generate(self, width: u32) -> Result<GeneratedProgram, GenError> {
        match self {
            Algorithm::Wegner => wegner_program(width),
            Algorithm::Dense => dense_program(width),
            Algorithm::Combined => combined_program(width),
            Algorithm::TwoBit if width == 2 => Ok(twobit_program()),
            Algorithm::TwoBit => Err(GenError::Width(width)),
        }
    }

    pub fn supports_width(self, width: u32) -> bool {
        match self {
            Algorithm::TwoBit => width == 2,
            _ => (1..=MAX_WIDTH).contains(&width),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| GenError::UnknownAlgorithm(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProgramKind {
    Counter(Algorithm),
    Constant { target: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedProgram {
    kind: ProgramKind,
    width: u32,
    program: Program,
    description: String,
}

impl GeneratedProgram {
    pub fn kind(&self) -> ProgramKind {
        self.kind
    }

    pub fn algorithm(&self) -> Option<Algorithm> {
        match self.kind {
            ProgramKind::Counter(a) => Some(a),
            ProgramKind::Constant { .. } => None,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    #[cfg(test)]
    pub(crate) fn from_parts_for_tests(kind: ProgramKind, width: u32, program: Program) -> Self {
        GeneratedProgram {
            kind,
            width,
            program,
            description: String::new(),
        }
    }

    pub fn text(&self) -> String {
        self.program.to_string()
    }

    /// Exact INC/DEC count on any input of this program's width having
    /// `nu` ones.
    pub fn predicted_incdec(&self, nu: u32) -> u64 {
        let n = self.width;
        match self.kind {
            ProgramKind::Counter(Algorithm::Wegner) => wegner_incdec(nu),
            ProgramKind::Counter(Algorithm::Dense) => dense_incdec(n, nu),
            ProgramKind::Counter(Algorithm::Combined) => combined_incdec(n, nu),
            ProgramKind::Counter(Algorithm::TwoBit) => u64::from(nu != 0),
            ProgramKind::Constant { target } => constant_incdec(target),
        }
    }
}

impl AsRef<Program> for GeneratedProgram {
    fn as_ref(&self) -> &Program {
        &self.program
    }
}

/// INC/DEC count of [`wegner_program`]: one DEC and one INC per one bit.
pub fn wegner_incdec(nu: u32) -> u64 {
    2 * u64::from(nu)
}

/// INCs spent by the constant construction for `target`:
/// `k_max + popcount(target)` where `k_max` is the top set bit, 0 for 0.
pub fn constant_incdec(target: u64) -> u64 {
    if target == 0 {
        return 0;
    }
    u64::from(63 - target.leading_zeros()) + u64::from(target.count_ones())
}

/// INC/DEC count of [`dense_program`]: constant setup, two per zero bit,
/// and the final test that finds `x + 1 = 0`.
pub fn dense_incdec(n: u32, nu: u32) -> u64 {
    constant_incdec(u64::from(n)) + 2 * u64::from(n - nu) + 1
}

/// Exact INC/DEC count of [`combined_program`].
///
/// Round `r` runs one Wegner iteration, then dense work worth two
/// increments/decrements: two constant-setup chunks while the setup lasts
/// (the last setup round may hold one), afterwards one dense iteration.
/// Wegner stops at the test opening round `nu + 1`; the dense side stops
/// inside round `ceil(G/2) + (n - nu) + 1`.
pub fn combined_incdec(n: u32, nu: u32) -> u64 {
    let setup = constant_incdec(u64::from(n));
    let setup_rounds = setup.div_ceil(2);
    let ones = u64::from(nu);
    let dense_finish_round = setup_rounds + u64::from(n - nu) + 1;
    if ones < dense_finish_round {
        let dense_spent = if ones <= setup_rounds {
            (2 * ones).min(setup)
        } else {
            setup + 2 * (ones - setup_rounds)
        };
        wegner_incdec(nu) + dense_spent
    } else {
        2 * dense_finish_round + dense_incdec(n, nu)
    }
}

/// Worst-case envelope for the combined method: at most twice the cheaper
/// side, plus two.
pub fn combined_incdec_bound(n: u32, nu: u32) -> u64 {
    2 * wegner_incdec(nu).min(dense_incdec(n, nu)) + 2
}

fn check_width(width: u32) -> Result<(), GenError> {
    if (1..=MAX_WIDTH).contains(&width) {
        Ok(())
    } else {
        Err(GenError::Width(width))
    }
}

#[derive(Default)]
struct Asm {
    text: String,
}

impl Asm {
    fn op(&mut self, line: impl AsRef<str>) {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }

    fn labeled(&mut self, label: &str, line: impl AsRef<str>) {
        self.op(format!("{label}: {}", line.as_ref()));
    }

    fn finish(self, kind: ProgramKind, width: u32, description: impl Into<String>) -> GeneratedProgram {
        let program = parse_program(&self.text).expect("generated text is well formed");
        GeneratedProgram {
            kind,
            width,
            program,
            description: description.into(),
        }
    }
}

/// Registers used by the constant construction.
struct ConstRegs<'a> {
    dest: &'a str,
    /// Holds `2^i - 1`.
    mask: &'a str,
    /// Scratch for `mask + 1` in the doubling step.
    step: &'a str,
    /// Scratch for `mask + 1` when a bit is selected.
    pick: &'a str,
}

/// The constant construction as chunks of three instructions, each with
/// exactly one INC.
///
/// Starting from `mask = 0`, for every bit position `i` up to the top set
/// bit: if bit `i` of `target` is set, OR `mask + 1 = 2^i` into `dest`;
/// then, below the top bit, extend `mask` to `2^(i+1) - 1` by
/// `mask OR (mask + 1)`.
fn constant_chunks(target: u64, r: &ConstRegs<'_>) -> Vec<[String; 3]> {
    let mut chunks = Vec::new();
    if target == 0 {
        return chunks;
    }
    let top = 63 - target.leading_zeros();
    for i in 0..=top {
        if (target >> i) & 1 == 1 {
            chunks.push([
                format!("MOV {} {}", r.pick, r.mask),
                format!("INC {}", r.pick),
                format!("OR {} {}", r.dest, r.pick),
            ]);
        }
        if i < top {
            chunks.push([
                format!("MOV {} {}", r.step, r.mask),
                format!("INC {}", r.step),
                format!("OR {} {}", r.mask, r.step),
            ]);
        }
    }
    chunks
}

/// Wegner's method: `x ← x AND (x − 1)` deletes the lowest one; count
/// the rounds until `x = 0`.
pub fn wegner_program(width: u32) -> Result<GeneratedProgram, GenError> {
    check_width(width)?;
    let mut asm = Asm::default();
    asm.labeled("loop", "BZ x done");
    asm.op("MOV t x");
    asm.op("DEC t");
    asm.op("AND x t");
    asm.op("INC c");
    asm.op("JMP loop");
    asm.labeled("done", "OUT c");
    Ok(asm.finish(
        ProgramKind::Counter(Algorithm::Wegner),
        width,
        "clear the lowest one bit per iteration; 2·nu increments/decrements",
    ))
}

/// Builds `target` in register `n` from zero using only MOV, INC and OR,
/// then outputs it.
pub fn constant_program(target: u64, width: u32) -> Result<GeneratedProgram, GenError> {
    check_width(width)?;
    if width < 64 && target >> width != 0 {
        return Err(GenError::TargetTooWide { target, width });
    }
    let mut asm = Asm::default();
    if target == 0 {
        asm.op("ZERO n");
    }
    let regs = ConstRegs {
        dest: "n",
        mask: "t",
        step: "u",
        pick: "s",
    };
    for chunk in constant_chunks(target, &regs) {
        chunk.iter().for_each(|l| asm.op(l));
    }
    asm.op("OUT n");
    Ok(asm.finish(
        ProgramKind::Constant { target },
        width,
        format!("constant {target} from zero with INC and OR"),
    ))
}

/// The dense method: load `b = n`, then while `x + 1 ≠ 0` set the lowest
/// zero of `x` (`x ← x OR (x + 1)`) and decrement `b`.
pub fn dense_program(width: u32) -> Result<GeneratedProgram, GenError> {
    check_width(width)?;
    let mut asm = Asm::default();
    let regs = ConstRegs {
        dest: "b",
        mask: "t",
        step: "u",
        pick: "s",
    };
    for chunk in constant_chunks(u64::from(width), &regs) {
        chunk.iter().for_each(|l| asm.op(l));
    }
    asm.labeled("loop", "MOV y x");
    asm.op("INC y");
    asm.op("BZ y done");
    asm.op("OR x y");
    asm.op("DEC b");
    asm.op("JMP loop");
    asm.labeled("done", "OUT b");
    Ok(asm.finish(
        ProgramKind::Counter(Algorithm::Dense),
        width,
        "count down from n over the zero bits; gen(n) + 2·(n - nu) + 1 increments/decrements",
    ))
}

/// Wegner's method and the dense method in lockstep on separate copies of
/// the input, one loop iteration each per round. The dense side first
/// spends its rounds building `n`, two setup chunks per round.
pub fn combined_program(width: u32) -> Result<GeneratedProgram, GenError> {
    check_width(width)?;
    let mut asm = Asm::default();
    let regs = ConstRegs {
        dest: "b",
        mask: "gt",
        step: "gu",
        pick: "gs",
    };
    let wegner_round = |asm: &mut Asm, label: Option<&str>| {
        match label {
            Some(l) => asm.labeled(l, "BZ xw wdone"),
            None => asm.op("BZ xw wdone"),
        }
        asm.op("MOV tw xw");
        asm.op("DEC tw");
        asm.op("AND xw tw");
        asm.op("INC cw");
    };

    asm.op("MOV xw x");
    asm.op("MOV xd x");
    for pair in constant_chunks(u64::from(width), &regs).chunks(2) {
        wegner_round(&mut asm, None);
        pair.iter().flatten().for_each(|l| asm.op(l));
    }
    wegner_round(&mut asm, Some("loop"));
    asm.op("MOV yd xd");
    asm.op("INC yd");
    asm.op("BZ yd ddone");
    asm.op("OR xd yd");
    asm.op("DEC b");
    asm.op("JMP loop");
    asm.labeled("wdone", "OUT cw");
    asm.labeled("ddone", "OUT b");
    Ok(asm.finish(
        ProgramKind::Counter(Algorithm::Combined),
        width,
        "Wegner and dense interleaved per iteration; first to finish answers",
    ))
}

/// Two-bit counter: `x = 0` answers itself; otherwise `y = x − 1` is the
/// answer unless it is zero, in which case `x` is.
pub fn twobit_program() -> GeneratedProgram {
    let mut asm = Asm::default();
    asm.op("BZ x retx");
    asm.op("MOV y x");
    asm.op("DEC y");
    asm.op("BZ y retx");
    asm.op("OUT y");
    asm.labeled("retx", "OUT x");
    asm.finish(
        ProgramKind::Counter(Algorithm::TwoBit),
        2,
        "two-bit count with one decrement for nonzero inputs",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rvm::execute;
    use crate::word::Word;

    fn run(g: &GeneratedProgram, bits: &str) -> (u64, u64) {
        let x: Word = bits.parse().unwrap();
        let r = execute(g.program(), x, 1_000_000, false).unwrap();
        (r.output.expect("program answers").to_u64(), r.counters.incdec_steps)
    }

    /// The constant construction replayed on plain integers, following the
    /// recurrence `t_{i+1} = t_i OR (t_i + 1)` and counting each `+ 1`.
    fn constant_by_recurrence(target: u64) -> (u64, u64) {
        let (mut t, mut acc, mut incs) = (0u64, 0u64, 0u64);
        let mut i = 0;
        while target >> i != 0 {
            if (target >> i) & 1 == 1 {
                acc |= t + 1;
                incs += 1;
            }
            if target >> (i + 1) != 0 {
                t |= t + 1;
                incs += 1;
            }
            i += 1;
        }
        (acc, incs)
    }

    #[test]
    fn wegner_examples() {
        let g = wegner_program(4).unwrap();
        assert_eq!(g.program().len(), 7);
        assert_eq!(run(&g, "1011"), (3, 6));
        assert_eq!(run(&g, "0000"), (0, 0));
        let g12 = wegner_program(12).unwrap();
        assert_eq!(run(&g12, "111111111111"), (12, 24));
        assert_eq!(g12.predicted_incdec(12), 24);
    }

    #[test]
    fn constant_examples() {
        let g = constant_program(6, 3).unwrap();
        assert_eq!(run(&g, "000"), (6, 4));
        assert_eq!(constant_by_recurrence(6), (6, 4));
        let g = constant_program(0, 4).unwrap();
        assert_eq!(run(&g, "0000"), (0, 0));
        for k in 0..16u32 {
            let g = constant_program(1 << k, 17).unwrap();
            let (v, incs) = run(&g, &"0".repeat(17));
            assert_eq!((v, incs), (1 << k, u64::from(k) + 1));
        }
        assert!(constant_program(16, 4).is_err());
        assert!(constant_program(u64::MAX, 64).is_ok());
    }

    #[test]
    fn constant_law_matches_recurrence() {
        for target in 0..=4096u64 {
            assert_eq!(constant_incdec(target), constant_by_recurrence(target).1);
        }
    }

    #[test]
    fn dense_examples() {
        let g = dense_program(4).unwrap();
        assert_eq!(constant_incdec(4), 3);
        assert_eq!(run(&g, "1101"), (3, 6));
        assert_eq!(run(&g, "1111"), (4, 4));
        assert_eq!(run(&g, "0000"), (0, 12));
        assert_eq!(g.predicted_incdec(0), 12);
    }

    #[test]
    fn combined_examples() {
        let g = combined_program(12).unwrap();
        let (out, incdec) = run(&g, "000000100000");
        assert_eq!(out, 1);
        assert_eq!(incdec, 4);
        assert!(incdec <= combined_incdec_bound(12, 1));
        let (out, incdec) = run(&g, "111111111111");
        assert_eq!(out, 12);
        // Three setup rounds (2+2+1), then the dense side stops in round 4.
        assert_eq!(incdec, 2 * 4 + dense_incdec(12, 12));
        assert_eq!(incdec, combined_incdec_bound(12, 12));
        let g2 = combined_program(2).unwrap();
        for bits in ["00", "01", "10", "11"] {
            let nu = bits.matches('1').count() as u64;
            assert_eq!(run(&g2, bits).0, nu);
        }
    }

    #[test]
    fn twobit_examples() {
        let g = twobit_program();
        assert_eq!(run(&g, "00"), (0, 0));
        assert_eq!(run(&g, "01"), (1, 1));
        assert_eq!(run(&g, "10"), (1, 1));
        assert_eq!(run(&g, "11"), (2, 1));
    }

    #[test]
    fn text_roundtrip() {
        for a in Algorithm::ALL {
            for width in [2u32, 5, 12, 64] {
                let Ok(g) = a.generate(width) else { continue };
                let reparsed = parse_program(&g.text()).unwrap();
                assert_eq!(&reparsed, g.program(), "{a} width {width}");
            }
        }
    }

    #[test]
    fn algorithm_names() {
        assert_eq!("Dense".parse::<Algorithm>().unwrap(), Algorithm::Dense);
        assert!("pal".parse::<Algorithm>().is_err());
        assert!(Algorithm::TwoBit.generate(3).is_err());
        assert!(wegner_program(0).is_err());
        assert!(dense_program(65).is_err());
    }
}
