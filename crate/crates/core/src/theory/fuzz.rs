use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::invariant::{PrefixChecker, Violation};
use super::{adversary_input, AdversaryParams};
use crate::rvm::{
    execute_with, first_divergence, parse_program, Divergence, HaltReason, Program, Semantics,
    SnapshotRef, Standard, DEFAULT_BUDGET,
};
use crate::word::Word;

const KEPT_WITNESSES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub programs: usize,
    pub min_width: u32,
    pub max_width: u32,
    /// Longest generated program, in instructions.
    pub max_len: usize,
    pub budget: u64,
    pub inputs_per_program: usize,
    /// Registers available to generated programs, `x` included (at most 8).
    pub registers: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 1,
            programs: 1000,
            min_width: 4,
            max_width: 16,
            max_len: 24,
            budget: DEFAULT_BUDGET,
            inputs_per_program: 1,
            registers: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzWitness {
    pub program_index: usize,
    pub program: String,
    pub input: String,
    pub violation: Violation,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FuzzReport {
    pub programs: usize,
    pub runs: u64,
    pub halted: u64,
    pub fell_off_end: u64,
    pub budget_exhausted: u64,
    /// Runs stopped once `i > m`, where nothing remains to check.
    pub vacuous_cutoffs: u64,
    pub snapshots_checked: u64,
    pub violations: u64,
    pub witnesses: Vec<FuzzWitness>,
}

impl FuzzReport {
    fn merge(&mut self, other: FuzzReport) {
        self.runs += other.runs;
        self.halted += other.halted;
        self.fell_off_end += other.fell_off_end;
        self.budget_exhausted += other.budget_exhausted;
        self.vacuous_cutoffs += other.vacuous_cutoffs;
        self.snapshots_checked += other.snapshots_checked;
        self.violations += other.violations;
        let room = KEPT_WITNESSES.saturating_sub(self.witnesses.len());
        self.witnesses.extend(other.witnesses.into_iter().take(room));
    }
}

/// Generates a random grammar-valid program of 1..=`max_len` instructions
/// over `x` and up to `registers - 1` scratch registers.
pub fn random_program<R: Rng + ?Sized>(rng: &mut R, max_len: usize, registers: usize) -> Program {
    const OPS: [(&str, u32, usize); 12] = [
        ("ZERO", 1, 1),
        ("MOV", 3, 2),
        ("INC", 3, 1),
        ("DEC", 3, 1),
        ("AND", 3, 2),
        ("OR", 3, 2),
        ("BZ", 2, 1),
        ("BNZ", 2, 1),
        ("BEQ", 1, 2),
        ("BLT", 1, 2),
        ("JMP", 1, 0),
        ("OUT", 1, 1),
    ];
    let total: u32 = OPS.iter().map(|o| o.1).sum();
    let registers = registers.clamp(1, 8);
    let len = rng.gen_range(1..=max_len.max(1));
    let reg = |rng: &mut R| match rng.gen_range(0..registers) {
        0 => "x".to_owned(),
        i => format!("r{i}"),
    };

    let mut text = String::new();
    for i in 0..len {
        let mut pick = rng.gen_range(0..total);
        let &(op, _, nregs) = OPS
            .iter()
            .find(|o| {
                if pick < o.1 {
                    true
                } else {
                    pick -= o.1;
                    false
                }
            })
            .expect("pick below total weight");
        let mut line = format!("L{i}: {op}");
        for _ in 0..nregs {
            line.push(' ');
            line.push_str(&reg(rng));
        }
        if matches!(op, "BZ" | "BNZ" | "BEQ" | "BLT" | "JMP") {
            line.push_str(&format!(" L{}", rng.gen_range(0..=len)));
        }
        text.push_str(&line);
        text.push('\n');
    }
    text.push_str(&format!("L{len}:\n"));
    parse_program(&text).expect("generator emits valid programs")
}

fn program_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn random_params<R: Rng + ?Sized>(rng: &mut R, cfg: &FuzzConfig, theorem_family: bool) -> AdversaryParams {
    let n = rng.gen_range(cfg.min_width..=cfg.max_width);
    let m = rng.gen_range(0..n.div_ceil(2));
    let e = rng.gen_bool(0.5);
    let d = if theorem_family { e } else { rng.gen_bool(0.5) };
    AdversaryParams::new(e, m, d, n).expect("m < n/2 by construction")
}

/// Invariant fuzzing under the standard semantics.
pub fn fuzz_invariant(cfg: &FuzzConfig) -> FuzzReport {
    fuzz_invariant_with(cfg, &Standard)
}

/// Runs random programs on random adversary inputs with tracing and checks
/// the prefix invariant at every snapshot. Deterministic in `cfg.seed`.
pub fn fuzz_invariant_with<S>(cfg: &FuzzConfig, semantics: &S) -> FuzzReport
where
    S: Semantics<u64> + ?Sized,
{
    let parts: Vec<FuzzReport> = (0..cfg.programs)
        .into_par_iter()
        .map(|index| {
            let mut rng = program_rng(cfg.seed, index);
            let program = random_program(&mut rng, cfg.max_len, cfg.registers);
            let mut part = FuzzReport::default();
            for _ in 0..cfg.inputs_per_program {
                let p = random_params(&mut rng, cfg, false);
                let x: Word = adversary_input(&p).expect("width within u64");
                let mut checker = PrefixChecker::new::<u64>(&p)
                    .expect("valid params")
                    .keep_at_most(1)
                    .stop_when_vacuous();
                let res = execute_with(&program, x, cfg.budget, semantics, &mut checker)
                    .expect("budget is positive");
                part.runs += 1;
                match res.halt_reason {
                    HaltReason::Out => part.halted += 1,
                    HaltReason::FellOffEnd => part.fell_off_end += 1,
                    HaltReason::BudgetExhausted => part.budget_exhausted += 1,
                    HaltReason::Stopped => part.vacuous_cutoffs += 1,
                }
                let report = checker.finish();
                part.snapshots_checked += report.snapshots_checked;
                part.violations += report.violation_count;
                if let Some(v) = report.violations.into_iter().next() {
                    if part.witnesses.len() < KEPT_WITNESSES {
                        part.witnesses.push(FuzzWitness {
                            program_index: index,
                            program: program.to_string(),
                            input: x.to_bits(),
                            violation: v,
                        });
                    }
                }
            }
            part
        })
        .collect();

    let mut report = FuzzReport {
        programs: cfg.programs,
        ..FuzzReport::default()
    };
    for part in parts {
        report.merge(part);
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivergenceWitness {
    pub program_index: usize,
    pub program: String,
    pub input: String,
    pub divergence: Divergence,
    pub bound: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DivergenceReport {
    pub programs: usize,
    pub pairs: u64,
    /// Pairs whose control flow split before either run reached the bound.
    pub violations: u64,
    pub witnesses: Vec<DivergenceWitness>,
}

/// Control-flow stream of a run, cut once `incdec_index >= stop_at`.
pub(crate) fn control_stream<S>(
    program: &Program,
    input: Word,
    budget: u64,
    semantics: &S,
    stop_at: u64,
) -> Vec<(usize, u64)>
where
    S: Semantics<u64> + ?Sized,
{
    let mut stream = Vec::new();
    let mut obs = |s: SnapshotRef<'_, u64>| {
        stream.push((s.pc, s.incdec_index));
        if s.incdec_index >= stop_at {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    };
    execute_with(program, input, budget, semantics, &mut obs).expect("budget is positive");
    stream
}

/// Runs random programs on MSB-flipped adversary pairs from the families
/// `1(01)^m 1^*` and `0(01)^m 0^*` and counts pairs whose control flow
/// splits before `min(nu, n - nu) = m` increments/decrements.
pub fn fuzz_divergence(cfg: &FuzzConfig) -> DivergenceReport {
    let parts: Vec<DivergenceReport> = (0..cfg.programs)
        .into_par_iter()
        .map(|index| {
            // Separate stream space from the invariant fuzzer.
            let mut rng = program_rng(cfg.seed ^ 0x9e37_79b9_7f4a_7c15, index);
            let program = random_program(&mut rng, cfg.max_len, cfg.registers);
            let mut part = DivergenceReport::default();
            for _ in 0..cfg.inputs_per_program {
                let p = random_params(&mut rng, cfg, true);
                let x: Word = adversary_input(&p).expect("width within u64");
                let bound = u64::from(p.m());
                let a = control_stream(&program, x, cfg.budget, &Standard, bound);
                let b = control_stream(&program, x.flip_msb(), cfg.budget, &Standard, bound);
                part.pairs += 1;
                if let Some(d) = first_divergence(&a, &b) {
                    if d.incdec_index < bound {
                        part.violations += 1;
                        if part.witnesses.len() < KEPT_WITNESSES {
                            part.witnesses.push(DivergenceWitness {
                                program_index: index,
                                program: program.to_string(),
                                input: x.to_bits(),
                                divergence: d,
                                bound,
                            });
                        }
                    }
                }
            }
            part
        })
        .collect();

    let mut report = DivergenceReport {
        programs: cfg.programs,
        ..DivergenceReport::default()
    };
    for part in parts {
        report.pairs += part.pairs;
        report.violations += part.violations;
        let room = KEPT_WITNESSES.saturating_sub(report.witnesses.len());
        report.witnesses.extend(part.witnesses.into_iter().take(room));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::faults::{ComplementingMov, NonWrappingInc};

    fn small(programs: usize) -> FuzzConfig {
        FuzzConfig {
            programs,
            budget: 5_000,
            ..FuzzConfig::default()
        }
    }

    #[test]
    fn random_programs_reparse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = random_program(&mut rng, 24, 8);
            assert!(!p.is_empty() && p.len() <= 24);
            assert!(p.registers().len() <= 8);
            assert_eq!(parse_program(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn empty_run() {
        let r = fuzz_invariant(&small(0));
        assert_eq!(r.runs, 0);
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn standard_semantics_is_clean_and_reproducible() {
        let cfg = small(500);
        let a = fuzz_invariant(&cfg);
        assert_eq!(a.runs, 500);
        assert_eq!(a.violations, 0, "{:?}", a.witnesses.first());
        assert!(a.snapshots_checked > a.runs);
        assert_eq!(a, fuzz_invariant(&cfg));
    }

    #[test]
    fn faults_are_detected() {
        let cfg = small(2000);
        let r = fuzz_invariant_with(&cfg, &NonWrappingInc);
        assert!(r.violations > 0);
        let w = &r.witnesses[0];
        assert!(!w.violation.allowed.contains(&w.violation.prefix));
        assert!(fuzz_invariant_with(&cfg, &ComplementingMov).violations > 0);
    }

    #[test]
    fn divergence_fuzz_is_clean() {
        let r = fuzz_divergence(&small(500));
        assert_eq!(r.pairs, 500);
        assert_eq!(r.violations, 0, "{:?}", r.witnesses.first());
    }
}
