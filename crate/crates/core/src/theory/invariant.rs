use std::ops::ControlFlow;

use super::{adversary_input, prefix_bits, AdversaryParams, KSchedule, TheoryError};
use crate::rvm::{Observer, SnapshotRef, TraceSnapshot};
use crate::word::{Scalar, Word};

/// One register whose top `k_i` bits fell outside `{0^k, 1^k, prefix(x)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Index of the snapshot (instructions executed so far).
    pub step: u64,
    pub incdec_index: u64,
    pub k: u32,
    pub register: String,
    pub prefix: String,
    /// `[0^k, 1^k, prefix of the input]`.
    pub allowed: [String; 3],
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ViolationReport {
    pub snapshots_checked: u64,
    /// Violations beyond the retention limit are counted but not stored.
    pub violation_count: u64,
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }
}

/// Incremental prefix-invariant check, usable as an [`Observer`].
#[derive(Debug, Clone)]
pub struct PrefixChecker {
    schedule: KSchedule,
    input: u64,
    width: u32,
    keep: usize,
    stop_when_vacuous: bool,
    report: ViolationReport,
}

impl PrefixChecker {
    pub fn new<T: Scalar>(p: &AdversaryParams) -> Result<Self, TheoryError> {
        let x: Word<T> = adversary_input(p)?;
        Ok(PrefixChecker {
            schedule: p.schedule(),
            input: x.to_u64(),
            width: p.n(),
            keep: usize::MAX,
            stop_when_vacuous: false,
            report: ViolationReport::default(),
        })
    }

    /// Stores at most `keep` violations (all are still counted).
    pub fn keep_at_most(mut self, keep: usize) -> Self {
        self.keep = keep;
        self
    }

    /// Asks the machine to stop once `i > m`, after which nothing is checked.
    pub fn stop_when_vacuous(mut self) -> Self {
        self.stop_when_vacuous = true;
        self
    }

    pub fn check<T: Scalar>(&mut self, snap: SnapshotRef<'_, T>) -> ControlFlow<()> {
        let Some(k) = self.schedule.k(snap.incdec_index) else {
            return if self.stop_when_vacuous {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            };
        };
        self.report.snapshots_checked += 1;
        let shift = self.width - k;
        let ones = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        let own = self.input >> shift;
        for (name, w) in snap.names.iter().zip(snap.registers) {
            let prefix = w.to_u64() >> shift;
            if prefix == 0 || prefix == ones || prefix == own {
                continue;
            }
            self.report.violation_count += 1;
            if self.report.violations.len() < self.keep {
                self.report.violations.push(Violation {
                    step: snap.step,
                    incdec_index: snap.incdec_index,
                    k,
                    register: name.clone(),
                    prefix: prefix_bits(prefix, k),
                    allowed: [prefix_bits(0, k), prefix_bits(ones, k), prefix_bits(own, k)],
                });
            }
        }
        ControlFlow::Continue(())
    }

    pub fn finish(self) -> ViolationReport {
        self.report
    }
}

impl<T: Scalar> Observer<T> for PrefixChecker {
    fn observe(&mut self, snap: SnapshotRef<'_, T>) -> ControlFlow<()> {
        self.check(snap)
    }
}

/// Checks every snapshot of a trace recorded on `adversary_input(p)`: each
/// register's top `k_i` bits must be all zeros, all ones, or the input's
/// own top `k_i` bits, where `i` is the snapshot's increment/decrement
/// count. Snapshots with `i > m` are skipped.
pub fn check_prefix_invariant<T: Scalar>(
    trace: &[TraceSnapshot<T>],
    p: &AdversaryParams,
) -> Result<ViolationReport, TheoryError> {
    let mut checker = PrefixChecker::new::<T>(p)?;
    for snap in trace {
        let _ = checker.check(snap.as_ref());
    }
    Ok(checker.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::progs::{dense_program, wegner_program};
    use crate::rvm::{execute, parse_program};

    #[test]
    fn initial_snapshot_is_clean() {
        let p = AdversaryParams::new(true, 2, false, 8).unwrap();
        let x = adversary_input::<u64>(&p).unwrap();
        let prog = parse_program("OUT y").unwrap();
        let r = execute(&prog, x, 10, true).unwrap();
        let report = check_prefix_invariant(&r.trace.unwrap()[..1], &p).unwrap();
        assert!(report.is_clean());
        assert_eq!(report.snapshots_checked, 1);
    }

    #[test]
    fn fabricated_violation() {
        let p = AdversaryParams::new(true, 2, true, 8).unwrap();
        let x = adversary_input::<u64>(&p).unwrap();
        assert_eq!(x.to_bits(), "10101111");
        // Take a real snapshot after one INC and plant a 010-prefixed value.
        let prog = parse_program("INC y\nOUT y").unwrap();
        let r = execute(&prog, x, 10, true).unwrap();
        let mut snap = r.trace.unwrap()[1].clone();
        assert_eq!(snap.incdec_index, 1);
        snap.registers[1] = "01000000".parse().unwrap();
        let report = check_prefix_invariant(&[snap], &p).unwrap();
        assert_eq!(report.violation_count, 1);
        let v = &report.violations[0];
        assert_eq!((v.k, v.register.as_str(), v.prefix.as_str()), (3, "y", "010"));
        assert_eq!(v.allowed, ["000".to_owned(), "111".to_owned(), "101".to_owned()]);
    }

    #[test]
    fn shipped_programs_keep_the_invariant() {
        let p = AdversaryParams::new(false, 2, false, 6).unwrap();
        let x = adversary_input::<u64>(&p).unwrap();
        let g = wegner_program(6).unwrap();
        let r = execute(g.program(), x, 10_000, true).unwrap();
        let report = check_prefix_invariant(r.trace.as_ref().unwrap(), &p).unwrap();
        assert!(report.is_clean(), "{report:?}");
        assert!(report.snapshots_checked > 1);

        for n in 2..=12u32 {
            let dense = dense_program(n).unwrap();
            for m in 0..n.div_ceil(2) {
                for (e, d) in [(false, false), (true, true), (true, false), (false, true)] {
                    let p = AdversaryParams::new(e, m, d, n).unwrap();
                    let x = adversary_input::<u16>(&p).unwrap();
                    let r = execute(dense.program(), x, 10_000, true).unwrap();
                    let report = check_prefix_invariant(r.trace.as_ref().unwrap(), &p).unwrap();
                    assert!(report.is_clean(), "{p:?} {report:?}");
                }
            }
        }
    }
}
