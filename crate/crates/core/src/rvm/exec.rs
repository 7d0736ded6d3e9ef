use std::ops::ControlFlow;
use std::sync::Arc;

use thiserror::Error;

use super::{Instruction, Program};
use crate::word::{Scalar, Word};

/// Default instruction budget for runs of untrusted (e.g. fuzzed) programs.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("budget must be at least one instruction")]
    ZeroBudget,
    #[error("execution result carries no trace")]
    MissingTrace,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct StepCounters {
    /// Every executed instruction.
    pub total_steps: u64,
    /// Executed INC and DEC only.
    pub incdec_steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HaltReason {
    Out,
    BudgetExhausted,
    FellOffEnd,
    /// An [`Observer`] asked to stop early.
    Stopped,
}

/// Register file captured after an instruction (or at the start).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSnapshot<T: Scalar = u64> {
    /// Number of instructions executed before this snapshot.
    pub step: u64,
    /// Number of INC/DEC executed before this snapshot.
    pub incdec_index: u64,
    /// Next instruction to execute. After OUT this stays on the OUT.
    pub pc: usize,
    pub registers: Vec<Word<T>>,
    names: Arc<[String]>,
}

impl<T: Scalar> TraceSnapshot<T> {
    pub fn register(&self, name: &str) -> Option<Word<T>> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.registers[i])
    }

    /// `(name, value)` pairs in register order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, Word<T>)> + '_ {
        self.names.iter().map(String::as_str).zip(self.registers.iter().copied())
    }

    pub fn as_ref(&self) -> SnapshotRef<'_, T> {
        SnapshotRef {
            step: self.step,
            incdec_index: self.incdec_index,
            pc: self.pc,
            registers: &self.registers,
            names: &self.names,
        }
    }
}

/// Borrowed view of the machine state handed to an [`Observer`].
#[derive(Debug, Clone, Copy)]
pub struct SnapshotRef<'a, T: Scalar> {
    pub step: u64,
    pub incdec_index: u64,
    pub pc: usize,
    pub registers: &'a [Word<T>],
    pub names: &'a [String],
}

impl<T: Scalar> SnapshotRef<'_, T> {
    pub fn to_owned(&self) -> TraceSnapshot<T> {
        TraceSnapshot {
            step: self.step,
            incdec_index: self.incdec_index,
            pc: self.pc,
            registers: self.registers.to_vec(),
            names: self.names.into(),
        }
    }
}

/// Receives a snapshot at the start and after every executed instruction.
pub trait Observer<T: Scalar> {
    fn observe(&mut self, snap: SnapshotRef<'_, T>) -> ControlFlow<()>;
}

impl<T: Scalar> Observer<T> for () {
    fn observe(&mut self, _: SnapshotRef<'_, T>) -> ControlFlow<()> {
        ControlFlow::Continue(())
    }
}

impl<T: Scalar, F> Observer<T> for F
where
    F: FnMut(SnapshotRef<'_, T>) -> ControlFlow<()>,
{
    fn observe(&mut self, snap: SnapshotRef<'_, T>) -> ControlFlow<()> {
        self(snap)
    }
}

/// Stores every snapshot.
#[derive(Debug, Default)]
pub struct Recorder<T: Scalar> {
    pub snapshots: Vec<TraceSnapshot<T>>,
    names: Option<Arc<[String]>>,
}

impl<T: Scalar> Recorder<T> {
    pub fn new() -> Self {
        Recorder {
            snapshots: Vec::new(),
            names: None,
        }
    }
}

impl<T: Scalar> Observer<T> for Recorder<T> {
    fn observe(&mut self, snap: SnapshotRef<'_, T>) -> ControlFlow<()> {
        let names = self.names.get_or_insert_with(|| snap.names.into());
        self.snapshots.push(TraceSnapshot {
            step: snap.step,
            incdec_index: snap.incdec_index,
            pc: snap.pc,
            registers: snap.registers.to_vec(),
            names: Arc::clone(names),
        });
        ControlFlow::Continue(())
    }
}

/// Meaning of the data operations. [`Standard`] is the machine model;
/// other implementations exist to inject faults.
pub trait Semantics<T: Scalar>: Sync {
    fn inc(&self, w: &Word<T>) -> Word<T> {
        w.wrap_inc()
    }

    fn dec(&self, w: &Word<T>) -> Word<T> {
        w.wrap_dec()
    }

    fn and(&self, a: &Word<T>, b: &Word<T>) -> Word<T> {
        a.and_unchecked(b)
    }

    fn or(&self, a: &Word<T>, b: &Word<T>) -> Word<T> {
        a.or_unchecked(b)
    }

    fn mov(&self, w: &Word<T>) -> Word<T> {
        *w
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Standard;

impl<T: Scalar> Semantics<T> for Standard {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecResult<T: Scalar = u64> {
    /// Present iff `halt_reason == HaltReason::Out`.
    pub output: Option<Word<T>>,
    pub counters: StepCounters,
    pub halt_reason: HaltReason,
    pub trace: Option<Vec<TraceSnapshot<T>>>,
}

/// Runs `program` on `input` under the standard semantics.
///
/// Every register takes the input's width; `x` starts as the input and
/// everything else as zero. With `trace_on`, the result carries a snapshot
/// for the initial state and one after every executed instruction.
pub fn execute<T: Scalar>(
    program: &Program,
    input: Word<T>,
    budget: u64,
    trace_on: bool,
) -> Result<ExecResult<T>, ExecError> {
    if trace_on {
        let mut rec = Recorder::new();
        let mut res = execute_with(program, input, budget, &Standard, &mut rec)?;
        res.trace = Some(rec.snapshots);
        Ok(res)
    } else {
        execute_with(program, input, budget, &Standard, &mut ())
    }
}

/// Runs `program` with explicit semantics, streaming snapshots to `observer`.
pub fn execute_with<T, S, O>(
    program: &Program,
    input: Word<T>,
    budget: u64,
    semantics: &S,
    observer: &mut O,
) -> Result<ExecResult<T>, ExecError>
where
    T: Scalar,
    S: Semantics<T> + ?Sized,
    O: Observer<T> + ?Sized,
{
    if budget == 0 {
        return Err(ExecError::ZeroBudget);
    }
    let zero = Word::reduced(input.width(), T::zero()).expect("input width is valid");
    let mut regs = vec![zero; program.registers().len()];
    regs[0] = input;
    let names = program.registers();
    let code = program.instructions();

    let mut counters = StepCounters::default();
    let mut pc = 0usize;
    let mut output = None;

    macro_rules! snap {
        ($pc:expr) => {
            observer.observe(SnapshotRef {
                step: counters.total_steps,
                incdec_index: counters.incdec_steps,
                pc: $pc,
                registers: &regs,
                names,
            })
        };
    }

    if snap!(pc).is_break() {
        return Ok(finish(None, counters, HaltReason::Stopped));
    }

    let halt = loop {
        let Some(ins) = code.get(pc) else {
            break HaltReason::FellOffEnd;
        };
        if counters.total_steps >= budget {
            break HaltReason::BudgetExhausted;
        }
        counters.total_steps += 1;
        let mut next = pc + 1;
        match *ins {
            Instruction::Zero(r) => regs[r.index()] = zero,
            Instruction::Mov(r, s) => regs[r.index()] = semantics.mov(&regs[s.index()]),
            Instruction::Inc(r) => {
                counters.incdec_steps += 1;
                regs[r.index()] = semantics.inc(&regs[r.index()]);
            }
            Instruction::Dec(r) => {
                counters.incdec_steps += 1;
                regs[r.index()] = semantics.dec(&regs[r.index()]);
            }
            Instruction::And(r, s) => regs[r.index()] = semantics.and(&regs[r.index()], &regs[s.index()]),
            Instruction::Or(r, s) => regs[r.index()] = semantics.or(&regs[r.index()], &regs[s.index()]),
            Instruction::Bz(r, t) => {
                if regs[r.index()].is_zero() {
                    next = t.index();
                }
            }
            Instruction::Bnz(r, t) => {
                if !regs[r.index()].is_zero() {
                    next = t.index();
                }
            }
            Instruction::Beq(r, s, t) => {
                if regs[r.index()].value() == regs[s.index()].value() {
                    next = t.index();
                }
            }
            Instruction::Blt(r, s, t) => {
                if regs[r.index()].value() < regs[s.index()].value() {
                    next = t.index();
                }
            }
            Instruction::Jmp(t) => next = t.index(),
            Instruction::Out(r) => {
                output = Some(regs[r.index()]);
                // A stop request here changes nothing: the machine halts anyway.
                let _ = snap!(pc);
                break HaltReason::Out;
            }
        }
        pc = next;
        if snap!(pc).is_break() {
            break HaltReason::Stopped;
        }
    };
    Ok(finish(output, counters, halt))
}

fn finish<T: Scalar>(output: Option<Word<T>>, counters: StepCounters, halt_reason: HaltReason) -> ExecResult<T> {
    ExecResult {
        output,
        counters,
        halt_reason,
        trace: None,
    }
}

/// First point where two executed-instruction streams part ways.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Divergence {
    /// Index into the executed-instruction stream.
    pub stream_index: usize,
    /// INC/DEC executed before that instruction (equal in both runs).
    pub incdec_index: u64,
}

/// Compares two executed streams of `(pc, incdec_index)` entries.
pub fn first_divergence(a: &[(usize, u64)], b: &[(usize, u64)]) -> Option<Divergence> {
    let common = a.len().min(b.len());
    if let Some(j) = (0..common).find(|&j| a[j].0 != b[j].0) {
        return Some(Divergence {
            stream_index: j,
            incdec_index: a[j].1,
        });
    }
    if a.len() == b.len() {
        return None;
    }
    let longer = if a.len() > b.len() { a } else { b };
    Some(Divergence {
        stream_index: common,
        incdec_index: longer[common].1,
    })
}

fn executed_stream<T: Scalar>(r: &ExecResult<T>) -> Result<Vec<(usize, u64)>, ExecError> {
    let trace = r.trace.as_ref().ok_or(ExecError::MissingTrace)?;
    Ok(trace
        .iter()
        .take(trace.len().saturating_sub(1))
        .map(|s| (s.pc, s.incdec_index))
        .collect())
}

/// Earliest divergence in control flow between two traced runs of the same
/// program, or `None` if they executed the same instruction sequence.
pub fn diff_traces<T: Scalar>(a: &ExecResult<T>, b: &ExecResult<T>) -> Result<Option<Divergence>, ExecError> {
    Ok(first_divergence(&executed_stream(a)?, &executed_stream(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rvm::parse_program;

    const WEGNER: &str = "loop: BZ x done\nMOV t x\nDEC t\nAND x t\nINC c\nJMP loop\ndone: OUT c";

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn wegner_counts_1011() {
        let p = parse_program(WEGNER).unwrap();
        let r = execute(&p, w("1011"), 1000, false).unwrap();
        assert_eq!(r.output.unwrap().to_u64(), 3);
        assert_eq!(r.counters.incdec_steps, 6);
        // 3 iterations of 6 instructions, then BZ and OUT.
        assert_eq!(r.counters.total_steps, 20);
        assert_eq!(r.halt_reason, HaltReason::Out);
    }

    #[test]
    fn identity_program() {
        let p = parse_program("OUT x").unwrap();
        let r = execute(&p, w("0110"), 10, false).unwrap();
        assert_eq!(r.output, Some(w("0110")));
        assert_eq!(r.counters, StepCounters { total_steps: 1, incdec_steps: 0 });
    }

    #[test]
    fn budget_and_fall_through() {
        let p = parse_program("loop: JMP loop").unwrap();
        let r = execute(&p, w("01"), 100, false).unwrap();
        assert_eq!(r.halt_reason, HaltReason::BudgetExhausted);
        assert_eq!(r.output, None);
        assert_eq!(r.counters.total_steps, 100);

        let p = parse_program("INC c").unwrap();
        let r = execute(&p, w("01"), 100, false).unwrap();
        assert_eq!(r.halt_reason, HaltReason::FellOffEnd);
        assert_eq!(r.output, None);

        assert_eq!(execute(&p, w("01"), 0, false), Err(ExecError::ZeroBudget));
    }

    #[test]
    fn comparisons() {
        let p = parse_program(
            "DEC m\nBLT x m less\nOUT m\nless: BEQ x x same\nOUT m\nsame: BNZ x nz\nOUT x\nnz: OUT y",
        )
        .unwrap();
        let r = execute(&p, w("0101"), 100, false).unwrap();
        assert_eq!(r.output, Some(w("0000")));
        let r = execute(&p, w("0000"), 100, false).unwrap();
        assert_eq!(r.output, Some(w("0000")));
        assert_eq!(r.counters.total_steps, 5);
    }

    #[test]
    fn trace_shape() {
        let p = parse_program(WEGNER).unwrap();
        let r = execute(&p, w("0110"), 1000, true).unwrap();
        let trace = r.trace.as_ref().unwrap();
        assert_eq!(trace.len() as u64, r.counters.total_steps + 1);
        assert_eq!((trace[0].step, trace[0].incdec_index, trace[0].pc), (0, 0, 0));
        assert_eq!(trace[0].register("x"), Some(w("0110")));
        assert_eq!(trace[0].register("c"), Some(w("0000")));
        let last = trace.last().unwrap();
        assert_eq!(last.incdec_index, r.counters.incdec_steps);
        assert_eq!(last.pc, 6);
        for s in trace {
            assert!(s.registers.iter().all(|v| v.width() == 4));
        }
        let incdec_events = trace
            .windows(2)
            .filter(|pair| p.instructions()[pair[0].pc].is_incdec())
            .count() as u64;
        assert_eq!(incdec_events, r.counters.incdec_steps);
    }

    #[test]
    fn deterministic() {
        let p = parse_program(WEGNER).unwrap();
        let a = execute(&p, w("110111"), 1000, true).unwrap();
        let b = execute(&p, w("110111"), 1000, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn divergence_examples() {
        let p = parse_program(WEGNER).unwrap();
        let run = |s| execute(&p, w(s), 1000, true).unwrap();
        assert_eq!(diff_traces(&run("001010"), &run("001010")).unwrap(), None);
        let d = diff_traces(&run("001010"), &run("101010")).unwrap().unwrap();
        assert!(d.incdec_index >= 2);
        // Two iterations agree; the third BZ check resolves differently.
        assert_eq!(d.incdec_index, 4);
        assert_eq!(d.stream_index, 13);

        let id = parse_program("OUT x").unwrap();
        let a = execute(&id, w("001010"), 10, true).unwrap();
        let b = execute(&id, w("101010"), 10, true).unwrap();
        assert_eq!(diff_traces(&a, &b).unwrap(), None);

        let untraced = execute(&id, w("1"), 10, false).unwrap();
        assert_eq!(diff_traces(&untraced, &a), Err(ExecError::MissingTrace));
    }

    #[test]
    fn divergence_on_length() {
        let a = [(0, 0), (1, 0)];
        let b = [(0, 0), (1, 0), (2, 1)];
        assert_eq!(
            first_divergence(&a, &b),
            Some(Divergence { stream_index: 2, incdec_index: 1 })
        );
        assert_eq!(first_divergence(&a, &a), None);
    }

    #[test]
    fn observer_can_stop() {
        let p = parse_program(WEGNER).unwrap();
        let mut seen = 0;
        let r = execute_with(&p, w("1111"), 1000, &Standard, &mut |s: SnapshotRef<'_, u64>| {
            seen += 1;
            if s.incdec_index >= 2 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .unwrap();
        assert_eq!(r.halt_reason, HaltReason::Stopped);
        assert_eq!(r.counters.incdec_steps, 2);
        assert_eq!(seen, r.counters.total_steps + 1);
    }

    #[test]
    fn narrow_storage() {
        let p = parse_program(WEGNER).unwrap();
        let x = Word::<u8>::from_bits("11111111").unwrap();
        let r = execute(&p, x, 1000, false).unwrap();
        assert_eq!(r.output.unwrap().to_u64(), 8);
        assert_eq!(r.counters.incdec_steps, 16);
    }
}
