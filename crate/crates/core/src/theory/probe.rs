use super::{adversary_input, AdversaryParams, TheoryError};
use crate::rvm::{diff_traces, execute, Divergence, Program};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeResult {
    pub input: Word,
    pub flipped: Word,
    pub divergence: Option<Divergence>,
    /// `min(nu(x), n - nu(x))`.
    pub bound: u64,
    /// No divergence, or one at or after `bound` increments/decrements.
    pub holds: bool,
}

/// Runs `program` on the adversary word and on the same word with its top
/// bit flipped, and reports where the executed instruction streams first
/// differ. Fewer than `min(nu, n - nu)` increments/decrements cannot tell
/// the two inputs apart, so any divergence must come at or after that.
pub fn msb_flip_probe(
    program: impl AsRef<Program>,
    p: &AdversaryParams,
    budget: u64,
) -> Result<ProbeResult, TheoryError> {
    if !p.is_theorem_family() {
        return Err(TheoryError::NotTheoremFamily);
    }
    let n = p.n();
    let nu = p.nu();
    if 2 * nu == n {
        return Err(TheoryError::Balanced);
    }
    let program = program.as_ref();
    let input: Word = adversary_input(p)?;
    let flipped = input.flip_msb();
    let a = execute(program, input, budget, true)?;
    let b = execute(program, flipped, budget, true)?;
    let divergence = diff_traces(&a, &b)?;
    let bound = u64::from(nu.min(n - nu));
    Ok(ProbeResult {
        input,
        flipped,
        divergence,
        bound,
        holds: divergence.is_none_or(|d| d.incdec_index >= bound),
    })
}
