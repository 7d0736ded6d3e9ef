//! Counting ones with increment, decrement, AND, OR and the constant zero.
//!
//! * [`word`]: fixed-width words with wraparound, and the reference popcount.
//! * [`rvm`]: the restricted register machine, its assembly, and step counters.
//! * [`progs`]: counting programs with exact step-count formulas, plus native
//!   broadword and HAKMEM popcounts.
//! * [`theory`]: adversary inputs, the prefix invariant, fuzzing, the MSB-flip
//!   probe, and exhaustive lower-bound audits.
//!
//! Words are generic over their unsigned storage; the aliases below name
//! the common choices.

pub mod progs;
pub mod rvm;
pub mod theory;
pub mod word;

pub use progs::{Algorithm, GeneratedProgram};
pub use rvm::{execute, parse_program, ExecResult, Program};
pub use word::{Scalar, Word, WordError};

pub type Word8 = Word<u8>;
pub type Word16 = Word<u16>;
pub type Word32 = Word<u32>;
pub type Word64 = Word<u64>;
