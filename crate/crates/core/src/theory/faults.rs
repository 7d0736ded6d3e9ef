//! Deliberately wrong machine semantics, used to show that the checks in
//! this crate notice a broken interpreter.

use std::fmt;
use std::str::FromStr;

use crate::rvm::Semantics;
use crate::word::{Scalar, Word};

/// INC without wraparound: on overflow of `1^n` the carry is kept as the
/// new top bit, so the register becomes `1 0^(n-1)` instead of `0^n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NonWrappingInc;

impl<T: Scalar> Semantics<T> for NonWrappingInc {
    fn inc(&self, w: &Word<T>) -> Word<T> {
        if w.is_ones() {
            Word::zero(w.width()).expect("valid width").flip_msb()
        } else {
            w.wrap_inc()
        }
    }
}

/// An interpreter with complement available: MOV stores `NOT source`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplementingMov;

impl<T: Scalar> Semantics<T> for ComplementingMov {
    fn mov(&self, w: &Word<T>) -> Word<T> {
        w.complement()
    }
}

/// Selector over the available fault fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fault {
    NonWrappingInc,
    ComplementingMov,
}

impl Fault {
    pub const ALL: [Fault; 2] = [Fault::NonWrappingInc, Fault::ComplementingMov];

    pub fn name(self) -> &'static str {
        match self {
            Fault::NonWrappingInc => "non-wrapping-inc",
            Fault::ComplementingMov => "complementing-mov",
        }
    }

    pub fn semantics<T: Scalar>(self) -> &'static dyn Semantics<T> {
        match self {
            Fault::NonWrappingInc => &NonWrappingInc,
            Fault::ComplementingMov => &ComplementingMov,
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fault::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown fault {s:?}"))
    }
}
