//! Fixed-width unsigned machine words with wraparound arithmetic.
//!
//! A [`Word`] carries its width `n` next to the value and keeps the value
//! reduced modulo `2^n`. The storage type is any unsigned primitive (see
//! [`Scalar`]); the width may be anything from 1 up to the storage's bit
//! count. Bit strings are always written most significant bit first.

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{PrimInt, Unsigned, WrappingAdd, WrappingSub};
use thiserror::Error;

/// Largest supported word width.
pub const MAX_WIDTH: u32 = 64;

/// Unsigned storage usable as the backing integer of a [`Word`].
pub trait Scalar:
    PrimInt + Unsigned + WrappingAdd + WrappingSub + Hash + fmt::Debug + Send + Sync + 'static
{
    /// Bit count of the storage type.
    const BITS: u32;
}

macro_rules! impl_scalar {
    ($($t:ty),*) => {
        $(impl Scalar for $t {
            const BITS: u32 = <$t>::BITS;
        })*
    };
}

impl_scalar!(u8, u16, u32, u64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("width {width} is outside 1..={max}")]
    WidthOutOfRange { width: u32, max: u32 },
    #[error("value {value:#x} does not fit in {width} bits")]
    ValueTooWide { value: u64, width: u32 },
    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: u32, right: u32 },
    #[error("prefix length {k} exceeds width {width}")]
    PrefixTooLong { k: u32, width: u32 },
    #[error("invalid bit string {0:?}")]
    BadBitString(String),
    #[error("operation requires width {expected}, got {actual}")]
    UnsupportedWidth { expected: u32, actual: u32 },
}

/// An `n`-bit unsigned value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word<T: Scalar = u64> {
    width: u32,
    value: T,
}

impl<T: Scalar> Word<T> {
    /// Creates a word, rejecting values that do not fit in `width` bits.
    pub fn new(width: u32, value: T) -> Result<Self, WordError> {
        check_width::<T>(width)?;
        if value & !mask::<T>(width) != T::zero() {
            return Err(WordError::ValueTooWide {
                value: value.to_u64().unwrap_or(u64::MAX),
                width,
            });
        }
        Ok(Word { width, value })
    }

    /// Creates a word from `value mod 2^width`.
    pub fn reduced(width: u32, value: T) -> Result<Self, WordError> {
        check_width::<T>(width)?;
        Ok(Word {
            width,
            value: value & mask::<T>(width),
        })
    }

    pub fn zero(width: u32) -> Result<Self, WordError> {
        Self::new(width, T::zero())
    }

    /// The all-ones word `1^n`.
    pub fn ones(width: u32) -> Result<Self, WordError> {
        check_width::<T>(width)?;
        Ok(Word {
            width,
            value: mask::<T>(width),
        })
    }

    /// Builds a word from a `u64`, which must fit both the storage and the width.
    pub fn from_u64(width: u32, value: u64) -> Result<Self, WordError> {
        let v = T::from(value).ok_or(WordError::ValueTooWide { value, width })?;
        Self::new(width, v)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn value(&self) -> T {
        self.value
    }

    pub fn to_u64(&self) -> u64 {
        // Every Scalar is at most 64 bits wide.
        self.value.to_u64().expect("scalar fits in u64")
    }

    pub fn is_zero(&self) -> bool {
        self.value == T::zero()
    }

    pub fn is_ones(&self) -> bool {
        self.value == mask::<T>(self.width)
    }

    /// Bit `i`, counted from the least significant end.
    pub fn bit(&self, i: u32) -> bool {
        i < self.width && (self.value >> i as usize) & T::one() == T::one()
    }

    /// Number of one bits, by inspecting every position. This is the
    /// reference count that every other routine is checked against.
    pub fn popcount_naive(&self) -> u32 {
        (0..self.width).filter(|&i| self.bit(i)).count() as u32
    }

    /// `(value + 1) mod 2^n`.
    pub fn wrap_inc(&self) -> Self {
        Word {
            width: self.width,
            value: self.value.wrapping_add(&T::one()) & mask::<T>(self.width),
        }
    }

    /// `(value - 1) mod 2^n`.
    pub fn wrap_dec(&self) -> Self {
        Word {
            width: self.width,
            value: self.value.wrapping_sub(&T::one()) & mask::<T>(self.width),
        }
    }

    pub fn bit_and(&self, other: &Self) -> Result<Self, WordError> {
        self.same_width(other)?;
        Ok(self.and_unchecked(other))
    }

    pub fn bit_or(&self, other: &Self) -> Result<Self, WordError> {
        self.same_width(other)?;
        Ok(self.or_unchecked(other))
    }

    /// Bitwise complement within the width. Not part of the restricted
    /// instruction set; used by fault-injection fixtures.
    pub fn complement(&self) -> Self {
        Word {
            width: self.width,
            value: !self.value & mask::<T>(self.width),
        }
    }

    /// Flips the most significant bit.
    pub fn flip_msb(&self) -> Self {
        Word {
            width: self.width,
            value: self.value ^ (T::one() << (self.width - 1) as usize),
        }
    }

    pub(crate) fn and_unchecked(&self, other: &Self) -> Self {
        debug_assert_eq!(self.width, other.width);
        Word {
            width: self.width,
            value: self.value & other.value,
        }
    }

    pub(crate) fn or_unchecked(&self, other: &Self) -> Self {
        debug_assert_eq!(self.width, other.width);
        Word {
            width: self.width,
            value: self.value | other.value,
        }
    }

    /// The top `k` bits as an MSB-first string.
    pub fn msb_prefix(&self, k: u32) -> Result<String, WordError> {
        let bits = self.msb_prefix_value(k)?;
        Ok(render_bits(bits, k))
    }

    /// The top `k` bits as an integer in `0..2^k`.
    pub fn msb_prefix_value(&self, k: u32) -> Result<u64, WordError> {
        if k > self.width {
            return Err(WordError::PrefixTooLong { k, width: self.width });
        }
        if k == 0 {
            return Ok(0);
        }
        Ok(self.to_u64() >> (self.width - k))
    }

    /// All `n` bits, MSB first.
    pub fn to_bits(&self) -> String {
        render_bits(self.to_u64(), self.width)
    }

    /// Parses an MSB-first bit string; the width is the string length.
    pub fn from_bits(s: &str) -> Result<Self, WordError> {
        let width = s.len() as u32;
        if width == 0 || width > T::BITS {
            return Err(WordError::BadBitString(s.to_owned()));
        }
        let mut value = T::zero();
        for c in s.chars() {
            let b = match c {
                '0' => T::zero(),
                '1' => T::one(),
                _ => return Err(WordError::BadBitString(s.to_owned())),
            };
            value = (value << 1) | b;
        }
        Self::new(width, value)
    }

    fn same_width(&self, other: &Self) -> Result<(), WordError> {
        if self.width != other.width {
            return Err(WordError::WidthMismatch {
                left: self.width,
                right: other.width,
            });
        }
        Ok(())
    }
}

impl<T: Scalar> FromStr for Word<T> {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_bits(s)
    }
}

impl<T: Scalar> fmt::Display for Word<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bits())
    }
}

impl<T: Scalar> fmt::Debug for Word<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({}: {})", self.width, self.to_bits())
    }
}

/// Renders the low `k` bits of `bits`, MSB first.
pub fn render_bits(bits: u64, k: u32) -> String {
    (0..k)
        .rev()
        .map(|i| if (bits >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Low-`width` mask. `width` must already be validated.
pub(crate) fn mask<T: Scalar>(width: u32) -> T {
    T::max_value() >> (T::BITS - width) as usize
}

pub(crate) fn check_width<T: Scalar>(width: u32) -> Result<(), WordError> {
    let max = T::BITS.min(MAX_WIDTH);
    if width == 0 || width > max {
        return Err(WordError::WidthOutOfRange { width, max });
    }
    Ok(())
}
