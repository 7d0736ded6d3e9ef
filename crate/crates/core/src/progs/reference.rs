//! Native popcounts for the richer operation sets: the shift-and-add tree
//! (addition, shift, AND) and HAKMEM item 169 (with a remainder by 63).
//! Both serve as oracles and as operation-count references.

use crate::word::{Scalar, Word, WordError};

/// Word operations performed by [`hakmem_popcount`].
pub const HAKMEM_OPS: u32 = 10;

/// Shift-and-add tree popcount.
pub fn broadword_popcount<T: Scalar>(x: &Word<T>) -> u32 {
    broadword_popcount_counted(x).0
}

/// Shift-and-add tree popcount, also returning the number of word
/// operations (shifts, ANDs, additions) it used: `11 + 2·(log2(B) − 3) + 1`
/// for a `B`-bit storage type.
pub fn broadword_popcount_counted<T: Scalar>(x: &Word<T>) -> (u32, u32) {
    let all = T::max_value();
    // 0x55.., 0x33.., 0x0f..
    let m1 = all / T::from(3).unwrap();
    let m2 = all / T::from(5).unwrap();
    let m4 = all / T::from(17).unwrap();
    let mut v = x.value();
    let mut ops = 0;

    v = (v & m1).wrapping_add(&((v >> 1) & m1));
    ops += 4;
    v = (v & m2).wrapping_add(&((v >> 2) & m2));
    ops += 4;
    v = v.wrapping_add(&(v >> 4)) & m4;
    ops += 3;
    let mut shift = 8;
    while shift < T::BITS as usize {
        v = v.wrapping_add(&(v >> shift));
        ops += 2;
        shift *= 2;
    }
    let count = (v & T::from(0xff).unwrap()).to_u32().unwrap();
    (count, ops + 1)
}

/// HAKMEM item 169 on a 32-bit word: per-octal-digit counts by two
/// subtractions, pairs of digits summed, then the remainder by 63 adds the
/// six-bit fields together.
pub fn hakmem_popcount<T: Scalar>(x: &Word<T>) -> Result<u32, WordError> {
    if x.width() != 32 {
        return Err(WordError::UnsupportedWidth {
            expected: 32,
            actual: x.width(),
        });
    }
    let n = x.to_u64() as u32;
    let tmp = n - ((n >> 1) & 0o33333333333) - ((n >> 2) & 0o11111111111);
    Ok(((tmp + (tmp >> 3)) & 0o30707070707) % 63)
}
