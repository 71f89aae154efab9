//! Materialized membership windows.
//!
//! A `Window` is the evaluation of a set descriptor on an integer interval
//! `[lo, hi]` (inclusive), stored one bit per position. Bit `i` of the packed
//! payload is the membership of `lo + i`; bytes are little-endian in the bit
//! index. The JSON form is `{"lo": .., "hi": .., "bits": "<base64>"}` with
//! unused trailing bits forced to zero so equal windows serialize identically.

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    lo: i64,
    hi: i64,
    bits: Vec<u8>,
}

impl Window {
    /// Empty (all positions non-members) window on `[lo, hi]`.
    pub fn empty(lo: i64, hi: i64) -> Result<Self> {
        let len = Self::span(lo, hi)?;
        Ok(Window { lo, hi, bits: vec![0u8; len.div_ceil(8)] })
    }

    fn span(lo: i64, hi: i64) -> Result<usize> {
        if hi < lo {
            return Err(Error::Invalid(format!("window bounds out of order: [{lo}, {hi}]")));
        }
        let len = (hi as i128) - (lo as i128) + 1;
        usize::try_from(len).map_err(|_| Error::WindowTooLarge { lo, hi, cap: usize::MAX as u64 })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false // a window always spans at least one position
    }

    pub fn contains_pos(&self, z: i64) -> bool {
        z >= self.lo && z <= self.hi
    }

    /// Membership of the absolute position `z`; false outside the window.
    pub fn get(&self, z: i64) -> bool {
        if !self.contains_pos(z) {
            return false;
        }
        self.get_idx((z - self.lo) as usize)
    }

    pub fn get_idx(&self, i: usize) -> bool {
        (self.bits[i >> 3] >> (i & 7)) & 1 == 1
    }

    pub fn set_idx(&mut self, i: usize, v: bool) {
        if v {
            self.bits[i >> 3] |= 1 << (i & 7);
        } else {
            self.bits[i >> 3] &= !(1 << (i & 7));
        }
    }

    pub fn set(&mut self, z: i64, v: bool) {
        debug_assert!(self.contains_pos(z));
        self.set_idx((z - self.lo) as usize, v)
    }

    /// Set every position of `[a, b] ∩ [lo, hi]`.
    pub fn set_range(&mut self, a: i128, b: i128, v: bool) {
        let a = a.max(self.lo as i128);
        let b = b.min(self.hi as i128);
        let mut i = a;
        while i <= b {
            self.set_idx((i - self.lo as i128) as usize, v);
            i += 1;
        }
    }

    pub fn count_members(&self) -> usize {
        // Trailing bits are maintained zero, so popcount over bytes is exact.
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn members(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len()).filter(|&i| self.get_idx(i)).map(move |i| self.lo + i as i64)
    }

    /// In-place pointwise combination with another window over the same range.
    pub fn combine(&mut self, other: &Window, op: impl Fn(bool, bool) -> bool) {
        debug_assert_eq!((self.lo, self.hi), (other.lo, other.hi));
        for i in 0..self.len() {
            let v = op(self.get_idx(i), other.get_idx(i));
            self.set_idx(i, v);
        }
    }

    pub fn invert(&mut self) {
        for b in &mut self.bits {
            *b = !*b;
        }
        self.clear_tail();
    }

    fn clear_tail(&mut self) {
        let len = self.len();
        if !len.is_multiple_of(8) {
            let last = self.bits.len() - 1;
            self.bits[last] &= (1u8 << (len % 8)) - 1;
        }
    }

    pub fn from_fn(lo: i64, hi: i64, mut f: impl FnMut(i64) -> bool) -> Result<Self> {
        let mut w = Window::empty(lo, hi)?;
        for i in 0..w.len() {
            if f(lo + i as i64) {
                w.set_idx(i, true);
            }
        }
        Ok(w)
    }
}

#[derive(Serialize, Deserialize)]
struct WindowRepr {
    lo: i64,
    hi: i64,
    bits: String,
}

impl Serialize for Window {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        WindowRepr { lo: self.lo, hi: self.hi, bits: B64.encode(&self.bits) }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = WindowRepr::deserialize(de)?;
        let bits = B64.decode(repr.bits.as_bytes()).map_err(D::Error::custom)?;
        let len = Window::span(repr.lo, repr.hi).map_err(D::Error::custom)?;
        if bits.len() != len.div_ceil(8) {
            return Err(D::Error::custom(format!(
                "bit payload has {} bytes, window needs {}",
                bits.len(),
                len.div_ceil(8)
            )));
        }
        let mut w = Window { lo: repr.lo, hi: repr.hi, bits };
        w.clear_tail();
        Ok(w)
    }
}
