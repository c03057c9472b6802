//! Fixed-width bit strings over GF(2).
//!
//! Index convention: the variable `z1` is the most significant bit of the
//! integer index, so the bit string `"100"` (n = 3) is index 4. Characters
//! `chi_alpha(x) = (-1)^{alpha . x}` do not depend on this choice.

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported arity.
pub const MAX_ARITY: usize = 24;

/// An element of GF(2)^n, also used as an index into truth tables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    n: u8,
    bits: u32,
}

impl BitVector {
    pub fn new(n: usize, bits: u32) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::ArityTooLarge(n));
        }
        if n < 32 && bits >> n != 0 {
            return Err(Error::Parse(format!("value {bits} does not fit in {n} bits")));
        }
        Ok(Self { n: n as u8, bits })
    }

    /// Builds from an index known to be in range. Panics otherwise.
    pub fn from_index(n: usize, index: usize) -> Self {
        assert!(n <= MAX_ARITY && index < 1usize << n, "index {index} out of range for n={n}");
        Self {
            n: n as u8,
            bits: index as u32,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_index(n, 0)
    }

    pub fn arity(self) -> usize {
        self.n as usize
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn index(self) -> usize {
        self.bits as usize
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Hamming weight.
    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    /// Inner product over GF(2).
    pub fn dot(self, other: Self) -> bool {
        (self.bits & other.bits).count_ones() & 1 == 1
    }

    /// `chi_self(x) = (-1)^{self . x}`.
    pub fn character(self, x: Self) -> i8 {
        if self.dot(x) {
            -1
        } else {
            1
        }
    }

    /// Value of variable `z_i` (1-based, `z1` most significant).
    pub fn var(self, i: usize) -> bool {
        debug_assert!(i >= 1 && i <= self.arity());
        (self.bits >> (self.arity() - i)) & 1 == 1
    }

    /// All `2^n` vectors in index order.
    pub fn all(n: usize) -> impl Iterator<Item = Self> {
        (0..1usize << n).map(move |i| Self::from_index(n, i))
    }
}

/// `chi_alpha(x)` on raw indices.
#[inline]
pub(crate) fn chi(alpha: usize, x: usize) -> f64 {
    if (alpha & x).count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

impl BitXor for BitVector {
    type Output = Self;

    fn bitxor(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "xor of bit vectors with different arity");
        Self {
            n: self.n,
            bits: self.bits ^ rhs.bits,
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.arity() {
            f.write_str(if self.var(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    /// Parses a bit string, first character is `z1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let n = s.len();
        if n > MAX_ARITY {
            return Err(Error::ArityTooLarge(n));
        }
        let mut bits = 0u32;
        for c in s.chars() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(Error::Parse(format!("invalid bit string {s:?}"))),
            }
        }
        Self::new(n, bits)
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
