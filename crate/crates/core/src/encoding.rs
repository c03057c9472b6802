//! Round-k encodings `E_k` of the iterated sumset `2^k A` into a codeword
//! register of `m_k = min{n, ⌈2^k log₂|A|⌉}` qubits.
//!
//! Both parties derive `E_k` from `(A, k)` alone: the domain is sorted and
//! codewords are assigned in that order starting from 0. When
//! `⌈2^k log₂|A|⌉ ≥ n` the encoding is the identity on `n` bits. Codewords
//! occupy the low-order `m_k` bits of register M.

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::fourier::{iterated_sumset, SupportSet};

/// `⌈2^k · log₂ s⌉`, exact for every `s ≥ 1`.
pub fn ceil_log2_pow(s: u64, k: u32) -> u64 {
    assert!(s >= 1);
    if s == 1 {
        return 0;
    }
    if s.is_power_of_two() {
        return u64::from(s.trailing_zeros()) << k;
    }
    // s^(2^k) by repeated squaring while it fits in u128.
    let mut x = u128::from(s);
    for _ in 0..k {
        match x.checked_mul(x) {
            Some(sq) => x = sq,
            // Not a power of two, so 2^k log2 s is irrational and the float
            // product is never within rounding of an integer here.
            None => return ((1u64 << k) as f64 * (s as f64).log2()).ceil() as u64,
        }
    }
    u64::from(128 - (x - 1).leading_zeros())
}

/// `m_k = min{n, ⌈2^k log₂|A|⌉}`.
pub fn codeword_width(support_size: usize, k: usize, n: usize) -> usize {
    let k = u32::try_from(k).unwrap_or(u32::MAX).min(63);
    ceil_log2_pow(support_size as u64, k).min(n as u64) as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct SumsetEncoding {
    round: usize,
    n: usize,
    width: usize,
    identity: bool,
    domain: SupportSet,
}

impl SumsetEncoding {
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// `m_k`.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// `2^k A`.
    pub fn domain(&self) -> &SupportSet {
        &self.domain
    }

    /// Number of codewords in use.
    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    fn outside(&self, alpha: BitVector) -> Error {
        Error::OutsideDomain {
            alpha: alpha.to_string(),
            round: self.round,
        }
    }

    /// `E_k(α)`.
    pub fn encode(&self, alpha: BitVector) -> Result<u64> {
        if alpha.arity() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                found: alpha.arity(),
            });
        }
        match self.domain.position(alpha.bits()) {
            Some(_) if self.identity => Ok(u64::from(alpha.bits())),
            Some(i) => Ok(i as u64),
            None => Err(self.outside(alpha)),
        }
    }

    /// `E_k^{-1}`.
    pub fn decode(&self, codeword: u64) -> Result<BitVector> {
        self.try_decode(codeword).ok_or(Error::CodewordOutOfRange {
            codeword,
            round: self.round,
            size: self.domain.len(),
        })
    }

    pub(crate) fn try_decode(&self, codeword: u64) -> Option<BitVector> {
        if self.identity {
            let alpha = BitVector::new(self.n, u32::try_from(codeword).ok()?).ok()?;
            self.domain.contains(alpha).then_some(alpha)
        } else {
            let raw = *self.domain.raw().get(usize::try_from(codeword).ok()?)?;
            Some(BitVector::from_index(self.n, raw as usize))
        }
    }

    /// Total permutation of `[0, 2^n)` extending codeword → α: codewords map
    /// to their characters, the remaining indices map in increasing order
    /// onto the characters outside the domain.
    pub fn decode_permutation(&self) -> Vec<u32> {
        let size = 1usize << self.n;
        if self.identity {
            return (0..size as u32).collect();
        }
        let domain = self.domain.raw();
        let mut perm = Vec::with_capacity(size);
        perm.extend_from_slice(domain);
        let mut next = 0usize;
        for alpha in 0..size as u32 {
            if next < domain.len() && domain[next] == alpha {
                next += 1;
            } else {
                perm.push(alpha);
            }
        }
        perm
    }
}

/// Builds `E_k` over `2^k A`.
pub fn build_encoding(a: &SupportSet, k: usize, n: usize) -> Result<SumsetEncoding> {
    if a.is_empty() {
        return Err(Error::Precondition("encoding needs a nonempty support".into()));
    }
    if a.arity() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            found: a.arity(),
        });
    }
    let kk = u32::try_from(k).unwrap_or(u32::MAX).min(63);
    let uncapped = ceil_log2_pow(a.len() as u64, kk);
    let identity = uncapped >= n as u64;
    let width = uncapped.min(n as u64) as usize;
    let domain = iterated_sumset(a, k);
    if domain.len() > 1usize << width {
        return Err(Error::Invariant(format!(
            "|2^{k} A| = {} exceeds 2^{width}",
            domain.len()
        )));
    }
    Ok(SumsetEncoding {
        round: k,
        n,
        width,
        identity,
        domain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, elems: &[&str]) -> SupportSet {
        SupportSet::new(n, elems.iter().map(|s| s.parse().unwrap())).unwrap()
    }

    #[test]
    fn ceil_log2_pow_values() {
        assert_eq!(ceil_log2_pow(1, 5), 0);
        assert_eq!(ceil_log2_pow(4, 0), 2);
        assert_eq!(ceil_log2_pow(4, 1), 4);
        assert_eq!(ceil_log2_pow(3, 0), 2);
        assert_eq!(ceil_log2_pow(3, 1), 4); // 9 -> 4 bits
        assert_eq!(ceil_log2_pow(3, 2), 7); // 81 -> 7 bits
        assert_eq!(ceil_log2_pow(5, 3), 19); // 390625 -> 19 bits
        // Past u128 the float path takes over: 2^10 * log2(3) = 1623.0016...
        assert_eq!(ceil_log2_pow(3, 10), 1624);
    }

    #[test]
    fn singleton_support() {
        let a = set(3, &["101"]);
        let e0 = build_encoding(&a, 0, 3).unwrap();
        assert_eq!(e0.width(), 0);
        assert_eq!(e0.domain(), &a);
        assert_eq!(e0.encode("101".parse().unwrap()).unwrap(), 0);
        for k in 1..3 {
            let e = build_encoding(&a, k, 3).unwrap();
            assert_eq!(e.width(), 0);
            assert_eq!(e.domain(), &set(3, &["000"]));
            assert_eq!(e.decode(0).unwrap(), BitVector::zero(3));
        }
    }

    #[test]
    fn full_support_is_identity() {
        let e = build_encoding(&SupportSet::full(2), 0, 2).unwrap();
        assert_eq!(e.width(), 2);
        assert!(e.is_identity());
        for alpha in BitVector::all(2) {
            assert_eq!(e.encode(alpha).unwrap(), u64::from(alpha.bits()));
            assert_eq!(e.decode(u64::from(alpha.bits())).unwrap(), alpha);
        }
    }

    #[test]
    fn two_point_support_round_one() {
        let a = set(4, &["0001", "0010"]);
        let e = build_encoding(&a, 1, 4).unwrap();
        assert_eq!(e.domain(), &set(4, &["0000", "0011"]));
        assert_eq!(e.width(), 2);
        assert!(!e.is_identity());
        assert_eq!(e.encode("0000".parse().unwrap()).unwrap(), 0);
        assert_eq!(e.encode("0011".parse().unwrap()).unwrap(), 1);
        assert_eq!(e.decode(1).unwrap(), "0011".parse().unwrap());
    }

    #[test]
    fn encode_decode_errors() {
        let e = build_encoding(&set(4, &["0001", "0010"]), 1, 4).unwrap();
        assert!(matches!(e.encode("0001".parse().unwrap()), Err(Error::OutsideDomain { .. })));
        assert!(matches!(e.decode(2), Err(Error::CodewordOutOfRange { .. })));
        assert!(build_encoding(&set(2, &[]), 0, 2).is_err());
    }

    #[test]
    fn round_trip_every_codeword() {
        let a = set(5, &["00011", "01100", "10101"]);
        for k in 0..4 {
            let e = build_encoding(&a, k, 5).unwrap();
            assert!(e.width() <= 5);
            for alpha in e.domain().iter() {
                assert_eq!(e.decode(e.encode(alpha).unwrap()).unwrap(), alpha);
            }
            let mut perm = e.decode_permutation();
            perm.sort_unstable();
            assert_eq!(perm, (0..32).collect::<Vec<u32>>());
        }
    }
}
