//! Boolean and real functions on `{0,1}^n`, GF(2) degree, and derivatives.
//!
//! The `±1` view is the protocol-facing representation (`TRUE ↦ -1`); the
//! `0/1` view only exists for GF(2) algebra.

use crate::bits::{BitVector, MAX_ARITY};
use crate::error::{Error, Result};

fn check_arity(n: usize, len: usize) -> Result<()> {
    if n > MAX_ARITY {
        return Err(Error::ArityTooLarge(n));
    }
    if len != 1usize << n {
        return Err(Error::TableLength {
            expected: 1 << n,
            found: len,
        });
    }
    Ok(())
}

/// A total function `{0,1}^n -> {+1,-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: usize,
    values: Vec<i8>,
}

impl BooleanFunction {
    pub fn from_signs(n: usize, values: Vec<i8>) -> Result<Self> {
        check_arity(n, values.len())?;
        if let Some(&bad) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::NotSign(bad as i64));
        }
        Ok(Self { n, values })
    }

    /// From a `0/1` truth table; `1` (TRUE) becomes `-1`.
    pub fn from_zero_one(n: usize, bits: &[u8]) -> Result<Self> {
        check_arity(n, bits.len())?;
        let values = bits
            .iter()
            .map(|&b| match b {
                0 => Ok(1),
                1 => Ok(-1),
                other => Err(Error::Parse(format!("0/1 entry {other}"))),
            })
            .collect::<Result<_>>()?;
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(BitVector) -> i8) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::ArityTooLarge(n));
        }
        Self::from_signs(n, BitVector::all(n).map(&mut f).collect())
    }

    pub fn constant(n: usize, value: i8) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn value(&self, z: BitVector) -> i8 {
        assert_eq!(z.arity(), self.n, "arity mismatch");
        self.values[z.index()]
    }

    pub fn zero_one_view(&self) -> Vec<u8> {
        self.values.iter().map(|&v| u8::from(v == -1)).collect()
    }

    pub fn to_real(&self) -> RealFunction {
        RealFunction {
            n: self.n,
            values: self.values.iter().map(|&v| f64::from(v)).collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    /// Coefficients of the multilinear GF(2) polynomial of the `0/1` view.
    pub fn anf(&self) -> Vec<u8> {
        let mut table = self.zero_one_view();
        moebius_transform(&mut table);
        table
    }

    /// `f(x ⊕ y)`.
    pub fn evaluate_xor(&self, x: BitVector, y: BitVector) -> i8 {
        self.value(x ^ y)
    }
}

/// In-place GF(2) Möbius transform. It is its own inverse.
pub fn moebius_transform(table: &mut [u8]) {
    let len = table.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in table.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h ^= *l;
            }
        }
        half *= 2;
    }
}

/// GF(2) degree; constant functions have degree 0.
pub fn gf2_degree(f: &BooleanFunction) -> u32 {
    f.anf()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 1)
        .map(|(i, _)| i.count_ones())
        .max()
        .unwrap_or(0)
}

/// A real-valued function `{0,1}^n -> R` with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct RealFunction {
    n: usize,
    values: Vec<f64>,
}

impl RealFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_arity(n, values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { n, values })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, z: BitVector) -> f64 {
        assert_eq!(z.arity(), self.n, "arity mismatch");
        self.values[z.index()]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Mean of the squared values.
    pub fn mean_square(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64
    }
}

/// Functions that can be differentiated along a direction:
/// `Δ_t h(x) = h(x) h(x ⊕ t)`.
pub trait Derivative: Sized {
    fn derivative(&self, t: BitVector) -> Self;

    /// Left fold of [`Derivative::derivative`] in round order.
    fn iterated_derivative(&self, ts: &[BitVector]) -> Self
    where
        Self: Clone,
    {
        ts.iter().fold(self.clone(), |h, &t| h.derivative(t))
    }
}

impl Derivative for BooleanFunction {
    fn derivative(&self, t: BitVector) -> Self {
        assert_eq!(t.arity(), self.n, "arity mismatch");
        let shift = t.index();
        let values = (0..self.values.len())
            .map(|x| self.values[x] * self.values[x ^ shift])
            .collect();
        let out = Self { n: self.n, values };
        debug_assert!(
            t.is_zero() || self.is_constant() || gf2_degree(&out) < gf2_degree(self),
            "derivative failed to lower the degree"
        );
        out
    }
}

impl Derivative for RealFunction {
    fn derivative(&self, t: BitVector) -> Self {
        assert_eq!(t.arity(), self.n, "arity mismatch");
        let shift = t.index();
        let values = (0..self.values.len())
            .map(|x| self.values[x] * self.values[x ^ shift])
            .collect();
        Self { n: self.n, values }
    }
}

pub fn derivative<F: Derivative>(f: &F, t: BitVector) -> F {
    f.derivative(t)
}

pub fn iterated_derivative<F: Derivative + Clone>(f: &F, ts: &[BitVector]) -> F {
    f.iterated_derivative(ts)
}
