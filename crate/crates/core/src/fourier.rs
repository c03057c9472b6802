//! Walsh-Hadamard transform, spectrum norms and supports, sumsets, and the
//! linear program for the approximate Fourier ℓ1-norm.

use std::collections::BTreeMap;

use crate::bits::BitVector;
use crate::boolean::{BooleanFunction, RealFunction};
use crate::error::{Error, Result};
use crate::lp;

/// Coefficients with magnitude below this are treated as zero.
pub const SUPPORT_TOLERANCE: f64 = 1e-9;

/// Unnormalized in-place butterfly: `v <- H^{⊗n} v` with `±1` entries.
pub fn fwht_in_place(v: &mut [f64]) {
    let len = v.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in v.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

/// Anything with a real truth table.
pub trait RealValued {
    fn arity(&self) -> usize;
    fn real_values(&self) -> Vec<f64>;
}

impl RealValued for BooleanFunction {
    fn arity(&self) -> usize {
        BooleanFunction::arity(self)
    }

    fn real_values(&self) -> Vec<f64> {
        self.values().iter().map(|&v| f64::from(v)).collect()
    }
}

impl RealValued for RealFunction {
    fn arity(&self) -> usize {
        RealFunction::arity(self)
    }

    fn real_values(&self) -> Vec<f64> {
        self.values().to_vec()
    }
}

/// Sparse Fourier spectrum, entries sorted by character.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSpectrum {
    n: usize,
    entries: Vec<(u32, f64)>,
}

impl FourierSpectrum {
    /// From a dense coefficient vector, dropping coefficients below
    /// [`SUPPORT_TOLERANCE`].
    pub fn from_dense(n: usize, coeffs: &[f64]) -> Self {
        assert_eq!(coeffs.len(), 1 << n);
        let entries = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() >= SUPPORT_TOLERANCE)
            .map(|(a, &c)| (a as u32, c))
            .collect();
        Self { n, entries }
    }

    pub fn from_map(n: usize, coeffs: &BTreeMap<BitVector, f64>) -> Result<Self> {
        let mut entries = Vec::with_capacity(coeffs.len());
        for (alpha, &c) in coeffs {
            if alpha.arity() != n {
                return Err(Error::ArityMismatch {
                    expected: n,
                    found: alpha.arity(),
                });
            }
            if !c.is_finite() {
                return Err(Error::NonFinite(alpha.index()));
            }
            if c.abs() >= SUPPORT_TOLERANCE {
                entries.push((alpha.bits(), c));
            }
        }
        Ok(Self { n, entries })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = (BitVector, f64)> + '_ {
        self.entries
            .iter()
            .map(move |&(a, c)| (BitVector::from_index(self.n, a as usize), c))
    }

    pub(crate) fn raw_entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn get(&self, alpha: BitVector) -> f64 {
        self.entries
            .binary_search_by_key(&alpha.bits(), |&(a, _)| a)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; 1 << self.n];
        for &(a, c) in &self.entries {
            dense[a as usize] = c;
        }
        dense
    }

    pub fn support(&self) -> SupportSet {
        SupportSet {
            n: self.n,
            elements: self.entries.iter().map(|&(a, _)| a).collect(),
        }
    }

    /// `‖ĝ‖₀`.
    pub fn l0(&self) -> usize {
        self.entries.len()
    }

    /// `‖ĝ‖₁`.
    pub fn l1(&self) -> f64 {
        self.entries.iter().map(|(_, c)| c.abs()).sum()
    }

    /// `‖ĝ‖₂`.
    pub fn l2(&self) -> f64 {
        self.entries.iter().map(|(_, c)| c * c).sum::<f64>().sqrt()
    }

    /// `alpha_bits,coefficient` rows, sorted by alpha.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha_bits,coefficient\n");
        for (alpha, c) in self.iter() {
            out.push_str(&format!("{alpha},{c:.17e}\n"));
        }
        out
    }
}

/// `ĝ(α) = 2^{-n} Σ_x g(x) χ_α(x)` for every α, in O(n 2^n).
pub fn wht<F: RealValued + ?Sized>(f: &F) -> FourierSpectrum {
    let n = f.arity();
    let mut v = f.real_values();
    fwht_in_place(&mut v);
    let scale = 1.0 / (1u64 << n) as f64;
    v.iter_mut().for_each(|c| *c *= scale);
    FourierSpectrum::from_dense(n, &v)
}

/// Evaluates `Σ_α ĝ(α) χ_α` at every point.
pub fn inverse_wht(s: &FourierSpectrum) -> RealFunction {
    let mut v = s.to_dense();
    fwht_in_place(&mut v);
    RealFunction::new(s.n, v).expect("finite spectrum gives finite values")
}

/// Sorted, duplicate-free set of characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    n: usize,
    elements: Vec<u32>,
}

impl SupportSet {
    pub fn new(n: usize, elements: impl IntoIterator<Item = BitVector>) -> Result<Self> {
        let mut raw = Vec::new();
        for e in elements {
            if e.arity() != n {
                return Err(Error::ArityMismatch {
                    expected: n,
                    found: e.arity(),
                });
            }
            raw.push(e.bits());
        }
        raw.sort_unstable();
        raw.dedup();
        Ok(Self { n, elements: raw })
    }

    pub fn full(n: usize) -> Self {
        Self {
            n,
            elements: (0..1u32 << n).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.elements.len() == 1 << self.n
    }

    pub fn contains(&self, alpha: BitVector) -> bool {
        self.position(alpha.bits()).is_some()
    }

    pub(crate) fn position(&self, raw: u32) -> Option<usize> {
        self.elements.binary_search(&raw).ok()
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = BitVector> + '_ {
        self.elements
            .iter()
            .map(move |&a| BitVector::from_index(self.n, a as usize))
    }

    pub fn is_subset(&self, other: &SupportSet) -> bool {
        self.elements.iter().all(|&a| other.position(a).is_some())
    }
}

/// `A + B = {α ⊕ β}`.
pub fn sumset(a: &SupportSet, b: &SupportSet) -> SupportSet {
    assert_eq!(a.n, b.n, "sumset of sets with different arity");
    let n = a.n;
    if a.is_full() || b.is_full() {
        return if a.is_empty() || b.is_empty() {
            SupportSet { n, elements: vec![] }
        } else {
            SupportSet::full(n)
        };
    }
    let pairs = a.len().saturating_mul(b.len());
    let elements = if pairs > 1 << n {
        let mut hit = vec![false; 1 << n];
        for &x in &a.elements {
            for &y in &b.elements {
                hit[(x ^ y) as usize] = true;
            }
        }
        hit.iter()
            .enumerate()
            .filter(|(_, &h)| h)
            .map(|(i, _)| i as u32)
            .collect()
    } else {
        let mut v: Vec<u32> = a
            .elements
            .iter()
            .flat_map(|&x| b.elements.iter().map(move |&y| x ^ y))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    SupportSet { n, elements }
}

/// The `2^k`-fold sumset, computed by `k` doublings `S <- S + S`.
pub fn iterated_sumset(a: &SupportSet, k: usize) -> SupportSet {
    let mut s = a.clone();
    for _ in 0..k {
        let next = sumset(&s, &s);
        if next == s {
            break;
        }
        s = next;
    }
    s
}

/// Result of [`approx_l1`].
#[derive(Clone, Debug)]
pub struct L1Approximation {
    pub g: RealFunction,
    /// `‖ĝ‖₁` of the returned approximator.
    pub value: f64,
}

/// Largest arity accepted by [`approx_l1`].
pub const APPROX_L1_MAX_ARITY: usize = 8;

/// `‖f̂‖₁,ε = min{‖ĝ‖₁ : ‖f - g‖_∞ ≤ ε}` via the linear program
///
/// ```text
/// minimize Σ_α (p_α + q_α)
/// subject to |Σ_α (p_α - q_α) χ_α(x) - f(x)| ≤ ε  for all x,   p, q ≥ 0.
/// ```
pub fn approx_l1(f: &BooleanFunction, eps: f64) -> Result<L1Approximation> {
    let n = f.arity();
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Precondition(format!("eps must lie in [0, 1), got {eps}")));
    }
    if n > APPROX_L1_MAX_ARITY {
        return Err(Error::Precondition(format!(
            "approx_l1 supports n <= {APPROX_L1_MAX_ARITY}, got {n}"
        )));
    }
    if eps == 0.0 {
        // Only g = f is feasible.
        let g = f.to_real();
        let value = wht(&g).l1();
        return Ok(L1Approximation { g, value });
    }

    let size = 1usize << n;
    let vars = 2 * size;
    let mut a = Vec::with_capacity(2 * size);
    let mut b = Vec::with_capacity(2 * size);
    for x in 0..size {
        let row: Vec<f64> = (0..size)
            .map(|alpha| crate::bits::chi(alpha, x))
            .chain((0..size).map(|alpha| -crate::bits::chi(alpha, x)))
            .collect();
        let fx = f64::from(f.values()[x]);
        b.push(fx + eps);
        a.push(row.clone());
        b.push(eps - fx);
        a.push(row.into_iter().map(|v| -v).collect());
    }
    let c = vec![1.0; vars];
    let solution = lp::minimize(&c, &a, &b)?;

    let coeffs: Vec<f64> = (0..size)
        .map(|alpha| solution.x[alpha] - solution.x[size + alpha])
        .collect();
    let spectrum = FourierSpectrum::from_dense(n, &coeffs);
    let g = inverse_wht(&spectrum);
    let violation = g
        .values()
        .iter()
        .zip(f.values())
        .map(|(gx, &fx)| (gx - f64::from(fx)).abs())
        .fold(0.0, f64::max);
    if violation > eps + 1e-7 {
        return Err(Error::Invariant(format!(
            "LP solution violates the sup-norm constraint: {violation} > {eps}"
        )));
    }
    Ok(L1Approximation {
        value: spectrum.l1(),
        g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and2() -> BooleanFunction {
        BooleanFunction::from_signs(2, vec![1, 1, 1, -1]).unwrap()
    }

    fn set(n: usize, elems: &[&str]) -> SupportSet {
        SupportSet::new(n, elems.iter().map(|s| s.parse().unwrap())).unwrap()
    }

    #[test]
    fn wht_of_character() {
        let s = BitVector::new(3, 0b101).unwrap();
        let f = BooleanFunction::from_fn(3, |z| s.character(z)).unwrap();
        let spec = wht(&f);
        assert_eq!(spec.l0(), 1);
        assert!((spec.get(s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wht_of_and2() {
        let spec = wht(&and2());
        assert_eq!(spec.to_dense(), vec![0.5, 0.5, 0.5, -0.5]);
    }

    #[test]
    fn wht_of_constant() {
        let spec = wht(&BooleanFunction::constant(4, 1).unwrap());
        assert_eq!(spec.l0(), 1);
        assert_eq!(spec.get(BitVector::zero(4)), 1.0);
    }

    #[test]
    fn inverse_wht_examples() {
        let mut m = BTreeMap::new();
        m.insert(BitVector::zero(3), 1.0);
        let ones = inverse_wht(&FourierSpectrum::from_map(3, &m).unwrap());
        assert!(ones.values().iter().all(|&v| v == 1.0));

        let mut m = BTreeMap::new();
        m.insert("01".parse().unwrap(), 0.5);
        m.insert("10".parse().unwrap(), -0.5);
        let g = inverse_wht(&FourierSpectrum::from_map(2, &m).unwrap());
        assert_eq!(g.values(), &[0.0, -1.0, 1.0, 0.0]);
    }

    #[test]
    fn sumset_examples() {
        assert_eq!(sumset(&set(3, &["101"]), &set(3, &["101"])), set(3, &["000"]));
        assert_eq!(
            sumset(&set(2, &["01", "10"]), &set(2, &["01", "10"])),
            set(2, &["00", "11"])
        );
        let a = set(4, &["0001", "0110", "1010"]);
        let aa = sumset(&a, &a);
        assert!(aa.len() <= a.len() * a.len() && aa.len() <= 16);
    }

    #[test]
    fn iterated_sumset_examples() {
        let a = set(3, &["001", "110"]);
        assert_eq!(iterated_sumset(&a, 0), a);
        assert_eq!(iterated_sumset(&SupportSet::full(3), 3), SupportSet::full(3));
        let b = set(3, &["000", "011"]);
        assert_eq!(iterated_sumset(&b, 1), b);
    }

    #[test]
    fn csv_dump() {
        let csv = wht(&and2()).to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "alpha_bits,coefficient");
        assert!(lines[4].starts_with("11,-5"));
    }

    #[test]
    fn approx_l1_zero_eps_is_exact() {
        let r = approx_l1(&and2(), 0.0).unwrap();
        assert_eq!(r.g, and2().to_real());
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn approx_l1_character() {
        let s = BitVector::new(3, 0b011).unwrap();
        let f = BooleanFunction::from_fn(3, |z| s.character(z)).unwrap();
        let r = approx_l1(&f, 0.1).unwrap();
        assert!((r.value - 0.9).abs() < 1e-6);
        for z in BitVector::all(3) {
            assert!((r.g.value(z) - 0.9 * f64::from(f.value(z))).abs() < 1e-6);
        }
    }

    #[test]
    fn approx_l1_rejects_bad_eps() {
        assert!(approx_l1(&and2(), 1.0).is_err());
        assert!(approx_l1(&and2(), -0.1).is_err());
    }
}
