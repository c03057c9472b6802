//! Exact state-vector simulation of the one-qubit register C joined with
//! the n-qubit register M.
//!
//! Basis index is `c · 2^n + m`. Every unitary the protocol applies has real
//! matrix entries, so amplitudes are stored as `f64`.

use rand::Rng;

use crate::bits::BitVector;
use crate::boolean::{BooleanFunction, RealFunction};
use crate::error::{Error, Result};
use crate::encoding::SumsetEncoding;
use crate::fourier::{fwht_in_place, FourierSpectrum};

/// Norm tolerance for state validation.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Amplitudes above this on a non-codeword index are a protocol bug.
pub const STRAY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    n: usize,
    amps: Vec<f64>,
}

impl QuantumState {
    pub fn from_amplitudes(n: usize, amps: Vec<f64>) -> Result<Self> {
        if amps.len() != 2usize << n {
            return Err(Error::TableLength {
                expected: 2 << n,
                found: amps.len(),
            });
        }
        if let Some(i) = amps.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let state = Self { n, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Invariant(format!("state norm² {norm} is not 1")));
        }
        Ok(state)
    }

    /// Qubits in register M.
    pub fn register_width(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub fn amplitude(&self, c: usize, m: usize) -> f64 {
        self.amps[(c << self.n) + m]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }

    fn split(&mut self) -> (&mut [f64], &mut [f64]) {
        let half = 1usize << self.n;
        self.amps.split_at_mut(half)
    }

    /// `(|0⟩|0⟩ + |1⟩ Σ_α ĝ(α) χ_α(x) |E_k(α)⟩ / ‖ĝ‖₂) / √2`.
    pub fn prepare(gk: &FourierSpectrum, e: &SumsetEncoding, x: BitVector) -> Result<Self> {
        let n = e.arity();
        if gk.arity() != n || x.arity() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                found: gk.arity(),
            });
        }
        let l2 = gk.l2();
        if l2 <= 0.0 {
            return Err(Error::EmptySpectrum);
        }
        let size = 1usize << n;
        let mut amps = vec![0.0; 2 * size];
        amps[0] = std::f64::consts::FRAC_1_SQRT_2;
        for (alpha, c) in gk.iter() {
            let codeword = e.encode(alpha)? as usize;
            amps[size + codeword] =
                c * f64::from(alpha.character(x)) / (std::f64::consts::SQRT_2 * l2);
        }
        Ok(Self { n, amps })
    }

    /// Circuit-style preparation for a Boolean round function: `|+⟩_C|0⟩_M`,
    /// controlled `H^{⊗n}`, phase `f^{(k)}(z)`, controlled `H^{⊗n}`, phase
    /// `χ_α(x)`, then the encoding permutation.
    pub fn prepare_circuit(
        oracle: &mut DerivativeOracle<'_>,
        e: &SumsetEncoding,
        x: BitVector,
        ledger: &mut ResourceLedger,
    ) -> Result<Self> {
        let n = e.arity();
        if oracle.arity() != n || x.arity() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                found: oracle.arity(),
            });
        }
        let size = 1usize << n;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![0.0; 2 * size];
        amps[0] = h;
        amps[size] = h;
        ledger.single_qubit_gates += 1;
        let mut state = Self { n, amps };
        let inv_sqrt = 1.0 / (size as f64).sqrt();
        {
            let (_, one) = state.split();
            fwht_in_place(one);
            one.iter_mut().for_each(|a| *a *= inv_sqrt);
            ledger.controlled_hadamards += n as u64;

            let phases = oracle.phase_table();
            ledger.oracle_queries += oracle.queries_per_application();
            ledger.classical_evaluations += oracle.queries_per_application() * size as u64;
            one.iter_mut().zip(&phases).for_each(|(a, &p)| *a *= f64::from(p));

            fwht_in_place(one);
            one.iter_mut().for_each(|a| *a *= inv_sqrt);
            ledger.controlled_hadamards += n as u64;

            for (alpha, a) in one.iter_mut().enumerate() {
                if (alpha as u32 & x.bits()).count_ones() & 1 == 1 {
                    *a = -*a;
                }
            }
            ledger.phase_gates += u64::from(x.weight());
        }
        state.apply_encode(e)?;
        Ok(state)
    }

    /// `|α⟩ → |E_k(α)⟩` on the `|1⟩_C` branch.
    fn apply_encode(&mut self, e: &SumsetEncoding) -> Result<()> {
        if e.is_identity() {
            return self.check_domain(e);
        }
        let perm = e.decode_permutation();
        let (_, one) = self.split();
        let old = one.to_vec();
        for (codeword, &alpha) in perm.iter().enumerate() {
            if codeword >= e.len() && old[alpha as usize].abs() > STRAY_TOLERANCE {
                return Err(Error::OutsideDomain {
                    alpha: BitVector::from_index(e.arity(), alpha as usize).to_string(),
                    round: e.round(),
                });
            }
            one[codeword] = old[alpha as usize];
        }
        Ok(())
    }

    fn check_domain(&self, e: &SumsetEncoding) -> Result<()> {
        let size = 1usize << self.n;
        for (m, &a) in self.amps[size..].iter().enumerate() {
            if a.abs() > STRAY_TOLERANCE && e.try_decode(m as u64).is_none() {
                return Err(Error::StrayAmplitude {
                    index: size + m,
                    amplitude: a,
                });
            }
        }
        Ok(())
    }

    /// Bob's step: on `|1⟩_C`, `|E_k(α)⟩ → χ_α(y)|E_k(α)⟩`. Works on the full
    /// register or on the transmitted low `m_k` qubits.
    pub fn apply_bob_phase(&mut self, e: &SumsetEncoding, y: BitVector) -> Result<()> {
        if self.n < e.width() {
            return Err(Error::Precondition(format!(
                "register of {} qubits cannot hold {}-qubit codewords",
                self.n,
                e.width()
            )));
        }
        let size = 1usize << self.n;
        let (_, one) = self.split();
        for (m, a) in one.iter_mut().enumerate() {
            match e.try_decode(m as u64) {
                Some(alpha) => {
                    if alpha.dot(y) {
                        *a = -*a;
                    }
                }
                None if a.abs() > STRAY_TOLERANCE => {
                    return Err(Error::StrayAmplitude {
                        index: size + m,
                        amplitude: *a,
                    })
                }
                None => {}
            }
        }
        Ok(())
    }

    /// Alice's step: on `|1⟩_C`, `|E_k(α)⟩ → |α⟩`, extended to a total basis
    /// permutation by [`SumsetEncoding::decode_permutation`].
    pub fn apply_alice_decode(&mut self, e: &SumsetEncoding) -> Result<()> {
        if self.n != e.arity() {
            return Err(Error::ArityMismatch {
                expected: e.arity(),
                found: self.n,
            });
        }
        self.check_domain(e)?;
        if e.is_identity() {
            return Ok(());
        }
        let perm = e.decode_permutation();
        let (_, one) = self.split();
        let old = one.to_vec();
        for (codeword, &alpha) in perm.iter().enumerate() {
            one[alpha as usize] = old[codeword];
        }
        Ok(())
    }

    /// `H^{⊗n}` on register M in both branches of C.
    pub fn apply_qft_m(&mut self) {
        let scale = 1.0 / ((1u64 << self.n) as f64).sqrt();
        let (zero, one) = self.split();
        for branch in [zero, one] {
            fwht_in_place(branch);
            branch.iter_mut().for_each(|a| *a *= scale);
        }
    }

    /// Joint law of measuring M in the computational basis and C in the
    /// `{|+⟩, |−⟩}` basis, with `|+⟩ ↦ b = +1`.
    pub fn branch_distribution(&self) -> BranchDistribution {
        let size = 1usize << self.n;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut probs = Vec::with_capacity(2 * size);
        for t in 0..size {
            let (a0, a1) = (self.amps[t], self.amps[size + t]);
            probs.push((h * (a0 + a1)).powi(2));
            probs.push((h * (a0 - a1)).powi(2));
        }
        BranchDistribution { n: self.n, probs }
    }

    /// Samples `(t, b)` from [`QuantumState::branch_distribution`].
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> (BitVector, i8) {
        self.branch_distribution().sample(rng)
    }

    /// The sub-state on C and the low `width` qubits of M. Fails if any
    /// amplitude sits on the higher qubits.
    pub fn outgoing(&self, width: usize) -> Result<QuantumState> {
        assert!(width <= self.n);
        let size = 1usize << self.n;
        let sub = 1usize << width;
        let mut amps = Vec::with_capacity(2 * sub);
        for c in 0..2 {
            for m in 0..size {
                let a = self.amps[c * size + m];
                if m < sub {
                    amps.push(a);
                } else if a.abs() > STRAY_TOLERANCE {
                    return Err(Error::StrayAmplitude {
                        index: c * size + m,
                        amplitude: a,
                    });
                }
            }
        }
        Ok(QuantumState { n: width, amps })
    }

    /// Re-embeds a returned sub-state into the low qubits of M; the higher
    /// qubits are `|0⟩`.
    pub fn absorb(&mut self, sub: &QuantumState) {
        assert!(sub.n <= self.n);
        let size = 1usize << self.n;
        let s = 1usize << sub.n;
        self.amps.iter_mut().for_each(|a| *a = 0.0);
        for c in 0..2 {
            self.amps[c * size..c * size + s].copy_from_slice(&sub.amps[c * s..(c + 1) * s]);
        }
    }

    /// Debug dump: `c,m_bits,amplitude`.
    pub fn to_csv(&self) -> String {
        let size = 1usize << self.n;
        let mut out = String::from("c,m_bits,amplitude\n");
        for (i, a) in self.amps.iter().enumerate() {
            let m = BitVector::from_index(self.n, i % size);
            out.push_str(&format!("{},{m},{a:.17e}\n", i / size));
        }
        out
    }
}

/// The state after steps 4-7 in closed form:
/// `2^{-n/2} Σ_t (|0⟩ + a_t|1⟩)/√2 ⊗ |t⟩` with `a_t = g(z ⊕ t) / ‖ĝ‖₂`.
pub fn closed_form_post_qft(gk: &RealFunction, l2: f64, z: BitVector) -> QuantumState {
    let n = gk.arity();
    let size = 1usize << n;
    let scale = std::f64::consts::FRAC_1_SQRT_2 / (size as f64).sqrt();
    let mut amps = vec![scale; 2 * size];
    for t in 0..size {
        amps[size + t] = scale * gk.values()[z.index() ^ t] / l2;
    }
    QuantumState { n, amps }
}

/// `Pr[(t, b)] = 2^{-n} ((1 + b a_t) / 2)²`.
pub fn closed_form_branch_distribution(gk: &RealFunction, l2: f64, z: BitVector) -> BranchDistribution {
    let n = gk.arity();
    let size = 1usize << n;
    let mut probs = Vec::with_capacity(2 * size);
    for t in 0..size {
        let a = gk.values()[z.index() ^ t] / l2;
        probs.push(((1.0 + a) / 2.0).powi(2) / size as f64);
        probs.push(((1.0 - a) / 2.0).powi(2) / size as f64);
    }
    BranchDistribution { n, probs }
}

/// Joint distribution over measurement outcomes `(t, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchDistribution {
    n: usize,
    /// `probs[2t]` is `b = +1`, `probs[2t + 1]` is `b = -1`.
    probs: Vec<f64>,
}

impl BranchDistribution {
    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn get(&self, t: BitVector, b: i8) -> f64 {
        self.probs[2 * t.index() + usize::from(b == -1)]
    }

    /// `Pr[t]`.
    pub fn marginal(&self, t: BitVector) -> f64 {
        self.get(t, 1) + self.get(t, -1)
    }

    /// `Pr[b | t]`.
    pub fn conditional(&self, b: i8, t: BitVector) -> f64 {
        self.get(t, b) / self.marginal(t)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BitVector, i8, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| {
            let b = if i % 2 == 0 { 1 } else { -1 };
            (BitVector::from_index(self.n, i / 2), b, p)
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (BitVector, i8) {
        let u = rng.gen::<f64>() * self.total();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = i;
            if u < acc {
                break;
            }
        }
        let b = if last % 2 == 0 { 1 } else { -1 };
        (BitVector::from_index(self.n, last / 2), b)
    }
}

/// `f^{(k)} = Δ_{t_1}⋯Δ_{t_k} f` realized through the base function:
/// `f^{(k)}(z) = Π_{S ⊆ {t_i}} f(z ⊕ ΣS)`, i.e. `2^k` base calls per point.
#[derive(Debug)]
pub struct DerivativeOracle<'a> {
    base: &'a BooleanFunction,
    directions: Vec<BitVector>,
    base_calls: u64,
}

impl<'a> DerivativeOracle<'a> {
    pub fn new(base: &'a BooleanFunction, directions: Vec<BitVector>) -> Self {
        Self {
            base,
            directions,
            base_calls: 0,
        }
    }

    pub fn arity(&self) -> usize {
        self.base.arity()
    }

    /// `2^k`.
    pub fn queries_per_application(&self) -> u64 {
        1 << self.directions.len()
    }

    /// Base-function calls made so far.
    pub fn base_calls(&self) -> u64 {
        self.base_calls
    }

    pub fn eval(&mut self, z: BitVector) -> i8 {
        let k = self.directions.len();
        let mut acc = 1i8;
        for subset in 0..1usize << k {
            let shift = (0..k)
                .filter(|i| subset >> i & 1 == 1)
                .fold(z, |p, i| p ^ self.directions[i]);
            acc *= self.base.value(shift);
        }
        self.base_calls += 1 << k;
        acc
    }

    fn phase_table(&mut self) -> Vec<i8> {
        let n = self.arity();
        BitVector::all(n).map(|z| self.eval(z)).collect()
    }
}

/// Gate and query accounting for circuit-style preparation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ResourceLedger {
    /// Controlled Hadamards on M, `2n` per preparation.
    pub controlled_hadamards: u64,
    /// `|+⟩` preparation of C.
    pub single_qubit_gates: u64,
    /// Phase-oracle applications counted in base-function queries, `2^k` per
    /// preparation.
    pub oracle_queries: u64,
    /// Classical base-function evaluations spent by the simulator.
    pub classical_evaluations: u64,
    /// `Z` gates implementing `χ_α(x)`.
    pub phase_gates: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::Derivative;
    use crate::encoding::build_encoding;
    use crate::fourier::wht;
    use crate::rng::seeded;

    const S2: f64 = std::f64::consts::SQRT_2;

    fn and2() -> BooleanFunction {
        BooleanFunction::from_signs(2, vec![1, 1, 1, -1]).unwrap()
    }

    fn chi(n: usize, s: u32) -> BooleanFunction {
        let s = BitVector::new(n, s).unwrap();
        BooleanFunction::from_fn(n, |z| s.character(z)).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn prepare_single_character() {
        let f = chi(3, 0b110);
        let spec = wht(&f);
        let e = build_encoding(&spec.support(), 0, 3).unwrap();
        assert_eq!(e.width(), 0);
        let x: BitVector = "010".parse().unwrap();
        let s = QuantumState::prepare(&spec, &e, x).unwrap();
        assert!((s.amplitude(0, 0) - 1.0 / S2).abs() < 1e-15);
        assert!((s.amplitude(1, 0) + 1.0 / S2).abs() < 1e-15); // chi_110(010) = -1
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prepare_and2_at_zero() {
        let spec = wht(&and2());
        let e = build_encoding(&spec.support(), 0, 2).unwrap();
        let s = QuantumState::prepare(&spec, &e, BitVector::zero(2)).unwrap();
        let q = 1.0 / (2.0 * S2);
        assert!(close(
            s.amplitudes(),
            &[1.0 / S2, 0.0, 0.0, 0.0, q, q, q, -q]
        ));
    }

    #[test]
    fn prepare_rejects_support_outside_domain() {
        let spec = wht(&and2());
        let e = build_encoding(&wht(&chi(2, 1)).support(), 0, 2).unwrap();
        assert!(matches!(
            QuantumState::prepare(&spec, &e, BitVector::zero(2)),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn bob_phase_identity_and_involution() {
        let spec = wht(&and2());
        let e = build_encoding(&spec.support(), 0, 2).unwrap();
        let x: BitVector = "10".parse().unwrap();
        let s = QuantumState::prepare(&spec, &e, x).unwrap();
        let mut t = s.clone();
        t.apply_bob_phase(&e, BitVector::zero(2)).unwrap();
        assert_eq!(t, s);
        let y: BitVector = "11".parse().unwrap();
        t.apply_bob_phase(&e, y).unwrap();
        t.apply_bob_phase(&e, y).unwrap();
        assert_eq!(t, s);
    }

    #[test]
    fn bob_phase_carries_xor() {
        let spec = wht(&and2());
        let e = build_encoding(&spec.support(), 0, 2).unwrap();
        let (x, y): (BitVector, BitVector) = ("10".parse().unwrap(), "11".parse().unwrap());
        let mut s = QuantumState::prepare(&spec, &e, x).unwrap();
        s.apply_bob_phase(&e, y).unwrap();
        let direct = QuantumState::prepare(&spec, &e, x ^ y).unwrap();
        assert!(close(s.amplitudes(), direct.amplitudes()));
    }

    #[test]
    fn bob_phase_rejects_stray_amplitude() {
        let a = crate::fourier::SupportSet::new(3, ["001".parse().unwrap()]).unwrap();
        let e = build_encoding(&a, 0, 3).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = QuantumState::from_amplitudes(3, {
            let mut v = vec![0.0; 16];
            v[0] = h;
            v[8 + 5] = h;
            v
        })
        .unwrap();
        assert!(matches!(
            s.apply_bob_phase(&e, BitVector::zero(3)),
            Err(Error::StrayAmplitude { index: 13, .. })
        ));
    }

    #[test]
    fn decode_single_element_domain() {
        let f = chi(3, 0b101);
        let spec = wht(&f);
        let e = build_encoding(&spec.support(), 0, 3).unwrap();
        let mut s = QuantumState::prepare(&spec, &e, BitVector::zero(3)).unwrap();
        s.apply_alice_decode(&e).unwrap();
        assert!((s.amplitude(1, 0b101) - 1.0 / S2).abs() < 1e-15);
        assert_eq!(s.amplitude(1, 0), 0.0);
        assert!((s.amplitude(0, 0) - 1.0 / S2).abs() < 1e-15);
    }

    #[test]
    fn qft_basics() {
        let mut s = QuantumState::from_amplitudes(3, {
            let mut v = vec![0.0; 16];
            v[0] = 1.0;
            v
        })
        .unwrap();
        s.apply_qft_m();
        let u = 1.0 / 8f64.sqrt();
        assert!(s.amplitudes()[..8].iter().all(|a| (a - u).abs() < 1e-15));
        s.apply_qft_m();
        assert!((s.amplitude(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_mode_branches_are_deterministic() {
        let f = and2();
        let spec = wht(&f);
        let e = build_encoding(&spec.support(), 0, 2).unwrap();
        for x in BitVector::all(2) {
            for y in BitVector::all(2) {
                let mut s = QuantumState::prepare(&spec, &e, x).unwrap();
                s.apply_bob_phase(&e, y).unwrap();
                s.apply_alice_decode(&e).unwrap();
                s.apply_qft_m();
                let dist = s.branch_distribution();
                assert!((dist.total() - 1.0).abs() < 1e-12);
                for t in BitVector::all(2) {
                    let right = f.value(x ^ y ^ t);
                    assert!((dist.get(t, right) - 0.25).abs() < 1e-12);
                    assert!(dist.get(t, -right) < 1e-12);
                }
                let mut rng = seeded(9);
                for _ in 0..50 {
                    let (t, b) = s.measure(&mut rng);
                    assert_eq!(b, f.value(x ^ y ^ t));
                }
            }
        }
    }

    #[test]
    fn marginal_matches_closed_form() {
        let g = RealFunction::new(2, vec![0.9, 1.05, -0.97, 1.0]).unwrap();
        let l2 = wht(&g).l2();
        let z: BitVector = "01".parse().unwrap();
        let d = closed_form_branch_distribution(&g, l2, z);
        for t in BitVector::all(2) {
            let a = g.value(z ^ t) / l2;
            assert!((d.marginal(t) - (1.0 + a * a) / 8.0).abs() < 1e-15);
        }
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_qubit_by_hand() {
        // n = 1, g = chi_1: a_t = chi_1(z + t). With z = 0: t=0 -> a=1, t=1 -> a=-1.
        let g = chi(1, 1).to_real();
        let d = closed_form_branch_distribution(&g, 1.0, BitVector::zero(1));
        let p: Vec<f64> = d.iter().map(|(_, _, p)| p).collect();
        assert_eq!(p, vec![0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn circuit_matches_direct_for_derivative() {
        let f = and2();
        let t: BitVector = "11".parse().unwrap();
        let fk = f.derivative(t);
        let spec = wht(&fk);
        let a = wht(&f).support();
        let e = build_encoding(&a, 1, 2).unwrap();
        for x in BitVector::all(2) {
            let mut oracle = DerivativeOracle::new(&f, vec![t]);
            let mut ledger = ResourceLedger::default();
            let c = QuantumState::prepare_circuit(&mut oracle, &e, x, &mut ledger).unwrap();
            let d = QuantumState::prepare(&spec, &e, x).unwrap();
            assert!(close(c.amplitudes(), d.amplitudes()));
            assert_eq!(ledger.controlled_hadamards, 4);
            assert_eq!(ledger.oracle_queries, 2);
            assert_eq!(oracle.base_calls(), 8);
        }
    }

    #[test]
    fn outgoing_and_absorb() {
        let f = chi(3, 0b011);
        let spec = wht(&f);
        let e = build_encoding(&spec.support(), 0, 3).unwrap();
        let s = QuantumState::prepare(&spec, &e, "001".parse().unwrap()).unwrap();
        let sub = s.outgoing(e.width()).unwrap();
        assert_eq!(sub.amplitudes().len(), 2);
        let mut back = s.clone();
        back.absorb(&sub);
        assert_eq!(back, s);
    }

    #[test]
    fn csv_dump_has_every_amplitude() {
        let spec = wht(&and2());
        let e = build_encoding(&spec.support(), 0, 2).unwrap();
        let s = QuantumState::prepare(&spec, &e, BitVector::zero(2)).unwrap();
        let csv = s.to_csv();
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.lines().nth(8).unwrap().starts_with("1,11,-3.5355"));
    }
}
