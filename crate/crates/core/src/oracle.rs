//! Exact error probabilities by enumerating every measurement branch, plus
//! Monte Carlo estimates and direct checks of the derivative bounds.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::boolean::{gf2_degree, BooleanFunction, Derivative, RealFunction};
use crate::error::{Error, Result};
use crate::fourier::{sumset, wht, SupportSet};
use crate::protocol::{BoundedErrorInstance, ProtocolConfig, ProtocolInstance, PublicData};
use crate::qsim::closed_form_branch_distribution;
use crate::sampler::sup_distance;

/// Largest arity [`exact_error`] accepts.
pub const ORACLE_MAX_ARITY: usize = 5;
const MAX_MEMO_ENTRIES: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub z: BitVector,
    pub degree: u32,
    /// `‖f − g‖_∞`.
    pub eps: f64,
    pub exact_error: f64,
    /// `2^d ε`.
    pub bound: f64,
    pub slack: f64,
    /// Largest qubit count over branches of positive probability.
    pub comm_max: u64,
    /// Minimum over branches of `Pr[b correct | t] − (1+ε)^{-2^k}`.
    pub min_round_margin: f64,
}

#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

#[derive(Clone, Copy)]
struct Node {
    correct: f64,
    comm_max: u64,
    margin: f64,
}

struct Enumerator<'a> {
    z: BitVector,
    eps: f64,
    public: &'a PublicData,
    /// Keyed by the reduced echelon basis of `span(t_1, …, t_k)`: iterated
    /// derivatives depend on the directions only through their span.
    memo: HashMap<Vec<u32>, Node>,
}

const LEAF: Node = Node {
    correct: 1.0,
    comm_max: 0,
    margin: f64::INFINITY,
};

/// Adds `t` to a reduced echelon basis; `None` if `t` is already spanned.
fn extend_basis(basis: &[u32], t: u32) -> Option<Vec<u32>> {
    let mut r = t;
    for &v in basis {
        let lead = 31 - v.leading_zeros();
        if r >> lead & 1 == 1 {
            r ^= v;
        }
    }
    if r == 0 {
        return None;
    }
    let lead = 31 - r.leading_zeros();
    let mut out: Vec<u32> = basis
        .iter()
        .map(|&v| if v >> lead & 1 == 1 { v ^ r } else { v })
        .collect();
    out.push(r);
    out.sort_unstable_by(|a, b| b.cmp(a));
    Some(out)
}

impl Enumerator<'_> {
    fn p_correct(&mut self, basis: &[u32], f: &BooleanFunction, g: &RealFunction) -> Result<Node> {
        if gf2_degree(f) == 0 {
            return Ok(LEAF);
        }
        if let Some(&node) = self.memo.get(basis) {
            return Ok(node);
        }
        if self.memo.len() >= MAX_MEMO_ENTRIES {
            return Err(Error::OracleLimit(format!("more than {MAX_MEMO_ENTRIES} memo entries")));
        }
        let k = basis.len();
        let n = f.arity();
        let l2 = g.mean_square().sqrt();
        let law = closed_form_branch_distribution(g, l2, self.z);
        let threshold = (1.0 + self.eps).powf(-(2f64.powi(k as i32)));
        let round_qubits = 2 * (1 + self.public.encoding(k)?.width() as u64);
        let mut acc = Kahan::default();
        let mut sub_comm = 0;
        let mut margin = f64::INFINITY;
        for t in BitVector::all(n) {
            let want = f.value(self.z ^ t);
            let (p_right, p_wrong) = (law.get(t, want), law.get(t, -want));
            let p_t = p_right + p_wrong;
            if p_t > 0.0 {
                margin = margin.min(p_right / p_t - threshold);
            }
            if t.is_zero() {
                acc.add(p_right);
                continue;
            }
            if p_t == 0.0 {
                continue;
            }
            let sub = match extend_basis(basis, t.bits()) {
                // A direction already in the span makes the derivative of f
                // identically 1.
                None => LEAF,
                Some(child) => self.p_correct(&child, &f.derivative(t), &g.derivative(t))?,
            };
            acc.add(p_right * sub.correct);
            acc.add(p_wrong * (1.0 - sub.correct));
            sub_comm = sub_comm.max(sub.comm_max);
            margin = margin.min(sub.margin);
        }
        let node = Node {
            correct: acc.sum.clamp(0.0, 1.0),
            comm_max: round_qubits + sub_comm,
            margin,
        };
        self.memo.insert(basis.to_vec(), node);
        Ok(node)
    }
}

fn check_pair(f: &BooleanFunction, g: &RealFunction) -> Result<PublicData> {
    if f.arity() != g.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            found: g.arity(),
        });
    }
    if f.arity() > ORACLE_MAX_ARITY {
        return Err(Error::OracleLimit(format!(
            "exact enumeration supports n <= {ORACLE_MAX_ARITY}, got n = {}; use Monte Carlo",
            f.arity()
        )));
    }
    PublicData::new(wht(g).support(), gf2_degree(f))
}

/// `Pr[protocol output ≠ f(z)]` for inputs with `x ⊕ y = z`.
pub fn exact_error(f: &BooleanFunction, g: &RealFunction, z: BitVector) -> Result<ErrorReport> {
    let public = check_pair(f, g)?;
    error_report(f, g, z, &public)
}

fn error_report(f: &BooleanFunction, g: &RealFunction, z: BitVector, public: &PublicData) -> Result<ErrorReport> {
    if z.arity() != f.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            found: z.arity(),
        });
    }
    let eps = sup_distance(&f.to_real(), g);
    let mut e = Enumerator {
        z,
        eps,
        public,
        memo: HashMap::new(),
    };
    let node = e.p_correct(&[], f, g)?;
    let degree = public.degree();
    let exact_error = (1.0 - node.correct).max(0.0);
    let bound = 2f64.powi(degree as i32) * eps;
    Ok(ErrorReport {
        z,
        degree,
        eps,
        exact_error,
        bound,
        slack: bound - exact_error,
        comm_max: node.comm_max,
        min_round_margin: node.margin,
    })
}

/// One report per `z`.
pub fn error_profile(f: &BooleanFunction, g: &RealFunction) -> Result<Vec<ErrorReport>> {
    let public = check_pair(f, g)?;
    BitVector::all(f.arity())
        .map(|z| error_report(f, g, z, &public))
        .collect()
}

/// The report at the `z` maximizing the error.
pub fn worst_case_error(f: &BooleanFunction, g: &RealFunction) -> Result<ErrorReport> {
    let profile = error_profile(f, g)?;
    Ok(profile
        .into_iter()
        .reduce(|a, b| if b.exact_error > a.exact_error { b } else { a })
        .expect("at least one z"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub errors: u64,
    pub estimate: f64,
    /// `sqrt(p̂ (1 − p̂) / trials)`.
    pub stderr: f64,
}

impl MonteCarloEstimate {
    fn from_counts(trials: u64, errors: u64) -> Self {
        let p = errors as f64 / trials as f64;
        Self {
            trials,
            errors,
            estimate: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }
}

/// Empirical error of single runs at fixed `z`, with `x` uniform and
/// `y = x ⊕ z`.
pub fn monte_carlo_error<R: Rng + ?Sized>(
    f: &BooleanFunction,
    g: &RealFunction,
    z: BitVector,
    trials: u64,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    let eps = sup_distance(&f.to_real(), g);
    let instance = ProtocolInstance::new(f.clone(), g.clone(), ProtocolConfig::approximate(eps, 0))?;
    monte_carlo_instance(&instance, z, trials, rng)
}

pub fn monte_carlo_instance<R: Rng + ?Sized>(
    instance: &ProtocolInstance,
    z: BitVector,
    trials: u64,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be positive".into()));
    }
    let n = instance.arity();
    let truth = instance.f().value(z);
    let mut errors = 0;
    for _ in 0..trials {
        let x = BitVector::from_index(n, rng.gen_range(0..1usize << n));
        let (answer, _) = instance.run(x, x ^ z, rng)?;
        errors += u64::from(answer != truth);
    }
    Ok(MonteCarloEstimate::from_counts(trials, errors))
}

/// Empirical error of the repeated pipeline on uniform `(x, y)`; each trial
/// gets a fresh seed for its repetitions. Also returns the largest qubit
/// count of any single run.
pub fn monte_carlo_pipeline<R: Rng + ?Sized>(
    pipeline: &BoundedErrorInstance,
    trials: u64,
    rng: &mut R,
) -> Result<(MonteCarloEstimate, u64)> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be positive".into()));
    }
    let f = pipeline.instance().f();
    let n = f.arity();
    let mut errors = 0;
    let mut max_qubits = 0;
    for _ in 0..trials {
        let x = BitVector::from_index(n, rng.gen_range(0..1usize << n));
        let y = BitVector::from_index(n, rng.gen_range(0..1usize << n));
        let out = pipeline.run(x, y, rng.gen())?;
        errors += u64::from(out.answer != f.evaluate_xor(x, y));
        max_qubits = max_qubits.max(out.max_qubits);
    }
    Ok((MonteCarloEstimate::from_counts(trials, errors), max_qubits))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeDriftCheck {
    pub k: usize,
    pub eps: f64,
    /// `‖Δ_{t_1}⋯Δ_{t_k} f − Δ_{t_1}⋯Δ_{t_k} g‖_∞`.
    pub lhs: f64,
    /// `(1+ε)^{2^k} − 1`.
    pub rhs: f64,
    pub ok: bool,
}

pub fn check_derivative_drift(f: &BooleanFunction, g: &RealFunction, ts: &[BitVector]) -> DerivativeDriftCheck {
    let eps = sup_distance(&f.to_real(), g);
    let fk = f.to_real().iterated_derivative(ts);
    let gk = g.iterated_derivative(ts);
    let lhs = sup_distance(&fk, &gk);
    let rhs = (1.0 + eps).powf(2f64.powi(ts.len() as i32)) - 1.0;
    DerivativeDriftCheck {
        k: ts.len(),
        eps,
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-12,
    }
}

/// Characters of `supp(Δ_t h)` outside `supp(ĥ) + supp(ĥ)`.
pub fn support_inclusion_violations(h: &RealFunction, t: BitVector) -> Vec<BitVector> {
    let a: SupportSet = wht(h).support();
    let doubled = sumset(&a, &a);
    wht(&h.derivative(t))
        .support()
        .iter()
        .filter(|alpha| !doubled.contains(*alpha))
        .collect()
}
