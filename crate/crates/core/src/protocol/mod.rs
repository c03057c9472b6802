//! The round loop: per round Alice prepares the state for `g^(k)`, sends C
//! and the codeword qubits to Bob, gets them back with Bob's phase, decodes,
//! measures `(t, b)` and multiplies `b` into the answer. `t = 0` ends the
//! run; otherwise both functions are differentiated along `t` and the new
//! degree is announced.

mod party;
mod pipeline;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::boolean::{gf2_degree, BooleanFunction, RealFunction};
use crate::encoding::ceil_log2_pow;
use crate::error::{Error, Result};
use crate::fourier::wht;
use crate::rng::stream;
use crate::sampler::sup_distance;
use crate::transport::{Link, LocalLink};

pub use party::{degree_announce_bits, Alice, Bob, PublicData};
pub use pipeline::{pipeline_bounded_error, repetitions_for, BoundedErrorInstance, PipelineParams, PipelineReport};

/// Slack allowed on `‖f − g‖_∞ ≤ eps`.
const EPS_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    #[serde(rename = "approx")]
    Approximate,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "approx" | "approximate" => Ok(Mode::Approximate),
            other => Err(format!("unknown mode {other:?}, expected exact or approx")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Approximate => "approx",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub mode: Mode,
    /// Approximation level `‖f − g‖_∞` the run is promised.
    pub eps: f64,
    pub seed: u64,
    /// Defaults to `n`.
    pub max_rounds: Option<usize>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self::exact(0)
    }
}

impl ProtocolConfig {
    pub fn exact(seed: u64) -> Self {
        Self {
            mode: Mode::Exact,
            eps: 0.0,
            seed,
            max_rounds: None,
        }
    }

    pub fn approximate(eps: f64, seed: u64) -> Self {
        Self {
            mode: Mode::Approximate,
            eps,
            seed,
            max_rounds: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub k: usize,
    pub m_k: usize,
    /// `⌈log₂ ‖ĝ^(k)‖₀⌉`, the width the actual support would need.
    pub support_bits: u32,
    pub t: BitVector,
    pub b: i8,
    /// `None` when the round ended with TERMINATE.
    pub deg_announced: Option<u32>,
    pub qubits_alice_to_bob: u64,
    pub qubits_bob_to_alice: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    TZero,
    DegreeZero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub rounds: Vec<RoundRecord>,
    pub terminated_by: Termination,
    pub answer: i8,
    pub total_qubits: u64,
    /// Degree announcements, `⌈log₂(n+1)⌉` bits each.
    pub classical_bits: u64,
}

/// `Σ_{k<d} 2(1 + ⌈2^k log₂ s⌉)` next to the rounded `2^{d+2} log₂ s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostBound {
    pub exact: u64,
    pub rounded: f64,
}

pub fn cost_bound(d: u32, sparsity: usize) -> CostBound {
    assert!(sparsity >= 1, "cost_bound needs sparsity >= 1");
    let exact = (0..d)
        .map(|k| 2 * (1 + ceil_log2_pow(sparsity as u64, k.min(63))))
        .sum();
    CostBound {
        exact,
        rounded: 2f64.powi(d as i32 + 2) * (sparsity as f64).log2(),
    }
}

/// `f`, `g` and the public data, validated once and reusable across inputs.
#[derive(Clone, Debug)]
pub struct ProtocolInstance {
    f: BooleanFunction,
    g: RealFunction,
    public: Arc<PublicData>,
    cfg: ProtocolConfig,
}

impl ProtocolInstance {
    pub fn new(f: BooleanFunction, g: RealFunction, cfg: ProtocolConfig) -> Result<Self> {
        if f.arity() != g.arity() {
            return Err(Error::ArityMismatch {
                expected: f.arity(),
                found: g.arity(),
            });
        }
        match cfg.mode {
            Mode::Exact => {
                if g != f.to_real() {
                    return Err(Error::Precondition("exact mode requires g = f".into()));
                }
            }
            Mode::Approximate => {
                let dist = sup_distance(&f.to_real(), &g);
                if !(cfg.eps >= 0.0) || dist > cfg.eps + EPS_SLACK {
                    return Err(Error::Precondition(format!(
                        "‖f − g‖_∞ = {dist} exceeds eps = {}",
                        cfg.eps
                    )));
                }
            }
        }
        let public = PublicData::new(wht(&g).support(), gf2_degree(&f))?;
        Ok(Self {
            f,
            g,
            public: Arc::new(public),
            cfg,
        })
    }

    pub fn exact(f: BooleanFunction, seed: u64) -> Result<Self> {
        let g = f.to_real();
        Self::new(f, g, ProtocolConfig::exact(seed))
    }

    pub fn f(&self) -> &BooleanFunction {
        &self.f
    }

    pub fn g(&self) -> &RealFunction {
        &self.g
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.cfg
    }

    pub fn public(&self) -> &Arc<PublicData> {
        &self.public
    }

    pub fn arity(&self) -> usize {
        self.f.arity()
    }

    pub fn degree(&self) -> u32 {
        self.public.degree()
    }

    pub fn sparsity(&self) -> usize {
        self.public.support().len()
    }

    pub fn cost_bound(&self) -> CostBound {
        cost_bound(self.degree(), self.sparsity())
    }

    /// Whether `eps < 2^{-d-1}`, the regime where the `2^d ε` error bound
    /// is guaranteed. Runs proceed either way.
    pub fn error_bound_applies(&self) -> bool {
        self.cfg.mode == Mode::Exact || self.cfg.eps < 2f64.powi(-(self.degree() as i32) - 1)
    }

    /// `2^d ε`, or 0 in exact mode.
    pub fn error_bound(&self) -> f64 {
        match self.cfg.mode {
            Mode::Exact => 0.0,
            Mode::Approximate => 2f64.powi(self.degree() as i32) * self.cfg.eps,
        }
    }

    fn max_rounds(&self) -> usize {
        self.cfg.max_rounds.unwrap_or(self.arity())
    }

    fn check_input(&self, v: BitVector) -> Result<()> {
        if v.arity() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: v.arity(),
            });
        }
        Ok(())
    }

    pub fn alice(&self, x: BitVector) -> Result<Alice<'_>> {
        self.check_input(x)?;
        Ok(Alice::new(&self.f, &self.g, &self.public, x, self.max_rounds()))
    }

    pub fn bob(&self, y: BitVector) -> Result<Bob> {
        Bob::new(Arc::clone(&self.public), y)
    }

    /// One run over the in-process link.
    pub fn run<R: Rng + ?Sized>(&self, x: BitVector, y: BitVector, rng: &mut R) -> Result<(i8, Transcript)> {
        let alice = self.alice(x)?;
        let mut link = LocalLink::new(self.bob(y)?);
        let (answer, transcript) = alice.run(&mut link, rng)?;
        if !link.bob().is_finished() {
            return Err(Error::Invariant("Bob did not observe the end of the run".into()));
        }
        if link.ledger().total() != transcript.total_qubits {
            return Err(Error::Invariant(format!(
                "ledger counts {} qubits, transcript {}",
                link.ledger().total(),
                transcript.total_qubits
            )));
        }
        Ok((answer, transcript))
    }

    /// Majority of `reps` runs, run `i` on [`stream`]`(seed, i)`. Stops once
    /// the majority is decided, which does not change the outcome.
    pub fn run_repeated(&self, x: BitVector, y: BitVector, reps: usize, seed: u64) -> Result<RepeatedOutcome> {
        if reps % 2 == 0 {
            return Err(Error::Precondition(format!("reps must be odd, got {reps}")));
        }
        let need = reps / 2 + 1;
        let mut outcome = RepeatedOutcome {
            answer: 1,
            plus: 0,
            minus: 0,
            runs: 0,
            max_qubits: 0,
        };
        for i in 0..reps {
            let (a, t) = self.run(x, y, &mut stream(seed, i as u64))?;
            outcome.runs += 1;
            outcome.max_qubits = outcome.max_qubits.max(t.total_qubits);
            if a == 1 {
                outcome.plus += 1;
            } else {
                outcome.minus += 1;
            }
            if outcome.plus >= need || outcome.minus >= need {
                break;
            }
        }
        outcome.answer = if outcome.plus > outcome.minus { 1 } else { -1 };
        Ok(outcome)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepeatedOutcome {
    pub answer: i8,
    pub plus: usize,
    pub minus: usize,
    /// Runs executed before the majority was decided.
    pub runs: usize,
    pub max_qubits: u64,
}

pub fn run_protocol<R: Rng + ?Sized>(
    f: &BooleanFunction,
    g: &RealFunction,
    x: BitVector,
    y: BitVector,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<(i8, Transcript)> {
    ProtocolInstance::new(f.clone(), g.clone(), *cfg)?.run(x, y, rng)
}

pub fn run_exact<R: Rng + ?Sized>(
    f: &BooleanFunction,
    x: BitVector,
    y: BitVector,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<(i8, Transcript)> {
    let cfg = ProtocolConfig {
        mode: Mode::Exact,
        eps: 0.0,
        ..*cfg
    };
    run_protocol(f, &f.to_real(), x, y, &cfg, rng)
}

pub fn run_repeated(
    f: &BooleanFunction,
    g: &RealFunction,
    x: BitVector,
    y: BitVector,
    reps: usize,
    cfg: &ProtocolConfig,
) -> Result<i8> {
    Ok(ProtocolInstance::new(f.clone(), g.clone(), *cfg)?
        .run_repeated(x, y, reps, cfg.seed)?
        .answer)
}
