//! The two parties. Alice holds `f`, `g` and `x`; Bob holds only the public
//! data and `y`.

use std::sync::Arc;

use rand::Rng;

use crate::bits::BitVector;
use crate::boolean::{gf2_degree, BooleanFunction, Derivative, RealFunction};
use crate::encoding::{build_encoding, SumsetEncoding};
use crate::error::{Error, Result};
use crate::fourier::{wht, SupportSet};
use crate::qsim::QuantumState;
use crate::transport::{Link, WireMessage};

use super::{RoundRecord, Termination, Transcript};

/// What both parties know before the run: `n`, `A = supp(ĝ)`, `deg₂(f)`,
/// and the encodings `E_k` derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct PublicData {
    n: usize,
    support: SupportSet,
    degree: u32,
    encodings: Vec<SumsetEncoding>,
}

impl PublicData {
    pub fn new(support: SupportSet, degree: u32) -> Result<Self> {
        let n = support.arity();
        if support.is_empty() {
            return Err(Error::Precondition("supp(ĝ) is empty".into()));
        }
        if degree as usize > n {
            return Err(Error::Precondition(format!("degree {degree} exceeds n = {n}")));
        }
        let encodings = (0..degree as usize)
            .map(|k| build_encoding(&support, k, n))
            .collect::<Result<_>>()?;
        Ok(Self {
            n,
            support,
            degree,
            encodings,
        })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `E_k`; defined for `k < d`.
    pub fn encoding(&self, k: usize) -> Result<&SumsetEncoding> {
        self.encodings.get(k).ok_or_else(|| {
            Error::Invariant(format!("round {k} reached but deg₂(f) = {}", self.degree))
        })
    }

    /// FNV-1a over `(n, d, A)`; both endpoints compare it during the
    /// handshake.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&(self.n as u64).to_le_bytes());
        bytes.extend_from_slice(&u64::from(self.degree).to_le_bytes());
        for &a in self.support.raw() {
            bytes.extend_from_slice(&a.to_le_bytes());
        }
        bytes
            .iter()
            .fold(OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(PRIME))
    }
}

/// Classical bits charged for one degree announcement.
pub fn degree_announce_bits(n: usize) -> u64 {
    u64::from(usize::BITS - n.leading_zeros())
}

pub struct Alice<'a> {
    f: &'a BooleanFunction,
    g: &'a RealFunction,
    public: &'a PublicData,
    x: BitVector,
    max_rounds: usize,
}

impl<'a> Alice<'a> {
    pub fn new(
        f: &'a BooleanFunction,
        g: &'a RealFunction,
        public: &'a PublicData,
        x: BitVector,
        max_rounds: usize,
    ) -> Self {
        Self {
            f,
            g,
            public,
            x,
            max_rounds,
        }
    }

    pub fn run<L, R>(&self, link: &mut L, rng: &mut R) -> Result<(i8, Transcript)>
    where
        L: Link + ?Sized,
        R: Rng + ?Sized,
    {
        let n = self.public.arity();
        let mut fk = self.f.clone();
        let mut gk = self.g.clone();
        let mut degree = self.public.degree();
        let mut ans = 1i8;
        let mut rounds = Vec::new();
        let mut classical_bits = 0;
        let mut terminated_by = Termination::DegreeZero;

        while degree >= 1 {
            let k = rounds.len();
            if k >= self.max_rounds {
                return Err(Error::Invariant(format!(
                    "degree {degree} still positive after max_rounds = {}",
                    self.max_rounds
                )));
            }
            let e = self.public.encoding(k)?;
            let spectrum = wht(&gk);
            let mut state = QuantumState::prepare(&spectrum, e, self.x)?;
            let width = e.width();
            let qubits = 1 + width as u16;
            let out = state.outgoing(width)?;
            link.send(&WireMessage::RegisterState {
                round: k as u16,
                qubits,
                amplitudes: out.amplitudes().to_vec(),
            })?;
            let back = match link.recv()? {
                WireMessage::RegisterState {
                    round,
                    qubits: q,
                    amplitudes,
                } if usize::from(round) == k && q == qubits => amplitudes,
                other => {
                    return Err(Error::Invariant(format!(
                        "expected REGISTER_STATE for round {k}, got {other:?}"
                    )))
                }
            };
            state.absorb(&QuantumState::from_amplitudes(width, back)?);
            state.apply_alice_decode(e)?;
            state.apply_qft_m();
            let (t, b) = state.measure(rng);
            ans *= b;

            let mut record = RoundRecord {
                k,
                m_k: width,
                support_bits: ceil_log2(spectrum.l0()),
                t,
                b,
                deg_announced: None,
                qubits_alice_to_bob: u64::from(qubits),
                qubits_bob_to_alice: u64::from(qubits),
            };
            if t.is_zero() {
                link.send(&WireMessage::Terminate { round: k as u16 })?;
                rounds.push(record);
                terminated_by = Termination::TZero;
                break;
            }
            fk = fk.derivative(t);
            gk = gk.derivative(t);
            degree = gf2_degree(&fk);
            link.send(&WireMessage::DegreeAnnounce {
                round: k as u16,
                degree: degree as u16,
            })?;
            classical_bits += degree_announce_bits(n);
            record.deg_announced = Some(degree);
            rounds.push(record);
        }
        if terminated_by == Termination::DegreeZero {
            ans *= fk.value(BitVector::zero(n));
        }
        let total_qubits = rounds
            .iter()
            .map(|r| r.qubits_alice_to_bob + r.qubits_bob_to_alice)
            .sum();
        Ok((
            ans,
            Transcript {
                rounds,
                terminated_by,
                answer: ans,
                total_qubits,
                classical_bits,
            },
        ))
    }
}

fn ceil_log2(s: usize) -> u32 {
    if s <= 1 {
        0
    } else {
        usize::BITS - (s - 1).leading_zeros()
    }
}

/// Bob's endpoint. Constructed from the public data and `y` only.
#[derive(Clone, Debug)]
pub struct Bob {
    public: Arc<PublicData>,
    y: BitVector,
    round: usize,
    awaiting_state: bool,
    finished: bool,
}

impl Bob {
    pub fn new(public: Arc<PublicData>, y: BitVector) -> Result<Self> {
        if y.arity() != public.arity() {
            return Err(Error::ArityMismatch {
                expected: public.arity(),
                found: y.arity(),
            });
        }
        let finished = public.degree() == 0;
        Ok(Self {
            public,
            y,
            round: 0,
            awaiting_state: true,
            finished,
        })
    }

    pub fn public(&self) -> &PublicData {
        &self.public
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// Processes one message from Alice, returning Bob's reply if any.
    pub fn handle(&mut self, msg: WireMessage) -> Result<Option<WireMessage>> {
        if self.finished {
            return Err(Error::Invariant(format!("{} received after termination", msg.kind())));
        }
        let expected_round = self.round as u16;
        match msg {
            WireMessage::RegisterState {
                round,
                qubits,
                amplitudes,
            } if self.awaiting_state && round == expected_round => {
                let e = self.public.encoding(self.round)?;
                if usize::from(qubits) != 1 + e.width() {
                    return Err(Error::Invariant(format!(
                        "round {round}: {qubits} qubits received, encoding needs {}",
                        1 + e.width()
                    )));
                }
                let mut state = QuantumState::from_amplitudes(e.width(), amplitudes)?;
                state.apply_bob_phase(e, self.y)?;
                self.awaiting_state = false;
                Ok(Some(WireMessage::RegisterState {
                    round,
                    qubits,
                    amplitudes: state.amplitudes().to_vec(),
                }))
            }
            WireMessage::Terminate { round } if !self.awaiting_state && round == expected_round => {
                self.finished = true;
                Ok(None)
            }
            WireMessage::DegreeAnnounce { round, degree }
                if !self.awaiting_state && round == expected_round =>
            {
                self.round += 1;
                self.awaiting_state = true;
                if degree == 0 {
                    self.finished = true;
                } else if self.round >= self.public.degree() as usize {
                    return Err(Error::Invariant(format!(
                        "degree {degree} announced after {} rounds",
                        self.round
                    )));
                }
                Ok(None)
            }
            other => Err(Error::Invariant(format!(
                "unexpected {} in round {} (awaiting state: {})",
                other.kind(),
                self.round,
                self.awaiting_state
            ))),
        }
    }

    /// Serves Alice over `link` until the run ends.
    pub fn serve<L: Link + ?Sized>(&mut self, link: &mut L) -> Result<()> {
        while !self.finished {
            let msg = link.recv()?;
            if let Some(reply) = self.handle(msg)? {
                link.send(&reply)?;
            }
        }
        Ok(())
    }
}
