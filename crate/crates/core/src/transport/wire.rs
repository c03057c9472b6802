//! Length-prefixed binary frames.
//!
//! ```text
//! [u32 LE payload length][u8 type][u16 LE round][u16 LE qubit_count][payload]
//! ```
//!
//! The 9-byte header is followed by `payload length` bytes:
//!
//! | type | name              | payload                                        |
//! |------|-------------------|------------------------------------------------|
//! | 1    | `REGISTER_STATE`  | `2^qubit_count` amplitudes, f64 LE, (c, codeword) order |
//! | 2    | `DEGREE_ANNOUNCE` | u16 LE degree                                  |
//! | 3    | `TERMINATE`       | empty                                          |
//! | 4    | `HELLO`           | u8 role, u64 LE public-data fingerprint        |

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::bits::MAX_ARITY;
use crate::qsim::NORM_TOLERANCE;

pub const HEADER_LEN: usize = 9;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("truncated frame: needed {needed} bytes, got {got}")]
    Truncated { needed: usize, got: usize },
    #[error("unknown message type {0}")]
    UnknownType(u8),
    #[error("payload of {found} bytes does not match the {expected} bytes implied by the header")]
    LengthMismatch { expected: usize, found: usize },
    #[error("register state norm² {0} is not 1")]
    Norm(f64),
    #[error("register of {0} qubits exceeds the supported size")]
    TooManyQubits(u16),
    #[error("unknown role byte {0}")]
    UnknownRole(u8),
    #[error("handshake failed: {0}")]
    Handshake(String),
    #[error("unexpected message: {0}")]
    Unexpected(String),
    #[error("connection lost: {0}")]
    ConnectionLost(#[source] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Alice,
    Bob,
}

impl Role {
    fn code(self) -> u8 {
        match self {
            Role::Alice => 0,
            Role::Bob => 1,
        }
    }

    fn from_code(b: u8) -> Result<Self, WireError> {
        match b {
            0 => Ok(Role::Alice),
            1 => Ok(Role::Bob),
            other => Err(WireError::UnknownRole(other)),
        }
    }
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "alice" => Ok(Role::Alice),
            "bob" => Ok(Role::Bob),
            other => Err(format!("unknown role {other:?}")),
        }
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Role::Alice => "alice",
            Role::Bob => "bob",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WireMessage {
    /// Register C joined with the low `qubits - 1` qubits of M.
    RegisterState {
        round: u16,
        qubits: u16,
        amplitudes: Vec<f64>,
    },
    DegreeAnnounce { round: u16, degree: u16 },
    Terminate { round: u16 },
    Hello { role: Role, fingerprint: u64 },
}

const REGISTER_STATE: u8 = 1;
const DEGREE_ANNOUNCE: u8 = 2;
const TERMINATE: u8 = 3;
const HELLO: u8 = 4;

impl WireMessage {
    /// Declared qubit count; zero for classical messages.
    pub fn qubit_count(&self) -> u16 {
        match self {
            WireMessage::RegisterState { qubits, .. } => *qubits,
            _ => 0,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            WireMessage::RegisterState { .. } => "REGISTER_STATE",
            WireMessage::DegreeAnnounce { .. } => "DEGREE_ANNOUNCE",
            WireMessage::Terminate { .. } => "TERMINATE",
            WireMessage::Hello { .. } => "HELLO",
        }
    }

    pub fn serialize(&self) -> Vec<u8> {
        let (ty, round, qubits, payload) = match self {
            WireMessage::RegisterState {
                round,
                qubits,
                amplitudes,
            } => {
                let payload = amplitudes.iter().flat_map(|a| a.to_le_bytes()).collect();
                (REGISTER_STATE, *round, *qubits, payload)
            }
            WireMessage::DegreeAnnounce { round, degree } => {
                (DEGREE_ANNOUNCE, *round, 0, degree.to_le_bytes().to_vec())
            }
            WireMessage::Terminate { round } => (TERMINATE, *round, 0, Vec::new()),
            WireMessage::Hello { role, fingerprint } => {
                let mut p = vec![role.code()];
                p.extend_from_slice(&fingerprint.to_le_bytes());
                (HELLO, 0, 0, p)
            }
        };
        let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
        out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        out.push(ty);
        out.extend_from_slice(&round.to_le_bytes());
        out.extend_from_slice(&qubits.to_le_bytes());
        out.extend_from_slice(&payload);
        out
    }

    /// Parses exactly one frame.
    pub fn deserialize(bytes: &[u8]) -> Result<Self, WireError> {
        if bytes.len() < HEADER_LEN {
            return Err(WireError::Truncated {
                needed: HEADER_LEN,
                got: bytes.len(),
            });
        }
        let len = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
        let payload = &bytes[HEADER_LEN..];
        if payload.len() < len {
            return Err(WireError::Truncated {
                needed: HEADER_LEN + len,
                got: bytes.len(),
            });
        }
        if payload.len() > len {
            return Err(WireError::LengthMismatch {
                expected: len,
                found: payload.len(),
            });
        }
        Self::from_parts(
            bytes[4],
            u16::from_le_bytes([bytes[5], bytes[6]]),
            u16::from_le_bytes([bytes[7], bytes[8]]),
            payload,
        )
    }

    fn from_parts(ty: u8, round: u16, qubits: u16, payload: &[u8]) -> Result<Self, WireError> {
        let expect_len = |expected: usize| {
            if payload.len() == expected {
                Ok(())
            } else {
                Err(WireError::LengthMismatch {
                    expected,
                    found: payload.len(),
                })
            }
        };
        match ty {
            REGISTER_STATE => {
                if usize::from(qubits) > MAX_ARITY + 1 {
                    return Err(WireError::TooManyQubits(qubits));
                }
                expect_len(8usize << qubits)?;
                let amplitudes: Vec<f64> = payload
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect();
                let norm: f64 = amplitudes.iter().map(|a| a * a).sum();
                if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
                    return Err(WireError::Norm(norm));
                }
                Ok(WireMessage::RegisterState {
                    round,
                    qubits,
                    amplitudes,
                })
            }
            DEGREE_ANNOUNCE => {
                expect_len(2)?;
                Ok(WireMessage::DegreeAnnounce {
                    round,
                    degree: u16::from_le_bytes([payload[0], payload[1]]),
                })
            }
            TERMINATE => {
                expect_len(0)?;
                Ok(WireMessage::Terminate { round })
            }
            HELLO => {
                expect_len(9)?;
                Ok(WireMessage::Hello {
                    role: Role::from_code(payload[0])?,
                    fingerprint: u64::from_le_bytes(payload[1..9].try_into().unwrap()),
                })
            }
            other => Err(WireError::UnknownType(other)),
        }
    }
}

pub fn write_frame<W: Write>(w: &mut W, msg: &WireMessage) -> Result<(), WireError> {
    w.write_all(&msg.serialize())
        .and_then(|_| w.flush())
        .map_err(WireError::ConnectionLost)
}

pub fn read_frame<R: Read>(r: &mut R) -> Result<WireMessage, WireError> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header).map_err(WireError::ConnectionLost)?;
    let len = u32::from_le_bytes(header[0..4].try_into().unwrap()) as usize;
    // Bound the allocation before trusting the length field.
    if len > 8usize << (MAX_ARITY + 1) {
        return Err(WireError::LengthMismatch {
            expected: 8 << (MAX_ARITY + 1),
            found: len,
        });
    }
    let mut payload = vec![0u8; len];
    r.read_exact(&mut payload).map_err(WireError::ConnectionLost)?;
    WireMessage::from_parts(
        header[4],
        u16::from_le_bytes([header[5], header[6]]),
        u16::from_le_bytes([header[7], header[8]]),
        &payload,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn terminate_is_header_only() {
        let bytes = WireMessage::Terminate { round: 3 }.serialize();
        assert_eq!(bytes.len(), 9);
        assert_eq!(bytes, vec![0, 0, 0, 0, 3, 3, 0, 0, 0]);
    }

    #[test]
    fn single_qubit_register_payload() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let msg = WireMessage::RegisterState {
            round: 0,
            qubits: 1,
            amplitudes: vec![h, -h],
        };
        let bytes = msg.serialize();
        assert_eq!(bytes.len(), 9 + 16);
        assert_eq!(&bytes[0..4], &16u32.to_le_bytes());
        assert_eq!(WireMessage::deserialize(&bytes).unwrap(), msg);
    }

    #[test]
    fn rejects_bad_frames() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let good = WireMessage::RegisterState {
            round: 1,
            qubits: 1,
            amplitudes: vec![h, h],
        }
        .serialize();
        assert!(matches!(
            WireMessage::deserialize(&good[..good.len() - 1]),
            Err(WireError::Truncated { .. })
        ));
        assert!(matches!(WireMessage::deserialize(&good[..5]), Err(WireError::Truncated { .. })));

        let mut bad_type = WireMessage::Terminate { round: 0 }.serialize();
        bad_type[4] = 9;
        assert!(matches!(WireMessage::deserialize(&bad_type), Err(WireError::UnknownType(9))));

        let unnormalized = WireMessage::RegisterState {
            round: 0,
            qubits: 1,
            amplitudes: vec![1.0, 1.0],
        }
        .serialize();
        assert!(matches!(WireMessage::deserialize(&unnormalized), Err(WireError::Norm(_))));

        let mut wrong_count = good.clone();
        wrong_count[7] = 2;
        assert!(matches!(
            WireMessage::deserialize(&wrong_count),
            Err(WireError::LengthMismatch { expected: 32, found: 16 })
        ));
    }

    #[test]
    fn frames_over_a_byte_stream() {
        let msgs = vec![
            WireMessage::Hello {
                role: Role::Bob,
                fingerprint: 0xdead_beef,
            },
            WireMessage::DegreeAnnounce { round: 2, degree: 5 },
            WireMessage::Terminate { round: 4 },
        ];
        let mut buf = Vec::new();
        for m in &msgs {
            write_frame(&mut buf, m).unwrap();
        }
        let mut cursor = io::Cursor::new(buf);
        for m in &msgs {
            assert_eq!(&read_frame(&mut cursor).unwrap(), m);
        }
        assert!(matches!(read_frame(&mut cursor), Err(WireError::ConnectionLost(_))));
    }

    proptest! {
        #[test]
        fn register_state_round_trip(raw in prop::collection::vec(-1.0f64..1.0, 1..64), round in 0u16..100) {
            let qubits = (raw.len() as f64).log2().ceil() as u16;
            let mut amplitudes = raw.clone();
            amplitudes.resize(1 << qubits, 0.0);
            let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            amplitudes.iter_mut().for_each(|a| *a /= norm);
            let msg = WireMessage::RegisterState { round, qubits, amplitudes };
            prop_assert_eq!(WireMessage::deserialize(&msg.serialize()).unwrap(), msg);
        }
    }
}
