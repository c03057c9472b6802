//! Message passing between Alice and Bob.
//!
//! Register states travel as classical amplitude vectors; qubits are counted
//! by each frame's declared `qubit_count`, not by its byte size.

mod wire;

use std::collections::VecDeque;
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::protocol::{Bob, ProtocolInstance, PublicData, Transcript};

pub use wire::{read_frame, write_frame, Role, WireError, WireMessage, HEADER_LEN};

/// Qubits carried by REGISTER_STATE frames in each direction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitLedger {
    pub alice_to_bob: u64,
    pub bob_to_alice: u64,
}

impl QubitLedger {
    pub fn total(&self) -> u64 {
        self.alice_to_bob + self.bob_to_alice
    }

    fn record(&mut self, from: Role, msg: &WireMessage) {
        let q = u64::from(msg.qubit_count());
        match from {
            Role::Alice => self.alice_to_bob += q,
            Role::Bob => self.bob_to_alice += q,
        }
    }
}

/// One endpoint of a half-duplex channel.
pub trait Link {
    fn send(&mut self, msg: &WireMessage) -> Result<()>;
    fn recv(&mut self) -> Result<WireMessage>;
    fn ledger(&self) -> QubitLedger;
}

/// Alice's end of an in-process channel. Every message is pushed through
/// the wire encoding, and Bob answers synchronously.
pub struct LocalLink {
    bob: Bob,
    inbox: VecDeque<WireMessage>,
    ledger: QubitLedger,
}

impl LocalLink {
    pub fn new(bob: Bob) -> Self {
        Self {
            bob,
            inbox: VecDeque::new(),
            ledger: QubitLedger::default(),
        }
    }

    pub fn bob(&self) -> &Bob {
        &self.bob
    }
}

impl Link for LocalLink {
    fn send(&mut self, msg: &WireMessage) -> Result<()> {
        let msg = WireMessage::deserialize(&msg.serialize())?;
        self.ledger.record(Role::Alice, &msg);
        if let Some(reply) = self.bob.handle(msg)? {
            let reply = WireMessage::deserialize(&reply.serialize())?;
            self.ledger.record(Role::Bob, &reply);
            self.inbox.push_back(reply);
        }
        Ok(())
    }

    fn recv(&mut self) -> Result<WireMessage> {
        self.inbox
            .pop_front()
            .ok_or_else(|| WireError::Unexpected("recv with no pending reply".into()).into())
    }

    fn ledger(&self) -> QubitLedger {
        self.ledger
    }
}

/// Blocking TCP endpoint.
pub struct TcpLink {
    stream: TcpStream,
    role: Role,
    ledger: QubitLedger,
}

impl TcpLink {
    pub fn new(stream: TcpStream, role: Role) -> Result<Self> {
        stream
            .set_nodelay(true)
            .map_err(WireError::ConnectionLost)?;
        Ok(Self {
            stream,
            role,
            ledger: QubitLedger::default(),
        })
    }

    pub fn role(&self) -> Role {
        self.role
    }

    fn peer(&self) -> Role {
        match self.role {
            Role::Alice => Role::Bob,
            Role::Bob => Role::Alice,
        }
    }

    /// Exchanges HELLO frames; the connecting side speaks first. Fails if
    /// the peer claims the same role or holds different public data.
    pub fn handshake(&mut self, fingerprint: u64, initiator: bool) -> Result<()> {
        let hello = WireMessage::Hello {
            role: self.role,
            fingerprint,
        };
        if initiator {
            write_frame(&mut self.stream, &hello)?;
        }
        let reply = read_frame(&mut self.stream)?;
        if !initiator {
            write_frame(&mut self.stream, &hello)?;
        }
        match reply {
            WireMessage::Hello { role, .. } if role == self.role => Err(WireError::Handshake(format!(
                "both endpoints claim role {role}"
            ))
            .into()),
            WireMessage::Hello { fingerprint: fp, .. } if fp != fingerprint => Err(WireError::Handshake(
                format!("public data differs (local {fingerprint:016x}, peer {fp:016x})"),
            )
            .into()),
            WireMessage::Hello { .. } => Ok(()),
            other => Err(WireError::Handshake(format!("expected HELLO, got {}", other.kind())).into()),
        }
    }
}

impl Link for TcpLink {
    fn send(&mut self, msg: &WireMessage) -> Result<()> {
        write_frame(&mut self.stream, msg)?;
        self.ledger.record(self.role, msg);
        Ok(())
    }

    fn recv(&mut self) -> Result<WireMessage> {
        let msg = read_frame(&mut self.stream)?;
        self.ledger.record(self.peer(), &msg);
        Ok(msg)
    }

    fn ledger(&self) -> QubitLedger {
        self.ledger
    }
}

/// Bob's side of a TCP session. Needs only the public data and `y`.
pub fn bob_session(stream: TcpStream, public: Arc<PublicData>, y: BitVector, initiator: bool) -> Result<QubitLedger> {
    let mut link = TcpLink::new(stream, Role::Bob)?;
    link.handshake(public.fingerprint(), initiator)?;
    let mut bob = Bob::new(public, y)?;
    bob.serve(&mut link)?;
    Ok(link.ledger())
}

/// Alice's side of a TCP session.
pub fn alice_session<R: Rng + ?Sized>(
    stream: TcpStream,
    instance: &ProtocolInstance,
    x: BitVector,
    initiator: bool,
    rng: &mut R,
) -> Result<(i8, Transcript, QubitLedger)> {
    let mut link = TcpLink::new(stream, Role::Alice)?;
    link.handshake(instance.public().fingerprint(), initiator)?;
    let (answer, transcript) = instance.alice(x)?.run(&mut link, rng)?;
    check_ledger(&link.ledger(), &transcript)?;
    Ok((answer, transcript, link.ledger()))
}

fn check_ledger(ledger: &QubitLedger, transcript: &Transcript) -> Result<()> {
    if ledger.total() != transcript.total_qubits {
        return Err(Error::Invariant(format!(
            "ledger counts {} qubits, transcript {}",
            ledger.total(),
            transcript.total_qubits
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkedRun {
    pub answer: i8,
    pub transcript: Transcript,
    pub alice_ledger: QubitLedger,
    pub bob_ledger: QubitLedger,
}

/// One run with Bob on his own thread behind a loopback TCP socket. Bob's
/// thread is handed the public data and `y` only.
pub fn run_networked<R: Rng + ?Sized>(
    instance: &ProtocolInstance,
    x: BitVector,
    y: BitVector,
    rng: &mut R,
) -> Result<NetworkedRun> {
    let listener = TcpListener::bind("127.0.0.1:0").map_err(WireError::ConnectionLost)?;
    let addr = listener.local_addr().map_err(WireError::ConnectionLost)?;
    let public = Arc::clone(instance.public());
    let bob = thread::spawn(move || -> Result<QubitLedger> {
        let (stream, _) = listener.accept().map_err(WireError::ConnectionLost)?;
        bob_session(stream, public, y, false)
    });
    let alice = TcpStream::connect(addr)
        .map_err(|e| Error::from(WireError::ConnectionLost(e)))
        .and_then(|stream| alice_session(stream, instance, x, true, rng));
    let bob_ledger = bob
        .join()
        .map_err(|_| Error::Invariant("Bob's thread panicked".into()))?;
    let (answer, transcript, alice_ledger) = alice?;
    let bob_ledger = bob_ledger?;
    if bob_ledger != alice_ledger {
        return Err(Error::Invariant(format!(
            "ledgers disagree: Alice {alice_ledger:?}, Bob {bob_ledger:?}"
        )));
    }
    Ok(NetworkedRun {
        answer,
        transcript,
        alice_ledger,
        bob_ledger,
    })
}
