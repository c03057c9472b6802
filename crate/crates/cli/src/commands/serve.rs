use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;

use qxor_core::rng::stream;
use qxor_core::transport::{Link, QubitLedger, Role, TcpLink};
use qxor_core::protocol::Bob;

use super::run::{emit, prepare, ProtocolArgs, RunReport};
use crate::input::{load_description, parse_bits};
use crate::output::{write_json, Format};
use crate::UsageError;

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, value_parser = ["alice", "bob"])]
    pub role: String,
    /// Function file or inline family; both endpoints must agree.
    #[arg(long)]
    pub function: String,
    /// Accept one connection instead of connecting out.
    #[arg(long)]
    pub listen: bool,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long)]
    pub port: u16,
    /// Alice's input.
    #[arg(long)]
    pub x: Option<String>,
    /// Bob's input.
    #[arg(long)]
    pub y: Option<String>,
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct BobReport {
    role: &'static str,
    function: String,
    runs: usize,
    ledger: QubitLedger,
}

fn connect(args: &ServeArgs) -> Result<TcpStream> {
    let addr = format!("{}:{}", args.host, args.port);
    if args.listen {
        let listener = TcpListener::bind(&addr).with_context(|| format!("binding {addr}"))?;
        eprintln!("listening on {}", listener.local_addr()?);
        Ok(listener.accept()?.0)
    } else {
        TcpStream::connect(&addr).with_context(|| format!("connecting to {addr}"))
    }
}

pub fn run(args: &ServeArgs) -> Result<()> {
    let role: Role = args.role.parse().map_err(UsageError)?;
    let f = load_description(&args.function)?.build()?;
    let n = f.arity();
    // Both sides derive the same instance from the public function and seed.
    let prepared = prepare(&f, &args.protocol)?;
    let fingerprint = prepared.instance.public().fingerprint();
    match role {
        Role::Alice => {
            let Some(x) = &args.x else {
                bail!(UsageError("--role alice needs --x".into()));
            };
            let x = parse_bits("x", x, n)?;
            let mut link = TcpLink::new(connect(args)?, Role::Alice)?;
            link.handshake(fingerprint, !args.listen)?;
            let alice = prepared.instance.alice(x)?;
            let mut transcripts = Vec::with_capacity(prepared.reps);
            for i in 0..prepared.reps {
                let (_, t) = alice.run(&mut link, &mut stream(args.protocol.seed, i as u64))?;
                transcripts.push(t);
            }
            let total: u64 = transcripts.iter().map(|t| t.total_qubits).sum();
            if link.ledger().total() != total {
                bail!("ledger counts {} qubits, transcripts {total}", link.ledger().total());
            }
            let report = RunReport::new(&args.function, &args.protocol, &prepared, &transcripts, None);
            emit(&report, args.format, args.out.as_deref())
        }
        Role::Bob => {
            let Some(y) = &args.y else {
                bail!(UsageError("--role bob needs --y".into()));
            };
            let y = parse_bits("y", y, n)?;
            let public = Arc::clone(prepared.instance.public());
            drop(prepared.instance);
            let mut link = TcpLink::new(connect(args)?, Role::Bob)?;
            link.handshake(fingerprint, !args.listen)?;
            for _ in 0..prepared.reps {
                Bob::new(Arc::clone(&public), y)?.serve(&mut link)?;
            }
            write_json(
                args.out.as_deref(),
                &BobReport {
                    role: "bob",
                    function: args.function.clone(),
                    runs: prepared.reps,
                    ledger: link.ledger(),
                },
            )
        }
    }
}
