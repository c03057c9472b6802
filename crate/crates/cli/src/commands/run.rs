use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use serde::Serialize;

use qxor_core::protocol::{
    pipeline_bounded_error, BoundedErrorInstance, Mode, PipelineParams, PipelineReport, ProtocolInstance, RoundRecord,
};
use qxor_core::rng::stream;
use qxor_core::{BitVector, BooleanFunction, Transcript};

use crate::input::{load_description, parse_bits};
use crate::output::{write_csv, write_json, Format};
use crate::UsageError;

/// Stream index used to build the sparsified approximation; run `i` uses
/// stream `i`.
pub const PIPELINE_STREAM: u64 = u64::MAX;

#[derive(Args, Debug, Clone)]
pub struct ProtocolArgs {
    #[arg(long, value_parser = ["exact", "approx"], default_value = "exact")]
    pub mode: String,
    /// Target error for `--mode approx`.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Odd repetition count; defaults to 1 in exact mode and to the
    /// pipeline's choice in approx mode.
    #[arg(long)]
    pub reps: Option<usize>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Function file or inline family.
    pub function: String,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A protocol instance plus how many runs to take the majority of.
pub struct Prepared {
    pub instance: ProtocolInstance,
    pub pipeline: Option<PipelineReport>,
    pub reps: usize,
}

pub fn prepare(f: &BooleanFunction, args: &ProtocolArgs) -> Result<Prepared> {
    let mode: Mode = args.mode.parse().map_err(UsageError)?;
    if let Some(r) = args.reps {
        if r % 2 == 0 {
            bail!(UsageError(format!("--reps must be odd, got {r}")));
        }
    }
    match mode {
        Mode::Exact => Ok(Prepared {
            instance: ProtocolInstance::exact(f.clone(), args.seed)?,
            pipeline: None,
            reps: args.reps.unwrap_or(1),
        }),
        Mode::Approximate => {
            let params = PipelineParams {
                seed: args.seed,
                ..PipelineParams::default()
            };
            let p: BoundedErrorInstance =
                pipeline_bounded_error(f, args.eps, &params, &mut stream(args.seed, PIPELINE_STREAM))?;
            Ok(Prepared {
                reps: args.reps.unwrap_or(p.report().reps),
                instance: p.instance().clone(),
                pipeline: Some(p.report().clone()),
            })
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Repetitions {
    pub reps: usize,
    pub plus: usize,
    pub minus: usize,
    pub qubits_per_run: Vec<u64>,
    pub total_qubits_all_runs: u64,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub function: String,
    pub mode: Mode,
    pub eps: f64,
    pub seed: u64,
    /// Rounds of the first run.
    pub rounds: Vec<RoundRecord>,
    pub terminated_by: qxor_core::protocol::Termination,
    /// Qubits of the first run.
    pub total_qubits: u64,
    pub classical_bits: u64,
    pub bound_qubits: u64,
    pub bound_qubits_rounded: f64,
    /// Majority answer.
    pub answer: i8,
    /// `f(x ⊕ y)`; unknown to a networked Alice.
    pub truth: Option<i8>,
    pub correct: Option<bool>,
    pub pipeline: Option<PipelineReport>,
    pub repetitions: Repetitions,
}

impl RunReport {
    pub fn new(
        function: &str,
        args: &ProtocolArgs,
        prepared: &Prepared,
        transcripts: &[Transcript],
        truth: Option<i8>,
    ) -> Self {
        let plus = transcripts.iter().filter(|t| t.answer == 1).count();
        let minus = transcripts.len() - plus;
        let answer = if plus > minus { 1 } else { -1 };
        let first = &transcripts[0];
        let bound = prepared.instance.cost_bound();
        let qubits_per_run: Vec<u64> = transcripts.iter().map(|t| t.total_qubits).collect();
        Self {
            function: function.to_string(),
            mode: prepared.instance.config().mode,
            eps: args.eps,
            seed: args.seed,
            rounds: first.rounds.clone(),
            terminated_by: first.terminated_by,
            total_qubits: first.total_qubits,
            classical_bits: first.classical_bits,
            bound_qubits: bound.exact,
            bound_qubits_rounded: bound.rounded,
            answer,
            truth,
            correct: truth.map(|t| t == answer),
            pipeline: prepared.pipeline.clone(),
            repetitions: Repetitions {
                reps: transcripts.len(),
                plus,
                minus,
                total_qubits_all_runs: qubits_per_run.iter().sum(),
                qubits_per_run,
            },
        }
    }
}

#[derive(Serialize)]
struct RunRow<'a> {
    function: &'a str,
    mode: Mode,
    eps: f64,
    seed: u64,
    rounds: usize,
    total_qubits: u64,
    classical_bits: u64,
    bound_qubits: u64,
    answer: i8,
    truth: Option<i8>,
    correct: Option<bool>,
    reps: usize,
}

pub fn emit(report: &RunReport, format: Format, out: Option<&std::path::Path>) -> Result<()> {
    match format {
        Format::Json => write_json(out, report),
        Format::Csv => write_csv(
            out,
            &[RunRow {
                function: &report.function,
                mode: report.mode,
                eps: report.eps,
                seed: report.seed,
                rounds: report.rounds.len(),
                total_qubits: report.total_qubits,
                classical_bits: report.classical_bits,
                bound_qubits: report.bound_qubits,
                answer: report.answer,
                truth: report.truth,
                correct: report.correct,
                reps: report.repetitions.reps,
            }],
            &[],
        ),
    }
}

pub fn run(args: &RunArgs) -> Result<()> {
    let f = load_description(&args.function)?.build()?;
    let n = f.arity();
    let x: BitVector = parse_bits("x", &args.x, n)?;
    let y: BitVector = parse_bits("y", &args.y, n)?;
    let prepared = prepare(&f, &args.protocol)?;
    if !prepared.instance.error_bound_applies() {
        eprintln!("warning: eps is not below 2^-(d+1); the per-run error bound does not apply");
    }
    let transcripts = (0..prepared.reps)
        .map(|i| {
            prepared
                .instance
                .run(x, y, &mut stream(args.protocol.seed, i as u64))
                .map(|(_, t)| t)
        })
        .collect::<qxor_core::Result<Vec<_>>>()?;
    let report = RunReport::new(&args.function, &args.protocol, &prepared, &transcripts, Some(f.evaluate_xor(x, y)));
    emit(&report, args.format, args.out.as_deref())
}
