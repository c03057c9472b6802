use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use serde::Serialize;

use qxor_core::{approx_l1, cost_bound, gf2_degree, wht, BooleanFunction, CostBound};

use crate::input::load_description;
use crate::output::{write_csv, write_json, Format};

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Function file or inline family.
    pub function: String,
    /// Also report the approximate ℓ1 norm at this approximation level.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub function: String,
    pub n: usize,
    pub degree: u32,
    pub sparsity: usize,
    pub l1: f64,
    pub l2: f64,
    pub eps: Option<f64>,
    pub l1_eps: Option<f64>,
    pub bound_qubits: u64,
    pub bound_qubits_rounded: f64,
}

pub fn analyze(label: &str, f: &BooleanFunction, eps: Option<f64>) -> Result<Analysis> {
    let spectrum = wht(f);
    let degree = gf2_degree(f);
    let CostBound { exact, rounded } = cost_bound(degree, spectrum.l0());
    let l1_eps = eps.map(|e| approx_l1(f, e).map(|a| a.value)).transpose()?;
    Ok(Analysis {
        function: label.to_string(),
        n: f.arity(),
        degree,
        sparsity: spectrum.l0(),
        l1: spectrum.l1(),
        l2: spectrum.l2(),
        eps,
        l1_eps,
        bound_qubits: exact,
        bound_qubits_rounded: rounded,
    })
}

pub fn run(args: &AnalyzeArgs) -> Result<()> {
    let desc = load_description(&args.function)?;
    let report = analyze(&desc.label(), &desc.build()?, args.eps)?;
    match args.format {
        Format::Json => write_json(args.out.as_deref(), &report),
        Format::Csv => write_csv(args.out.as_deref(), &[report], &[]),
    }
}
