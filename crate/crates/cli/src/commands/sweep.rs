use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use qxor_core::description::parse_description;
use qxor_core::oracle::{error_profile, ORACLE_MAX_ARITY};

use super::analyze::analyze;
use crate::output::{write_csv, write_json, Format};

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Directory of function files; every regular file is read.
    pub corpus: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Summary row; failed files come last with `status = error`.
#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub file: String,
    pub n: Option<usize>,
    pub degree: Option<u32>,
    pub sparsity: Option<usize>,
    pub l1: Option<f64>,
    pub bound_qubits: Option<u64>,
    pub max_exact_error: Option<f64>,
    pub max_comm: Option<u64>,
    pub status: &'static str,
    pub message: String,
}

const HEADER: [&str; 10] = [
    "file",
    "n",
    "degree",
    "sparsity",
    "l1",
    "bound_qubits",
    "max_exact_error",
    "max_comm",
    "status",
    "message",
];

fn sweep_file(path: &Path) -> Result<SweepRow> {
    let text = fs::read_to_string(path)?;
    let f = parse_description(&text)?.build()?;
    let a = analyze(&path.display().to_string(), &f, None)?;
    let (max_error, max_comm, status, message) = if f.arity() <= ORACLE_MAX_ARITY {
        let profile = error_profile(&f, &f.to_real())?;
        let err = profile.iter().map(|r| r.exact_error).fold(0.0, f64::max);
        let comm = profile.iter().map(|r| r.comm_max).max().unwrap_or(0);
        let ok = err <= 1e-9 && comm <= a.bound_qubits;
        (Some(err), Some(comm), if ok { "ok" } else { "fail" }, String::new())
    } else {
        (None, None, "ok", format!("n > {ORACLE_MAX_ARITY}: exact oracle skipped"))
    };
    Ok(SweepRow {
        file: file_name(path),
        n: Some(a.n),
        degree: Some(a.degree),
        sparsity: Some(a.sparsity),
        l1: Some(a.l1),
        bound_qubits: Some(a.bound_qubits),
        max_exact_error: max_error,
        max_comm,
        status,
        message,
    })
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn sweep(dir: &Path) -> Result<Vec<SweepRow>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let results: Vec<SweepRow> = files
        .par_iter()
        .map(|p| {
            sweep_file(p).unwrap_or_else(|e| SweepRow {
                file: file_name(p),
                n: None,
                degree: None,
                sparsity: None,
                l1: None,
                bound_qubits: None,
                max_exact_error: None,
                max_comm: None,
                status: "error",
                message: format!("{e:#}"),
            })
        })
        .collect();
    let (mut rows, errors): (Vec<_>, Vec<_>) = results.into_iter().partition(|r| r.status != "error");
    rows.extend(errors);
    Ok(rows)
}

pub fn run(args: &SweepArgs) -> Result<()> {
    let rows = sweep(&args.corpus)?;
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    if failed > 0 {
        eprintln!("{failed} of {} files failed or did not parse", rows.len());
    }
    match args.format {
        Format::Json => write_json(args.out.as_deref(), &rows),
        Format::Csv => write_csv(args.out.as_deref(), &rows, &HEADER),
    }
}
