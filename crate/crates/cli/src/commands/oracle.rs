use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use rand::Rng;
use serde::Serialize;

use qxor_core::oracle::{error_profile, monte_carlo_instance, ORACLE_MAX_ARITY};
use qxor_core::protocol::{ProtocolConfig, ProtocolInstance};
use qxor_core::rng::seeded;
use qxor_core::{approx_l1, check_derivative_drift, gf2_degree, BitVector, BooleanFunction, RealFunction};

use crate::input::load_description;
use crate::output::{write_csv, write_json, Format};
use crate::UsageError;

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Function file or inline family.
    pub function: String,
    #[arg(long, value_parser = ["exact", "approx"], default_value = "exact")]
    pub mode: String,
    /// Approximation levels; `g` is the minimum-ℓ1 approximation at each.
    #[arg(long = "eps-profile", value_delimiter = ',', default_value = "0.01")]
    pub eps_profile: Vec<f64>,
    /// Estimate errors by sampling this many runs per z instead of exact
    /// enumeration.
    #[arg(long = "monte-carlo")]
    pub monte_carlo: Option<u64>,
    /// Emit the derivative-bound table (k ≤ 3) instead of error rows.
    #[arg(long)]
    pub derivative_drift: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct ErrorRow {
    pub function: String,
    pub mode: String,
    pub eps: f64,
    pub z: BitVector,
    pub method: &'static str,
    pub error: f64,
    pub stderr: f64,
    pub bound: f64,
    pub comm: Option<u64>,
    pub bound_comm: u64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
struct DriftRow {
    function: String,
    eps: f64,
    k: usize,
    directions: String,
    lhs: f64,
    rhs: f64,
    ok: bool,
}

/// `(eps, g)` pairs for the requested mode.
fn approximants(f: &BooleanFunction, mode: &str, profile: &[f64]) -> Result<Vec<(f64, RealFunction)>> {
    if mode == "exact" {
        return Ok(vec![(0.0, f.to_real())]);
    }
    let d = gf2_degree(f);
    profile
        .iter()
        .map(|&eps| {
            if !(eps > 0.0 && eps < 1.0) {
                bail!(UsageError(format!("eps {eps} must lie in (0, 1)")));
            }
            if eps >= 2f64.powi(-(d as i32) - 1) {
                eprintln!("warning: eps = {eps} is not below 2^-(d+1) for d = {d}; the bound column may not hold");
            }
            Ok((eps, approx_l1(f, eps)?.g))
        })
        .collect()
}

pub fn error_rows(
    label: &str,
    f: &BooleanFunction,
    mode: &str,
    profile: &[f64],
    monte_carlo: Option<u64>,
    seed: u64,
) -> Result<Vec<ErrorRow>> {
    let n = f.arity();
    if n > ORACLE_MAX_ARITY && monte_carlo.is_none() {
        bail!(UsageError(format!(
            "exact enumeration supports n <= {ORACLE_MAX_ARITY} (got n = {n}); rerun with --monte-carlo <trials>"
        )));
    }
    let mut rows = Vec::new();
    let mut rng = seeded(seed);
    for (eps, g) in approximants(f, mode, profile)? {
        let cfg = if mode == "exact" {
            ProtocolConfig::exact(seed)
        } else {
            ProtocolConfig::approximate(eps, seed)
        };
        let instance = ProtocolInstance::new(f.clone(), g.clone(), cfg)?;
        let bound_comm = instance.cost_bound().exact;
        match monte_carlo {
            None => {
                for r in error_profile(f, &g)? {
                    rows.push(ErrorRow {
                        function: label.to_string(),
                        mode: mode.to_string(),
                        eps,
                        z: r.z,
                        method: "exact",
                        error: r.exact_error,
                        stderr: 0.0,
                        bound: r.bound,
                        comm: Some(r.comm_max),
                        bound_comm,
                        pass: r.exact_error <= r.bound + 1e-9 && r.comm_max <= bound_comm,
                    });
                }
            }
            Some(trials) => {
                for z in BitVector::all(n) {
                    let mc = monte_carlo_instance(&instance, z, trials, &mut rng)?;
                    let bound = instance.error_bound();
                    rows.push(ErrorRow {
                        function: label.to_string(),
                        mode: mode.to_string(),
                        eps,
                        z,
                        method: "monte_carlo",
                        error: mc.estimate,
                        stderr: mc.stderr,
                        bound,
                        comm: None,
                        bound_comm,
                        pass: mc.estimate <= bound + 4.0 * mc.stderr + 1e-9,
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn drift_rows(label: &str, f: &BooleanFunction, profile: &[f64], seed: u64) -> Result<Vec<DriftRow>> {
    let n = f.arity();
    let mut rng = seeded(seed);
    let mut rows = Vec::new();
    for (eps, g) in approximants(f, "approx", profile)? {
        for k in 0..=3 {
            let ts: Vec<BitVector> = (0..k)
                .map(|_| BitVector::from_index(n, rng.gen_range(0..1usize << n)))
                .collect();
            let c = check_derivative_drift(f, &g, &ts);
            rows.push(DriftRow {
                function: label.to_string(),
                eps,
                k,
                directions: ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "),
                lhs: c.lhs,
                rhs: c.rhs,
                ok: c.ok,
            });
        }
    }
    Ok(rows)
}

pub fn run(args: &OracleArgs) -> Result<()> {
    let f = load_description(&args.function)?.build()?;
    let out = args.out.as_deref();
    if args.derivative_drift {
        let rows = drift_rows(&args.function, &f, &args.eps_profile, args.seed)?;
        return match args.format {
            Format::Json => write_json(out, &rows),
            Format::Csv => write_csv(out, &rows, &[]),
        };
    }
    let rows = error_rows(&args.function, &f, &args.mode, &args.eps_profile, args.monte_carlo, args.seed)?;
    match args.format {
        Format::Json => write_json(out, &rows),
        Format::Csv => write_csv(out, &rows, &[]),
    }
}
