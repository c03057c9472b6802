//! Bounded-error pipeline: LP approximation `g` of `f`, sparsified `h`,
//! then a majority over repeated runs on `h`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::boolean::{gf2_degree, BooleanFunction};
use crate::error::{Error, Result};
use crate::fourier::{approx_l1, wht};
use crate::sampler::{hoeffding_tail, sparsify, sup_distance, SparsifierParams};

use super::{ProtocolConfig, ProtocolInstance, RepeatedOutcome};

/// Cap on the repetition search in [`repetitions_for`].
const MAX_REPS: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    /// Failure probability allowed for one sparsification draw.
    pub lambda: f64,
    /// Draws of `h` tried before giving up.
    pub max_draws: usize,
    pub seed: u64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            lambda: 0.9,
            max_draws: 16,
            seed: 0,
        }
    }
}

/// Stage parameters of one pipeline instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub eps: f64,
    pub degree: u32,
    /// `‖ĝ‖₁` of the LP solution.
    pub l1: f64,
    /// `M`; 0 when no sparsification ran.
    pub samples: u64,
    pub lambda: f64,
    pub draws: usize,
    /// `‖ĥ‖₀`.
    pub sparsity: usize,
    /// `‖g − h‖_∞` of the accepted draw.
    pub g_h_distance: f64,
    /// `‖f − h‖_∞`, at most `2 eps`.
    pub f_h_distance: f64,
    /// `2^d ‖f − h‖_∞` bound on a single run.
    pub per_run_error: f64,
    pub reps: usize,
}

/// Smallest odd `r` whose majority of `r` runs, each wrong with
/// probability at most `p < 1/2`, is wrong with probability at most
/// `target`: `2 exp(-r (1 - 2p)² / 4) ≤ target`.
pub fn repetitions_for(p: f64, target: f64) -> Result<usize> {
    if !(0.0..0.5).contains(&p) || !(target > 0.0) {
        return Err(Error::Precondition(format!(
            "repetitions need 0 <= p < 1/2 and target > 0 (got p = {p}, target = {target})"
        )));
    }
    if p == 0.0 {
        return Ok(1);
    }
    let mut r = 1;
    while hoeffding_tail(r as u64, r as f64 * (1.0 - 2.0 * p)) > target {
        r += 2;
        if r > MAX_REPS {
            return Err(Error::Precondition(format!("more than {MAX_REPS} repetitions needed")));
        }
    }
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct BoundedErrorInstance {
    instance: ProtocolInstance,
    report: PipelineReport,
}

impl BoundedErrorInstance {
    pub fn instance(&self) -> &ProtocolInstance {
        &self.instance
    }

    pub fn report(&self) -> &PipelineReport {
        &self.report
    }

    /// Majority over `report().reps` runs with streams derived from `seed`.
    pub fn run(&self, x: BitVector, y: BitVector, seed: u64) -> Result<RepeatedOutcome> {
        self.instance.run_repeated(x, y, self.report.reps, seed)
    }
}

/// Requires `0 ≤ eps < 2^{-d-4}`; `eps = 0` is the exact protocol.
pub fn pipeline_bounded_error<R: Rng + ?Sized>(
    f: &BooleanFunction,
    eps: f64,
    params: &PipelineParams,
    rng: &mut R,
) -> Result<BoundedErrorInstance> {
    let n = f.arity();
    let d = gf2_degree(f);
    let limit = 2f64.powi(-(d as i32) - 4);
    if !(eps >= 0.0 && eps < limit) {
        return Err(Error::Precondition(format!(
            "eps = {eps} outside [0, 2^-(d+4)) = [0, {limit}) for d = {d}"
        )));
    }
    if eps == 0.0 {
        let instance = ProtocolInstance::exact(f.clone(), params.seed)?;
        let report = PipelineReport {
            eps,
            degree: d,
            l1: wht(f).l1(),
            samples: 0,
            lambda: params.lambda,
            draws: 0,
            sparsity: instance.sparsity(),
            g_h_distance: 0.0,
            f_h_distance: 0.0,
            per_run_error: 0.0,
            reps: 1,
        };
        return Ok(BoundedErrorInstance { instance, report });
    }

    let approx = approx_l1(f, eps)?;
    let g = approx.g;
    let l1 = wht(&g).l1();
    let sparsifier = SparsifierParams::for_target(l1, n, eps, params.lambda)?;
    let mut accepted = None;
    let mut draws = 0;
    while draws < params.max_draws {
        draws += 1;
        let h = sparsify(&g, &sparsifier, rng)?;
        let dist = sup_distance(&g, &h);
        if dist <= eps {
            accepted = Some((h, dist));
            break;
        }
    }
    let (h, g_h_distance) = accepted.ok_or_else(|| {
        Error::Precondition(format!(
            "no sparsification within eps = {eps} after {draws} draws of M = {}",
            sparsifier.samples
        ))
    })?;
    let f_h_distance = sup_distance(&f.to_real(), &h);
    let run_eps = 2.0 * eps;
    let per_run_error = 2f64.powi(d as i32) * run_eps;
    let reps = repetitions_for(per_run_error, eps)?;
    let instance = ProtocolInstance::new(f.clone(), h, ProtocolConfig::approximate(run_eps, params.seed))?;
    let report = PipelineReport {
        eps,
        degree: d,
        l1,
        samples: sparsifier.samples,
        lambda: params.lambda,
        draws,
        sparsity: instance.sparsity(),
        g_h_distance,
        f_h_distance,
        per_run_error,
        reps,
    };
    Ok(BoundedErrorInstance { instance, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn repetition_counts() {
        assert_eq!(repetitions_for(0.0, 0.01).unwrap(), 1);
        // (1 - 1/8)² r / 4 ≥ ln(2 · 2^11)  ⇒  r = 45
        assert_eq!(repetitions_for(1.0 / 16.0, 2f64.powi(-11)).unwrap(), 45);
        assert!(repetitions_for(0.5, 0.1).is_err());
        for &(p, target) in &[(0.1, 0.05), (0.25, 1e-3), (0.01, 1e-6)] {
            let r = repetitions_for(p, target).unwrap();
            assert_eq!(r % 2, 1);
            assert!(hoeffding_tail(r as u64, r as f64 * (1.0 - 2.0 * p)) <= target);
            assert!(r == 1 || hoeffding_tail(r as u64 - 2, (r - 2) as f64 * (1.0 - 2.0 * p)) > target);
        }
    }

    #[test]
    fn zero_eps_is_exact() {
        let f = BooleanFunction::from_signs(2, vec![1, 1, 1, -1]).unwrap();
        let p = pipeline_bounded_error(&f, 0.0, &PipelineParams::default(), &mut seeded(0)).unwrap();
        assert_eq!(p.report().reps, 1);
        assert_eq!(p.instance().config().mode, super::super::Mode::Exact);
    }

    #[test]
    fn single_character_pipeline() {
        let s = BitVector::new(3, 0b101).unwrap();
        let f = BooleanFunction::from_fn(3, |z| s.character(z)).unwrap();
        let eps = 0.01;
        let p = pipeline_bounded_error(&f, eps, &PipelineParams::default(), &mut seeded(1)).unwrap();
        assert_eq!(p.report().sparsity, 1);
        assert!(p.report().f_h_distance <= 2.0 * eps + 1e-12);
        let x = BitVector::new(3, 0b110).unwrap();
        let y = BitVector::new(3, 0b011).unwrap();
        let out = p.run(x, y, 5).unwrap();
        assert_eq!(out.answer, f.evaluate_xor(x, y));
    }

    #[test]
    fn eps_out_of_range() {
        let f = BooleanFunction::from_signs(2, vec![1, 1, 1, -1]).unwrap();
        let err = pipeline_bounded_error(&f, 2f64.powi(-6), &PipelineParams::default(), &mut seeded(0));
        assert!(matches!(err, Err(Error::Precondition(_))));
    }
}
