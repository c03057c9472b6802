//! Fourier ℓ1-sampling and sparsification of an ℓ1-bounded approximator.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::bits::BitVector;
use crate::boolean::RealFunction;
use crate::error::{Error, Result};
use crate::fourier::{inverse_wht, wht, FourierSpectrum};

/// Hoeffding tail for a sum of `num_vars` variables in `[-1, 1]`:
/// `Pr[|X - E X| > t] < 2 exp(-t² / (4 num_vars))`.
pub fn hoeffding_tail(num_vars: u64, t: f64) -> f64 {
    assert!(num_vars >= 1 && t >= 0.0);
    2.0 * (-t * t / (4.0 * num_vars as f64)).exp()
}

/// Largest sample count accepted by [`required_samples`].
pub const MAX_SAMPLES: u64 = 1 << 31;

fn failure_bound(l1: f64, n: usize, delta: f64, m: u64) -> f64 {
    2f64.powi(n as i32 + 1) * (-delta * delta * m as f64 / (4.0 * l1 * l1)).exp()
}

/// Smallest `M` with `2^{n+1} exp(-δ² M / (4 l1²)) ≤ λ`.
pub fn required_samples(l1: f64, n: usize, delta: f64, lambda: f64) -> Result<u64> {
    if !(l1 > 0.0 && delta > 0.0 && lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Precondition(format!(
            "required_samples needs l1 > 0, delta > 0, 0 < lambda < 1 (got {l1}, {delta}, {lambda})"
        )));
    }
    let exact = 4.0 * l1 * l1 / (delta * delta) * ((n as f64 + 1.0) * std::f64::consts::LN_2 - lambda.ln());
    if exact > MAX_SAMPLES as f64 {
        return Err(Error::SampleOverflow(exact));
    }
    let mut m = exact.ceil().max(1.0) as u64;
    // Repair floating-point rounding at the boundary.
    while m > 1 && failure_bound(l1, n, delta, m - 1) <= lambda {
        m -= 1;
    }
    while failure_bound(l1, n, delta, m) > lambda {
        m += 1;
    }
    if m > MAX_SAMPLES {
        return Err(Error::SampleOverflow(m as f64));
    }
    Ok(m)
}

/// Sparsifier parameters: target error `delta`, failure probability
/// `lambda`, and sample count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparsifierParams {
    pub delta: f64,
    pub lambda: f64,
    pub samples: u64,
}

impl SparsifierParams {
    pub fn new(delta: f64, lambda: f64, samples: u64) -> Result<Self> {
        if !(delta > 0.0 && lambda > 0.0 && lambda < 1.0 && samples >= 1) {
            return Err(Error::Precondition(format!(
                "invalid sparsifier parameters delta={delta} lambda={lambda} M={samples}"
            )));
        }
        Ok(Self {
            delta,
            lambda,
            samples,
        })
    }

    /// Uses [`required_samples`] for `M`.
    pub fn for_target(l1: f64, n: usize, delta: f64, lambda: f64) -> Result<Self> {
        Self::new(delta, lambda, required_samples(l1, n, delta, lambda)?)
    }
}

/// Draws α with probability `|ĝ(α)| / ‖ĝ‖₁` by inverse CDF over the sorted
/// support.
pub fn l1_sample<R: Rng + ?Sized>(s: &FourierSpectrum, rng: &mut R) -> Result<BitVector> {
    let entries = s.raw_entries();
    let (&(last, _), _) = entries.split_last().ok_or(Error::EmptySpectrum)?;
    let target = rng.gen::<f64>() * s.l1();
    let mut acc = 0.0;
    for &(alpha, c) in entries {
        acc += c.abs();
        if target < acc {
            return Ok(BitVector::from_index(s.arity(), alpha as usize));
        }
    }
    Ok(BitVector::from_index(s.arity(), last as usize))
}

/// Per-character hit counts of `samples` independent ℓ1-samples, drawn as
/// one multinomial vector through conditional binomials. The joint law is
/// identical to drawing the samples one at a time.
fn l1_sample_counts<R: Rng + ?Sized>(s: &FourierSpectrum, samples: u64, rng: &mut R) -> Vec<u64> {
    let entries = s.raw_entries();
    let mut remaining = samples;
    let mut mass_left = s.l1();
    let mut counts = Vec::with_capacity(entries.len());
    for (i, &(_, c)) in entries.iter().enumerate() {
        let k = if i + 1 == entries.len() || remaining == 0 {
            remaining
        } else {
            let p = (c.abs() / mass_left).clamp(0.0, 1.0);
            Binomial::new(remaining, p)
                .expect("probability in [0,1]")
                .sample(rng)
        };
        counts.push(k);
        remaining -= k;
        mass_left -= c.abs();
    }
    counts
}

/// Spectrum of `h = (‖ĝ‖₁/M) Σ_i sign(ĝ(α_i)) χ_{α_i}` with repeated
/// characters merged.
pub fn sparsify_spectrum<R: Rng + ?Sized>(
    g: &RealFunction,
    params: &SparsifierParams,
    rng: &mut R,
) -> Result<FourierSpectrum> {
    let spectrum = wht(g);
    if spectrum.l0() == 0 {
        return Err(Error::EmptySpectrum);
    }
    let l1 = spectrum.l1();
    let scale = l1 / params.samples as f64;
    let counts = l1_sample_counts(&spectrum, params.samples, rng);
    let mut dense = vec![0.0; 1 << g.arity()];
    for (&(alpha, c), &k) in spectrum.raw_entries().iter().zip(&counts) {
        dense[alpha as usize] = c.signum() * scale * k as f64;
    }
    Ok(FourierSpectrum::from_dense(g.arity(), &dense))
}

/// Grolmusz sparsification: with `M` from [`required_samples`],
/// `Pr[∀x |h(x) - g(x)| ≤ δ] ≥ 1 - λ`.
pub fn sparsify<R: Rng + ?Sized>(
    g: &RealFunction,
    params: &SparsifierParams,
    rng: &mut R,
) -> Result<RealFunction> {
    Ok(inverse_wht(&sparsify_spectrum(g, params, rng)?))
}

/// `max_x |a(x) - b(x)|`.
pub fn sup_distance(a: &RealFunction, b: &RealFunction) -> f64 {
    assert_eq!(a.arity(), b.arity(), "sup_distance of functions with different arity");
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
