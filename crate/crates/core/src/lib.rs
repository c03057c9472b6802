//! Classical simulation of a quantum communication protocol for XOR
//! functions `F(x, y) = f(x ⊕ y)`, with the Fourier-analytic tools it is
//! built from and an exact branch-enumeration checker.
//!
//! Boolean functions use the ±1 convention (`true ↦ −1`). Bit vectors index
//! tables with `z_1` as the most significant bit.

pub mod bits;
pub mod boolean;
pub mod description;
pub mod encoding;
pub mod error;
pub mod fourier;
pub mod lp;
pub mod oracle;
pub mod protocol;
pub mod qsim;
pub mod rng;
pub mod sampler;
pub mod transport;

pub use bits::{BitVector, MAX_ARITY};
pub use boolean::{derivative, gf2_degree, iterated_derivative, BooleanFunction, Derivative, RealFunction};
pub use description::{parse_description, parse_function, Family, FunctionDescription};
pub use encoding::{build_encoding, SumsetEncoding};
pub use error::{Error, Result};
pub use fourier::{approx_l1, inverse_wht, iterated_sumset, sumset, wht, FourierSpectrum, L1Approximation, SupportSet};
pub use oracle::{check_derivative_drift, exact_error, monte_carlo_error, worst_case_error, ErrorReport};
pub use protocol::{
    cost_bound, pipeline_bounded_error, run_exact, run_protocol, run_repeated, CostBound, Mode, ProtocolConfig,
    ProtocolInstance, Transcript,
};
pub use qsim::QuantumState;
pub use sampler::{l1_sample, required_samples, sparsify, sup_distance, SparsifierParams};
pub use transport::{run_networked, WireMessage};
