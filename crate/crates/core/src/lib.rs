//! Simulation of layered noisy variational circuits in the Liouville (Pauli
//! transfer matrix) picture.
//!
//! The library covers the Pauli-basis substrate ([`pauli`], [`ptm`],
//! [`state`], [`haar`]), noise channels and their scalar descriptors
//! ([`channels`]), the alternating 2-design/noise toy model with its analytic
//! purity and gradient-variance predictors ([`toy`]), and noisy QAOA MaxCut
//! experiments ([`qaoa`]).

pub mod channels;
pub mod error;
pub mod haar;
pub mod linalg;
pub mod pauli;
pub mod ptm;
pub mod qaoa;
pub mod rng;
pub mod state;
pub mod stats;
pub mod tol;
pub mod toy;

pub use channels::{Channel, LindbladSpec, NoiseCoefficients};
pub use error::{Error, Result};
pub use linalg::{CMatrix, RMatrix};
pub use pauli::{pauli_op, unvectorize, vectorize, PauliIndex, VectorizedOperator};
pub use ptm::{ptm_from_kraus, Ptm};
pub use state::{fidelity, purity, relative_entropy, schatten_norm, trace_distance, DensityMatrix};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
