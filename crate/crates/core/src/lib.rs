//! Numerical laboratory for probe-qubit thermalization.
//!
//! A single probe qubit is coupled to a quantum device (a GOE random-matrix
//! bath or a non-integrable spin chain), quenched from a product state, and
//! observed. The crate computes the exact quench dynamics from dense
//! diagonalization, the long-time fluctuations δ²(∞) both by closed sum over
//! eigenstate matrix elements and by windowed time integration, and the
//! closed-form random-matrix predictions that relate fluctuations, decay
//! rates, and the Hilbert-space dimension through the high-temperature
//! fluctuation-dissipation relation δ² = χ(N)·Γ̄⁻¹ with
//! χ(N) = C/(N_B·D̄(E)).

pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod models;
pub mod theory;
mod util;

pub use error::{Error, Result};
