//! Complex matrix foundation: dense matrices, unitarity checks, Haar
//! sampling and the amplitude fidelity metric.

mod fidelity;
mod haar;
pub mod io;
mod matrix;

pub use fidelity::amplitude_fidelity;
pub use haar::{haar_random_unitary, householder_qr};
pub use matrix::{is_unitary, AmplitudeMatrix, ComplexMatrix, Unitary};
