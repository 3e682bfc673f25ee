//! Compiler and simulator for rectangular Mach-Zehnder interferometer meshes.
//!
//! The numerical core ([`linalg`], [`mesh`]) is generic over the real
//! scalar type through [`scalar::Real`]; the aliases below fix it to `f64`,
//! which is what the device model, calibration and experiment layers use.

pub mod calibration;
pub mod error;
pub mod experiment;
pub mod hardware;
pub mod linalg;
pub mod mesh;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix = linalg::ComplexMatrix<f64>;
pub type Unitary = linalg::Unitary<f64>;
pub type AmplitudeMatrix = linalg::AmplitudeMatrix<f64>;
pub type MeshSettings = mesh::MeshSettings<f64>;
pub type UnitCellSettings = mesh::UnitCellSettings<f64>;

pub type ComplexMatrix32 = linalg::ComplexMatrix<f32>;
pub type Unitary32 = linalg::Unitary<f32>;
pub type MeshSettings32 = mesh::MeshSettings<f32>;
