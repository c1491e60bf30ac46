//! Numerical verification of partial, uniform and sectional hyperbolicity of
//! flows through fields of indefinite quadratic forms (infinitesimal Lyapunov
//! functions).
//!
//! The numeric core is generic over the scalar type ([`Scalar`], implemented
//! for `f32` and `f64`); the `*64` aliases below fix it to `f64`, which is what
//! the command-line front end uses.

pub mod cocycle;
pub mod error;
pub mod fields;
pub mod linalg;
pub mod qforms;
pub mod scalar;
pub mod separation;
pub mod splitting;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix64 = linalg::Matrix<f64>;
pub type Form64 = qforms::QuadraticFormField<f64>;
pub type Field64 = fields::VectorFieldModel<f64>;
pub type Region64 = fields::Region<f64>;
pub type SeparationCertificate64 = separation::SeparationCertificate<f64>;
pub type MonotonicityCertificate64 = separation::MonotonicityCertificate<f64>;
pub type Trajectory64 = cocycle::TrajectoryCocycle<f64>;
pub type SplittingEstimate64 = splitting::SplittingEstimate<f64>;
