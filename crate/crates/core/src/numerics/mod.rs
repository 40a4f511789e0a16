//! Foundation layer: dense complex linear algebra, random streams and the
//! fixed-step integrator shared by every other module.

pub mod band;
pub mod eigen;
pub mod integrate;
pub mod matrix;
pub mod rng;

pub use band::BandMatrix;
pub use eigen::HermitianEigen;
pub use integrate::{rk4_step, OdeState};
pub use matrix::{inner, norm_sqr, ComplexMatrix};
pub use rng::{complex_wiener_increment, gauss, RngStream};

pub type C64 = num_complex::Complex64;

/// Hermiticity tolerance for matrices that claim to preserve it.
pub const HERMITIAN_TOL: f64 = 1e-12;
