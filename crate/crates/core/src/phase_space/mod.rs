//! Wigner functions of density operators and histogram comparisons with
//! classical invariant measures.
//!
//! Normalization: `W = (1/(2 pi hbar)) int exp(-i xi p/hbar) rho(X + xi/2, X - xi/2) dxi`,
//! so `int W dx dp = 1` and `|W| <= 1/(pi hbar)`.

mod invariant;
mod overlap;
mod wigner;

pub use invariant::{invariant_density, invariant_wigner};
pub use overlap::{histogram_overlap, OverlapReport};
pub use wigner::{
    hermite_functions, quadrature_density, wigner_transform, Quadrature, WignerGrid, WignerTransform,
    COVERAGE_TOLERANCE,
};
