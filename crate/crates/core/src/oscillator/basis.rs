use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    /// Truncation dimension `N`.
    pub dim: usize,
    pub hbar: f64,
    pub mass: f64,
    /// Frequency of the reference oscillator that defines the Fock basis.
    pub omega_ref: f64,
}

impl BasisSpec {
    /// Unit mass, unit reference frequency.
    pub fn new(dim: usize, hbar: f64) -> Result<Self> {
        let b = Self { dim, hbar, mass: 1.0, omega_ref: 1.0 };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::invalid(alloc::format!("basis dimension must be >= 2, got {}", self.dim)));
        }
        for (name, v) in [("hbar", self.hbar), ("mass", self.mass), ("omega_ref", self.omega_ref)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(alloc::format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// `sqrt(hbar / (2 M w))`, the coefficient of `a + a^dagger` in `x`.
    pub fn x_scale(&self) -> f64 {
        (self.hbar / (2.0 * self.mass * self.omega_ref)).sqrt()
    }

    /// `sqrt(hbar M w / 2)`, the coefficient of `i(a^dagger - a)` in `p`.
    pub fn p_scale(&self) -> f64 {
        (self.hbar * self.mass * self.omega_ref / 2.0).sqrt()
    }

    /// Coherent amplitude `alpha` centred on `(q, p)`.
    pub fn alpha(&self, q: f64, p: f64) -> C64 {
        C64::new(q / (2.0 * self.x_scale()), p / (2.0 * self.p_scale()))
    }

    /// Inverse of [`BasisSpec::alpha`].
    pub fn phase_point(&self, alpha: C64) -> (f64, f64) {
        (2.0 * self.x_scale() * alpha.re, 2.0 * self.p_scale() * alpha.im)
    }

    /// Largest `|alpha|^2` accepted for coherent states and displacements.
    pub fn truncation_bound(&self) -> f64 {
        self.dim as f64 / 4.0
    }

    pub fn check_alpha(&self, alpha: C64) -> Result<()> {
        let n2 = alpha.norm_sqr();
        let bound = self.truncation_bound();
        if n2 < bound {
            Ok(())
        } else {
            Err(Error::TruncationUnsafe { norm_sqr: n2, bound })
        }
    }
}
