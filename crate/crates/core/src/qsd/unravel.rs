use alloc::vec::Vec;

use num_traits::Float;

use crate::classical::DuffingParams;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64};
use crate::oscillator::{ladder, BasisSpec, DrivenHamiltonian, DuffingOperators, FrameCenter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnravelingMode {
    /// `L = sqrt(2 Gamma) a`.
    #[default]
    ZeroTemperature,
    /// `L1 = sqrt(2 Gamma (n + 1)) a`, `L2 = sqrt(2 Gamma n) a^dagger`.
    FiniteTemperature,
}

/// How damping shows up in the Ehrenfest equations of the Duffing model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Friction {
    /// Ladder damping alone relaxes both `<x>` and `<p>` at rate `Gamma`.
    Symmetric,
    /// Adds `(Gamma/2){x, p}` to the Hamiltonian so that `d<x>/dt = <p>/M`
    /// and `d<p>/dt` carries the classical `-2 Gamma <p>`.
    #[default]
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnravelingSpec {
    pub mode: UnravelingMode,
    pub damping: f64,
    pub temperature: f64,
    pub hbar: f64,
    pub friction: Friction,
}

impl UnravelingSpec {
    pub fn zero_temperature(damping: f64, hbar: f64) -> Self {
        Self { mode: UnravelingMode::ZeroTemperature, damping, temperature: 0.0, hbar, friction: Friction::default() }
    }

    pub fn finite_temperature(damping: f64, temperature: f64, hbar: f64) -> Self {
        Self { mode: UnravelingMode::FiniteTemperature, damping, temperature, hbar, friction: Friction::default() }
    }

    /// Takes `Gamma`, `kT` and `hbar` from the model parameters.
    pub fn from_params(params: &DuffingParams, mode: UnravelingMode) -> Self {
        Self {
            mode,
            damping: params.damping,
            temperature: params.temperature,
            hbar: params.hbar,
            friction: Friction::default(),
        }
    }

    pub fn with_friction(mut self, friction: Friction) -> Self {
        self.friction = friction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.damping >= 0.0) || !self.damping.is_finite() {
            return Err(Error::invalid(alloc::format!("damping must be >= 0, got {}", self.damping)));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::invalid(alloc::format!("temperature must be >= 0, got {}", self.temperature)));
        }
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return Err(Error::invalid(alloc::format!("hbar must be > 0, got {}", self.hbar)));
        }
        Ok(())
    }

    pub fn check_basis(&self, basis: &BasisSpec) -> Result<()> {
        self.validate()?;
        basis.validate()?;
        if (self.hbar - basis.hbar).abs() > 1e-15 * self.hbar {
            return Err(Error::invalid(alloc::format!(
                "unraveling hbar {} differs from basis hbar {}",
                self.hbar,
                basis.hbar
            )));
        }
        Ok(())
    }

    /// High-temperature occupation `kT / (hbar w_ref)`; zero in the
    /// zero-temperature mode.
    pub fn mean_occupation(&self, omega_ref: f64) -> f64 {
        match self.mode {
            UnravelingMode::ZeroTemperature => 0.0,
            UnravelingMode::FiniteTemperature => self.temperature / (self.hbar * omega_ref),
        }
    }

    /// Lindblad operators in the frame centred on `center`, where the lab
    /// annihilation operator is `a + alpha_0`. Operators with zero rate are
    /// omitted.
    pub fn lindblad_operators(&self, basis: &BasisSpec, center: FrameCenter) -> Result<Vec<ComplexMatrix>> {
        self.check_basis(basis)?;
        let mut ops = Vec::new();
        if self.damping == 0.0 {
            return Ok(ops);
        }
        let alpha0 = basis.alpha(center.q, center.p);
        let mut a = ladder(basis);
        a.add_identity(alpha0);
        let nbar = self.mean_occupation(basis.omega_ref);
        ops.push(a.scale_real((2.0 * self.damping * (nbar + 1.0)).sqrt()));
        if nbar > 0.0 {
            ops.push(a.dagger().scale_real((2.0 * self.damping * nbar).sqrt()));
        }
        Ok(ops)
    }

    /// Duffing Hamiltonian in the frame at `center`, with the friction
    /// counterterm when [`Friction::Momentum`] is selected.
    pub fn duffing_hamiltonian(
        &self,
        ops: &DuffingOperators,
        params: &DuffingParams,
        center: FrameCenter,
    ) -> DrivenHamiltonian {
        let mut h = ops.hamiltonian(params, center);
        if self.friction == Friction::Momentum && self.damping > 0.0 {
            h.add_static(&ops.friction_counterterm(self.damping, center));
        }
        h
    }
}

/// `sum_k L_k^dagger L_k`.
pub(crate) fn jump_sum(jumps: &[ComplexMatrix], dim: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim, dim);
    for l in jumps {
        l.dagger().mul_acc(l, C64::new(1.0, 0.0), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_counts_and_rates() {
        let b = BasisSpec::new(8, 0.1).unwrap();
        let zt = UnravelingSpec::zero_temperature(0.125, 0.1);
        let ops = zt.lindblad_operators(&b, FrameCenter::ORIGIN).unwrap();
        assert_eq!(ops.len(), 1);
        assert!((ops[0][(0, 1)].re - 0.5).abs() < 1e-15);
        let ft = UnravelingSpec::finite_temperature(0.125, 0.2, 0.1);
        assert_eq!(ft.lindblad_operators(&b, FrameCenter::ORIGIN).unwrap().len(), 2);
        assert!((ft.mean_occupation(1.0) - 2.0).abs() < 1e-15);
        let none = UnravelingSpec::zero_temperature(0.0, 0.1);
        assert!(none.lindblad_operators(&b, FrameCenter::ORIGIN).unwrap().is_empty());
    }

    #[test]
    fn frame_shift_adds_alpha() {
        let b = BasisSpec::new(8, 0.1).unwrap();
        let spec = UnravelingSpec::zero_temperature(0.5, 0.1);
        let c = FrameCenter::new(0.2, -0.1);
        let l = &spec.lindblad_operators(&b, c).unwrap()[0];
        let alpha = b.alpha(c.q, c.p);
        assert!((l[(3, 3)] - alpha).norm() < 1e-15);
    }

    #[test]
    fn hbar_mismatch_is_rejected() {
        let b = BasisSpec::new(8, 0.1).unwrap();
        let spec = UnravelingSpec::zero_temperature(0.1, 0.2);
        assert!(spec.lindblad_operators(&b, FrameCenter::ORIGIN).is_err());
    }
}
