use num_traits::Float;

use super::{momentum_op, position_op, BasisSpec, FrameCenter};
use crate::classical::DuffingParams;
use crate::numerics::{ComplexMatrix, C64};

/// `H(t) = H_0 + cos(w t) H_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivenHamiltonian {
    pub static_part: ComplexMatrix,
    pub drive: Option<(ComplexMatrix, f64)>,
}

impl DrivenHamiltonian {
    pub fn constant(h: ComplexMatrix) -> Self {
        Self { static_part: h, drive: None }
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(ComplexMatrix::zeros(dim, dim))
    }

    pub fn with_drive(mut self, op: ComplexMatrix, frequency: f64) -> Self {
        self.drive = Some((op, frequency));
        self
    }

    pub fn dim(&self) -> usize {
        self.static_part.rows()
    }

    pub fn drive_factor(&self, t: f64) -> f64 {
        self.drive.as_ref().map_or(0.0, |(_, w)| (w * t).cos())
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        let mut h = self.static_part.clone();
        if let Some((op, w)) = &self.drive {
            h.axpy_real((w * t).cos(), op);
        }
        h
    }

    /// `out += scale * H(t) psi`.
    pub fn apply_acc(&self, t: f64, psi: &[C64], scale: C64, out: &mut [C64]) {
        self.static_part.matvec_acc(psi, scale, out);
        if let Some((op, w)) = &self.drive {
            let c = (w * t).cos();
            if c != 0.0 {
                op.matvec_acc(psi, scale * c, out);
            }
        }
    }

    /// Adds a time-independent term.
    pub fn add_static(&mut self, term: &ComplexMatrix) {
        self.static_part.axpy_real(1.0, term);
    }
}

/// Position and momentum polynomials of one basis, cached so Hamiltonians
/// in any displaced frame can be assembled in `O(N^2)`.
#[derive(Debug, Clone)]
pub struct DuffingOperators {
    basis: BasisSpec,
    x: [ComplexMatrix; 4],
    p: ComplexMatrix,
    p2: ComplexMatrix,
    xp_sym: ComplexMatrix,
}

impl DuffingOperators {
    pub fn new(basis: &BasisSpec) -> Self {
        // Powers are formed with four spare levels and then cut back, which
        // gives the exact matrix elements of x^k and p^2 with no
        // truncation-corner defects.
        let n = basis.dim;
        let big = BasisSpec { dim: n + 4, ..*basis };
        let x1 = position_op(&big);
        let x2 = &x1 * &x1;
        let x3 = &x2 * &x1;
        let x4 = &x2 * &x2;
        let p = momentum_op(&big);
        let p2 = &p * &p;
        let xp_sym = x1.anticommutator(&p).expect("square operators");
        let cut = |m: &ComplexMatrix| m.leading_block(n);
        Self { basis: *basis, x: [cut(&x1), cut(&x2), cut(&x3), cut(&x4)], p: cut(&p), p2: cut(&p2), xp_sym: cut(&xp_sym) }
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn position(&self) -> &ComplexMatrix {
        &self.x[0]
    }

    pub fn momentum(&self) -> &ComplexMatrix {
        &self.p
    }

    /// `p^2/2M + U(x) - q M x cos(w0 t)` with lab-frame `x = x_frame + q0`,
    /// `p = p_frame + p0`. Constant terms are kept so `<H>` is the lab energy.
    pub fn hamiltonian(&self, params: &DuffingParams, center: FrameCenter) -> DrivenHamiltonian {
        let m = params.mass;
        let (q0, p0) = (center.q, center.p);
        let [x1, x2, x3, x4] = &self.x;
        let mut h = self.p2.scale_real(0.5 / m);
        h.axpy_real(p0 / m, &self.p);
        h.axpy_real(0.25, x4);
        h.axpy_real(q0, x3);
        h.axpy_real(1.5 * q0 * q0 - 0.5, x2);
        h.axpy_real(q0 * q0 * q0 - q0, x1);
        let constant = 0.5 * p0 * p0 / m + DuffingParams::potential(q0);
        h.add_identity(C64::new(constant, 0.0));

        let coupling = -params.drive_amplitude * m;
        if coupling == 0.0 {
            return DrivenHamiltonian::constant(h);
        }
        let mut drive = x1.scale_real(coupling);
        drive.add_identity(C64::new(coupling * q0, 0.0));
        DrivenHamiltonian::constant(h).with_drive(drive, params.drive_frequency)
    }

    /// `(Gamma/2) {x, p}` in the lab frame. Added to the Hamiltonian, it turns
    /// the symmetric damping of `L = sqrt(2 Gamma) a` (both `<x>` and `<p>`
    /// relax at rate `Gamma`) into pure momentum friction `-2 Gamma p`.
    pub fn friction_counterterm(&self, damping: f64, center: FrameCenter) -> ComplexMatrix {
        let mut h = self.xp_sym.scale_real(0.5 * damping);
        h.axpy_real(damping * center.p, &self.x[0]);
        h.axpy_real(damping * center.q, &self.p);
        h.add_identity(C64::new(damping * center.q * center.p, 0.0));
        h
    }
}

/// Duffing Hamiltonian at time `t` in the fixed frame.
pub fn duffing_hamiltonian(basis: &BasisSpec, params: &DuffingParams, t: f64) -> ComplexMatrix {
    DuffingOperators::new(basis).hamiltonian(params, FrameCenter::ORIGIN).at(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::coherent_state;
    use core::f64::consts::PI;

    #[test]
    fn undriven_hamiltonian_is_static_and_hermitian() {
        let b = BasisSpec::new(24, 0.1).unwrap();
        let params = DuffingParams { drive_amplitude: 0.0, ..DuffingParams::default() };
        let h0 = duffing_hamiltonian(&b, &params, 0.0);
        let h1 = duffing_hamiltonian(&b, &params, 1.234);
        assert_eq!(h0, h1);
        assert!(h0.hermiticity_error() < 1e-12);
    }

    #[test]
    fn vacuum_energy_from_gaussian_moments() {
        let b = BasisSpec::new(8, 0.05).unwrap();
        let params = DuffingParams::default();
        let h = duffing_hamiltonian(&b, &params, PI / 2.0);
        let s2 = b.hbar / (2.0 * b.mass * b.omega_ref);
        // <p^2>/2M + <x^4>/4 - <x^2>/2 with <p^2> = hbar M w / 2.
        let expected = 0.25 * b.hbar * b.omega_ref + 0.25 * 3.0 * s2 * s2 - 0.5 * s2;
        assert!((h[(0, 0)].re - expected).abs() < 1e-10);
    }

    #[test]
    fn drive_vanishes_at_quarter_period() {
        let b = BasisSpec::new(12, 0.05).unwrap();
        let params = DuffingParams::default();
        let undriven = DuffingParams { drive_amplitude: 0.0, ..params };
        let t = PI / (2.0 * params.drive_frequency);
        let diff = duffing_hamiltonian(&b, &params, t).max_abs_diff(&duffing_hamiltonian(&b, &undriven, t));
        assert!(diff < 1e-15);
    }

    #[test]
    fn displaced_frame_hamiltonian_has_lab_energy() {
        // <H> of a coherent state built in the fixed frame equals <H> of the
        // vacuum of a frame centred on the same point.
        let b = BasisSpec::new(60, 0.05).unwrap();
        let params = DuffingParams::default();
        let ops = DuffingOperators::new(&b);
        let (q, p) = (0.6, -0.3);
        let lab = coherent_state(&b, q, p).unwrap();
        let e_lab = ops.hamiltonian(&params, FrameCenter::ORIGIN).at(0.3).expectation(&lab.amplitudes).unwrap();
        let vac = coherent_state(&b, 0.0, 0.0).unwrap();
        let e_frame = ops.hamiltonian(&params, FrameCenter { q, p }).at(0.3).expectation(&vac.amplitudes).unwrap();
        assert!((e_lab - e_frame).norm() < 1e-10, "{e_lab} vs {e_frame}");
    }

    #[test]
    fn ehrenfest_velocity_at_t0() {
        let b = BasisSpec::new(40, 0.05).unwrap();
        let params = DuffingParams::default();
        let h = duffing_hamiltonian(&b, &params, 0.0);
        let psi = coherent_state(&b, 0.4, 0.25).unwrap();
        let x = position_op(&b);
        let p = momentum_op(&b);
        let dxdt = h.commutator(&x).unwrap().scale(C64::new(0.0, 1.0 / b.hbar));
        let v = dxdt.expectation(&psi.amplitudes).unwrap();
        let pm = p.expectation(&psi.amplitudes).unwrap().re / params.mass;
        assert!((v.re - pm).abs() < 1e-10 && v.im.abs() < 1e-10, "{v} vs {pm}");
    }

    #[test]
    fn energy_converges_in_truncation() {
        let params = DuffingParams::default();
        let energy = |dim| {
            let b = BasisSpec::new(dim, 0.05).unwrap();
            let psi = coherent_state(&b, 0.5, 0.2).unwrap();
            duffing_hamiltonian(&b, &params, 0.0).expectation(&psi.amplitudes).unwrap().re
        };
        // |alpha|^2 = 2.9 <= N/8 for N = 24.
        let (e1, e2) = (energy(24), energy(48));
        assert!(((e1 - e2) / e2).abs() < 1e-8, "{e1} vs {e2}");
    }
}
