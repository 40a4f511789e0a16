use alloc::vec::Vec;

use num_traits::Float;

use super::density::DensityOperator;
use super::unravel::{jump_sum, UnravelingSpec};
use crate::classical::{DuffingParams, StrobeClock};
use crate::error::{Error, Result};
use crate::numerics::integrate::rk4_unchecked;
use crate::numerics::{ComplexMatrix, C64};
use crate::oscillator::{BasisSpec, DrivenHamiltonian, DuffingOperators, FrameCenter};

/// Lindblad generator
/// `d rho/dt = -(i/hbar)[H, rho] + sum_k (L rho L^dagger - {L^dagger L, rho}/2)`,
/// stored as `H_eff = H - (i hbar/2) sum L^dagger L` plus the jump operators.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    hbar: f64,
    heff: DrivenHamiltonian,
    jumps: Vec<ComplexMatrix>,
}

impl MasterEquation {
    pub fn new(h: &DrivenHamiltonian, jumps: Vec<ComplexMatrix>, hbar: f64) -> Result<Self> {
        let n = h.dim();
        if !(hbar > 0.0) {
            return Err(Error::invalid(alloc::format!("hbar must be > 0, got {hbar}")));
        }
        if jumps.iter().any(|l| l.rows() != n || l.cols() != n) {
            return Err(Error::invalid("jump operator shape differs from Hamiltonian"));
        }
        let mut heff = h.clone();
        heff.static_part.axpy(C64::new(0.0, -0.5 * hbar), &jump_sum(&jumps, n));
        Ok(Self { hbar, heff, jumps })
    }

    /// Fixed-frame generator for `h` with the Lindblad operators of `spec`.
    pub fn from_spec(h: &DrivenHamiltonian, spec: &UnravelingSpec, basis: &BasisSpec) -> Result<Self> {
        if h.dim() != basis.dim {
            return Err(Error::invalid("Hamiltonian dimension differs from basis"));
        }
        let jumps = spec.lindblad_operators(basis, FrameCenter::ORIGIN)?;
        Self::new(h, jumps, spec.hbar)
    }

    pub fn dim(&self) -> usize {
        self.heff.dim()
    }

    /// Generator applied to an arbitrary (not necessarily Hermitian) matrix.
    pub fn rhs(&self, t: f64, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        let one = C64::new(1.0, 0.0);
        let rho_dag = rho.dagger();
        let c = self.heff.drive_factor(t);
        let mut a = ComplexMatrix::zeros(n, n);
        let mut b = ComplexMatrix::zeros(n, n);
        self.heff.static_part.mul_acc(rho, one, &mut a);
        self.heff.static_part.mul_acc(&rho_dag, one, &mut b);
        if let Some((h1, _)) = &self.heff.drive {
            if c != 0.0 {
                h1.mul_acc(rho, C64::new(c, 0.0), &mut a);
                h1.mul_acc(&rho_dag, C64::new(c, 0.0), &mut b);
            }
        }
        // rho H_eff^dagger = (H_eff rho^dagger)^dagger
        a.axpy(C64::new(-1.0, 0.0), &b.dagger());
        let mut out = a.scale(C64::new(0.0, -1.0 / self.hbar));
        for l in &self.jumps {
            // L rho L^dagger = L (L rho^dagger)^dagger
            let mut lr = ComplexMatrix::zeros(n, n);
            l.mul_acc(&rho_dag, one, &mut lr);
            l.mul_acc(&lr.dagger(), one, &mut out);
        }
        out
    }

    /// `steps` RK4 steps from `t0` without any renormalization; the map is
    /// linear, so this also propagates non-Hermitian operators.
    pub fn propagate(&self, m: &ComplexMatrix, t0: f64, steps: usize, dt: f64) -> ComplexMatrix {
        let mut f = |t: f64, r: &ComplexMatrix| self.rhs(t, r);
        let mut y = m.clone();
        for k in 0..steps {
            y = rk4_unchecked(&mut f, &y, t0 + k as f64 * dt, dt);
        }
        y
    }
}

/// One RK4 step of the master equation. The result is Hermitized and
/// trace-renormalized; positivity is checked, not enforced.
pub fn master_step(
    rho: &DensityOperator,
    h: &DrivenHamiltonian,
    spec: &UnravelingSpec,
    t: f64,
    dt: f64,
) -> Result<DensityOperator> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(alloc::format!("time step must be > 0, got {dt}")));
    }
    let eq = MasterEquation::from_spec(h, spec, &rho.basis)?;
    let mut out = DensityOperator { matrix: eq.propagate(&rho.matrix, t, 1, dt), basis: rho.basis };
    out.renormalize()?;
    out.check_positive(t + dt)?;
    Ok(out)
}

/// The stroboscopic quantum map: master-equation propagation over exactly
/// one drive period, starting at a strobe time.
#[derive(Debug, Clone)]
pub struct StrobeMap {
    eq: MasterEquation,
    clock: StrobeClock,
    basis: BasisSpec,
}

impl StrobeMap {
    pub fn new(params: &DuffingParams, spec: &UnravelingSpec, basis: &BasisSpec, dt: f64) -> Result<Self> {
        params.validate()?;
        spec.check_basis(basis)?;
        let ops = DuffingOperators::new(basis);
        let h = spec.duffing_hamiltonian(&ops, params, FrameCenter::ORIGIN);
        let eq = MasterEquation::from_spec(&h, spec, basis)?;
        let clock = StrobeClock::new(params, 0.0, dt)?;
        Ok(Self { eq, clock, basis: *basis })
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn clock(&self) -> &StrobeClock {
        &self.clock
    }

    pub fn equation(&self) -> &MasterEquation {
        &self.eq
    }

    /// One period of propagation of any operator (the map is linear).
    pub fn apply_operator(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.eq.propagate(m, 0.0, self.clock.steps_per_period, self.clock.dt)
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.basis != self.basis {
            return Err(Error::invalid("density operator basis differs from the map's basis"));
        }
        let mut out = DensityOperator { matrix: self.apply_operator(&rho.matrix), basis: self.basis };
        if !out.matrix.is_finite() {
            return Err(Error::overflow("strobe map produced non-finite entries; reduce dt"));
        }
        out.renormalize()?;
        out.check_positive(self.clock.time(self.clock.steps_per_period))?;
        Ok(out)
    }
}

/// `rho` propagated through one drive period.
pub fn strobe_map(
    rho: &DensityOperator,
    params: &DuffingParams,
    spec: &UnravelingSpec,
    dt: f64,
) -> Result<DensityOperator> {
    StrobeMap::new(params, spec, &rho.basis, dt)?.apply(rho)
}
