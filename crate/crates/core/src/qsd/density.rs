use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, HermitianEigen, C64};
use crate::oscillator::{BasisSpec, FrameCenter, QuantumState};

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-8;
/// Most negative eigenvalue tolerated before a step is rejected.
pub const POSITIVITY_FLOOR: f64 = -1e-6;

/// Density matrix in the fixed frame of `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    pub matrix: ComplexMatrix,
    pub basis: BasisSpec,
}

impl DensityOperator {
    /// Checks Hermiticity and unit trace; positivity is checked separately.
    pub fn new(matrix: ComplexMatrix, basis: BasisSpec) -> Result<Self> {
        basis.validate()?;
        if matrix.rows() != basis.dim || !matrix.is_square() {
            return Err(Error::invalid(alloc::format!(
                "density matrix is {}x{}, basis dimension {}",
                matrix.rows(),
                matrix.cols(),
                basis.dim
            )));
        }
        let rho = Self { matrix, basis };
        rho.check_invariants()?;
        Ok(rho)
    }

    pub fn from_state(psi: &QuantumState) -> Result<Self> {
        let fixed = if psi.center == FrameCenter::ORIGIN { psi.clone() } else { psi.to_fixed_frame()? };
        Ok(Self { matrix: fixed.projector(), basis: fixed.basis })
    }

    /// Hermitizes and rescales to unit trace.
    pub fn from_unnormalized(mut matrix: ComplexMatrix, basis: BasisSpec) -> Result<Self> {
        matrix.hermitize();
        let tr = matrix.trace()?.re;
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::overflow(alloc::format!("density matrix trace is {tr}")));
        }
        Self::new(matrix.scale_real(1.0 / tr), basis)
    }

    /// Thermal state of the basis oscillator with mean occupation `nbar`.
    pub fn thermal(basis: &BasisSpec, nbar: f64) -> Result<Self> {
        basis.validate()?;
        if !(nbar >= 0.0) {
            return Err(Error::invalid(alloc::format!("occupation must be >= 0, got {nbar}")));
        }
        let ratio = if nbar == 0.0 { 0.0 } else { nbar / (1.0 + nbar) };
        let mut w = 1.0;
        let mut diag = alloc::vec::Vec::with_capacity(basis.dim);
        for _ in 0..basis.dim {
            diag.push(C64::new(w, 0.0));
            w *= ratio;
        }
        Self::from_unnormalized(ComplexMatrix::from_diagonal(&diag), *basis)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().map(|z| z.re).unwrap_or(f64::NAN)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).map(|z| z.re).unwrap_or(f64::NAN)
    }

    pub fn expect(&self, op: &ComplexMatrix) -> Result<C64> {
        self.matrix.trace_product(op)
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        HermitianEigen::new(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigen()?.min())
    }

    /// `(1/2) Tr |rho - sigma|`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::invalid("trace distance between different dimensions"));
        }
        let mut diff = self.matrix.clone();
        diff.axpy_real(-1.0, &other.matrix);
        diff.hermitize();
        let eig = HermitianEigen::new(&diff)?;
        Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
    }

    pub fn check_invariants(&self) -> Result<()> {
        if !self.matrix.is_finite() {
            return Err(Error::overflow("density matrix is not finite"));
        }
        let herm = self.matrix.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::invalid(alloc::format!("density matrix not Hermitian: error {herm:e}")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::invalid(alloc::format!("density matrix trace {tr} differs from 1")));
        }
        Ok(())
    }

    /// Fails with `StepSizeFailure` when an eigenvalue is below
    /// [`POSITIVITY_FLOOR`].
    pub fn check_positive(&self, time: f64) -> Result<()> {
        let min = self.min_eigenvalue()?;
        if min < POSITIVITY_FLOOR {
            return Err(Error::StepSizeFailure { min_eigenvalue: min, time });
        }
        Ok(())
    }

    /// Restores Hermiticity and unit trace after propagation.
    pub(crate) fn renormalize(&mut self) -> Result<()> {
        self.matrix.hermitize();
        let tr = self.trace();
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::overflow(alloc::format!("density matrix trace is {tr}")));
        }
        self.matrix = self.matrix.scale_real(1.0 / tr);
        Ok(())
    }
}

/// Running sum of trajectory projectors. Merging is associative, so partial
/// sums from independent workers can be combined in any tree shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityAccumulator {
    basis: BasisSpec,
    sum: ComplexMatrix,
    count: u64,
}

impl DensityAccumulator {
    pub fn new(basis: &BasisSpec) -> Self {
        Self { basis: *basis, sum: ComplexMatrix::zeros(basis.dim, basis.dim), count: 0 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn add_state(&mut self, psi: &QuantumState) -> Result<()> {
        if psi.basis != self.basis {
            return Err(Error::invalid("state basis differs from accumulator basis"));
        }
        let rho = DensityOperator::from_state(psi)?;
        self.sum.axpy_real(1.0, &rho.matrix);
        self.count += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if other.basis != self.basis {
            return Err(Error::invalid("cannot merge accumulators over different bases"));
        }
        self.sum.axpy_real(1.0, &other.sum);
        self.count += other.count;
        Ok(())
    }

    pub fn mean(&self) -> Result<DensityOperator> {
        if self.count == 0 {
            return Err(Error::invalid("empty ensemble"));
        }
        DensityOperator::from_unnormalized(self.sum.scale_real(1.0 / self.count as f64), self.basis)
    }
}
