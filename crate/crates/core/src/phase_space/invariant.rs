use crate::classical::DuffingParams;
use crate::error::{Error, Result};
use crate::grid::Grid2d;
use crate::qsd::{DensityOperator, StrobeMap, UnravelingSpec};

use super::wigner::{wigner_transform, WignerGrid};

/// Mean of the strobe iterates `T^k rho0`, `k = transient+1 ..= transient+n`.
pub fn invariant_density(
    rho0: &DensityOperator,
    params: &DuffingParams,
    spec: &UnravelingSpec,
    n_iterations: usize,
    transient: usize,
    dt: f64,
) -> Result<DensityOperator> {
    if n_iterations == 0 {
        return Err(Error::invalid("n_iterations must be positive"));
    }
    let map = StrobeMap::new(params, spec, &rho0.basis, dt)?;
    let mut rho = rho0.clone();
    for _ in 0..transient {
        rho = map.apply(&rho)?;
    }
    let mut sum = crate::numerics::ComplexMatrix::zeros(rho.dim(), rho.dim());
    for _ in 0..n_iterations {
        rho = map.apply(&rho)?;
        sum.axpy_real(1.0, &rho.matrix);
    }
    DensityOperator::from_unnormalized(sum, rho0.basis)
}

/// Time-averaged Wigner function over strobe iterates after discarding a
/// transient. The transform is linear, so the iterates are averaged first.
pub fn invariant_wigner(
    rho0: &DensityOperator,
    params: &DuffingParams,
    spec: &UnravelingSpec,
    n_iterations: usize,
    transient: usize,
    dt: f64,
    grid: &Grid2d,
) -> Result<WignerGrid> {
    let mean = invariant_density(rho0, params, spec, n_iterations, transient, dt)?;
    wigner_transform(&mean, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::HermitianEigen;
    use crate::oscillator::{BasisSpec, DuffingOperators, FrameCenter, QuantumState};

    #[test]
    fn undriven_relaxation_is_parity_symmetric_and_double_peaked() {
        let hbar = 0.1;
        let b = BasisSpec::new(20, hbar).unwrap();
        let params =
            DuffingParams { damping: 0.5, drive_amplitude: 0.0, temperature: 0.05, hbar, ..DuffingParams::default() };
        let spec = UnravelingSpec::finite_temperature(0.5, 0.05, hbar);
        let rho0 = DensityOperator::from_state(&QuantumState::fock(&b, 0).unwrap()).unwrap();
        let grid = Grid2d::new((-2.5, 2.5), (-2.0, 2.0), 50, 40).unwrap();
        let w = invariant_wigner(&rho0, &params, &spec, 5, 5, 0.01, &grid).unwrap();
        let mut asym = 0.0f64;
        for i in 0..grid.nx {
            for j in 0..grid.np {
                asym = asym.max((w.get(i, j) - w.get(grid.nx - 1 - i, grid.np - 1 - j)).abs());
            }
        }
        assert!(asym < 1e-8 * w.bound(), "{asym}");
        let marginal = w.marginal_x();
        let (imax, _) = marginal.iter().enumerate().fold((0, f64::MIN), |m, (i, v)| if *v > m.1 { (i, *v) } else { m });
        assert!((grid.x_center(imax).abs() - 1.0).abs() < 0.2, "{}", grid.x_center(imax));
        assert!(marginal[grid.nx / 2] < 0.5 * marginal[imax]);
    }

    #[test]
    fn eigenstate_is_stationary_without_bath_or_drive() {
        let hbar = 0.1;
        let b = BasisSpec::new(14, hbar).unwrap();
        let params = DuffingParams { damping: 0.0, drive_amplitude: 0.0, hbar, ..DuffingParams::default() };
        let spec = UnravelingSpec::zero_temperature(0.0, hbar);
        let h = DuffingOperators::new(&b).hamiltonian(&params, FrameCenter::ORIGIN).at(0.0);
        let v = HermitianEigen::new(&h).unwrap().vectors.column(1);
        let rho0 = DensityOperator::from_state(&QuantumState::new(v, b, FrameCenter::ORIGIN).unwrap()).unwrap();
        let grid = Grid2d::new((-2.5, 2.5), (-2.0, 2.0), 30, 30).unwrap();
        let w0 = wigner_transform(&rho0, &grid).unwrap();
        let w = invariant_wigner(&rho0, &params, &spec, 3, 0, 0.01, &grid).unwrap();
        let diff = w0.values.iter().zip(&w.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff < 1e-6 * w0.bound(), "{diff}");
    }
}
