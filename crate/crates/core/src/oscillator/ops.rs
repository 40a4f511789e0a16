use num_traits::Float;

use super::BasisSpec;
use crate::numerics::{ComplexMatrix, C64};

/// Annihilation operator: `a[n][n+1] = sqrt(n+1)`.
pub fn ladder(basis: &BasisSpec) -> ComplexMatrix {
    let n = basis.dim;
    let mut a = ComplexMatrix::zeros(n, n);
    for k in 0..n - 1 {
        a[(k, k + 1)] = C64::new(((k + 1) as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation(basis: &BasisSpec) -> ComplexMatrix {
    ladder(basis).dagger()
}

pub fn number_op(basis: &BasisSpec) -> ComplexMatrix {
    let diag: alloc::vec::Vec<C64> = (0..basis.dim).map(|k| C64::new(k as f64, 0.0)).collect();
    ComplexMatrix::from_diagonal(&diag)
}

pub fn position_op(basis: &BasisSpec) -> ComplexMatrix {
    let a = ladder(basis);
    (&a + &a.dagger()).scale_real(basis.x_scale())
}

pub fn momentum_op(basis: &BasisSpec) -> ComplexMatrix {
    let a = ladder(basis);
    (&a.dagger() - &a).scale(C64::new(0.0, basis.p_scale()))
}
