use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::{ComplexMatrix, C64};

/// Square matrix stored by diagonals, offsets `-lower..=upper`.
///
/// Operators polynomial in the ladder operators are banded, so products with
/// vectors cost `O(N * bandwidth)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    dim: usize,
    lower: usize,
    upper: usize,
    /// `diags[d][i]` holds `A[i][i + d - lower]` (row-indexed).
    diags: Vec<Vec<C64>>,
}

impl BandMatrix {
    /// Captures every nonzero entry of `a`.
    pub fn from_dense(a: &ComplexMatrix) -> Self {
        assert!(a.is_square(), "band matrix from non-square input");
        let n = a.rows();
        let (mut lower, mut upper) = (0usize, 0usize);
        for i in 0..n {
            for j in 0..n {
                if !a[(i, j)].is_zero() {
                    if j > i {
                        upper = upper.max(j - i);
                    } else {
                        lower = lower.max(i - j);
                    }
                }
            }
        }
        let mut diags = vec![vec![C64::zero(); n]; lower + upper + 1];
        for (d, diag) in diags.iter_mut().enumerate() {
            for i in 0..n {
                let j = i as isize + d as isize - lower as isize;
                if j >= 0 && (j as usize) < n {
                    diag[i] = a[(i, j as usize)];
                }
            }
        }
        Self { dim: n, lower, upper, diags }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> (usize, usize) {
        (self.lower, self.upper)
    }

    /// `out += alpha * A v`.
    pub fn matvec_acc(&self, v: &[C64], alpha: C64, out: &mut [C64]) {
        assert_eq!(v.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        let n = self.dim as isize;
        for (d, diag) in self.diags.iter().enumerate() {
            let off = d as isize - self.lower as isize;
            let lo = (-off).max(0) as usize;
            let hi = (n - off.max(0)) as usize;
            for i in lo..hi {
                out[i] += alpha * diag[i] * v[(i as isize + off) as usize];
            }
        }
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn gershgorin_radius(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.diags.iter().map(|d| d[i].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}
