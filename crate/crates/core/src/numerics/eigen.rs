//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Only used for diagnostics and small matrix functions (positivity checks,
//! trace distances, square roots of effects), never inside a time step.

use alloc::vec::Vec;

use num_traits::{Float, Zero};

use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// `A = V diag(values) V^dagger`, eigenvalues ascending, eigenvectors in the
/// columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::invalid("eigendecomposition of a non-square matrix"));
        }
        if !a.is_finite() {
            return Err(Error::overflow("eigendecomposition of a non-finite matrix"));
        }
        let n = a.rows();
        let mut m = a.clone();
        m.hermitize();
        let mut v = ComplexMatrix::identity(n);
        let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);

        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
        let values = order.iter().map(|&i| m[(i, i)].re).collect();
        let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
        Ok(Self { values, vectors })
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V diag(f(values)) V^dagger`.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::zero();
                for k in 0..n {
                    acc += self.vectors[(i, k)] * self.vectors[(j, k)].conj() * fv[k];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    if mag < 1e-300 || mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = C64::zero();
        m[(q, p)] = C64::zero();
        return;
    }
    // Phase-strip the pivot, then a real symmetric rotation.
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] acting on (p, q).
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    let n = m.rows();
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * u_pp + akq * u_qp;
        m[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        m[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    m[(p, q)] = C64::zero();
    m[(q, p)] = C64::zero();
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = RngStream::new(seed, 0);
        let a = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gauss(), rng.gauss()));
        &a + &a.dagger()
    }

    #[test]
    fn reconstructs_random_hermitian() {
        for (n, seed) in [(1, 1), (2, 2), (7, 3), (30, 4)] {
            let a = random_hermitian(n, seed);
            let eig = HermitianEigen::new(&a).unwrap();
            let back = eig.map(|x| x);
            assert!(back.max_abs_diff(&a) < 1e-10 * a.max_abs(), "n = {n}");
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
            let vdv = &eig.vectors.dagger() * &eig.vectors;
            assert!(vdv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let d = ComplexMatrix::from_diagonal(&[C64::new(3.0, 0.0), C64::new(-1.0, 0.0), C64::new(2.0, 0.0)]);
        let eig = HermitianEigen::new(&d).unwrap();
        assert_eq!(eig.values, alloc::vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn square_root_squares_back() {
        let a = random_hermitian(12, 9);
        let psd = &a * &a;
        let root = HermitianEigen::new(&psd).unwrap().map(|x| x.max(0.0).sqrt());
        assert!((&root * &root).max_abs_diff(&psd) < 1e-9 * psd.max_abs());
    }
}
