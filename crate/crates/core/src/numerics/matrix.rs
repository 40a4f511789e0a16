use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::{Float, Zero};

use super::C64;
use crate::error::{Error, Result};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::invalid(alloc::format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = *d;
        }
        m
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i])
    }

    pub fn trace(&self) -> Result<C64> {
        self.require_square("trace")?;
        Ok((0..self.rows).map(|i| self.data[i * self.cols + i]).sum())
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self.data[i * self.cols + i]).collect()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::invalid(alloc::format!(
                "matmul of {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        gemm_acc(self, other, C64::new(1.0, 0.0), &mut out);
        Ok(out)
    }

    /// `out += alpha * self * other`, skipping structural zeros of `self`.
    ///
    /// Panics on shape mismatch.
    pub fn mul_acc(&self, other: &Self, alpha: C64, out: &mut Self) {
        assert_eq!(self.cols, other.rows, "mul_acc: inner dimension mismatch");
        assert_eq!((out.rows, out.cols), (self.rows, other.cols), "mul_acc: output shape");
        gemm_acc(self, other, alpha, out);
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::invalid(alloc::format!(
                "matvec of {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![C64::zero(); self.rows];
        self.matvec_acc(v, C64::new(1.0, 0.0), &mut out);
        Ok(out)
    }

    /// `out += alpha * self * v`. Panics on shape mismatch.
    pub fn matvec_acc(&self, v: &[C64], alpha: C64, out: &mut [C64]) {
        assert_eq!(v.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut acc = C64::zero();
            for (a, x) in row.iter().zip(v) {
                acc += a * x;
            }
            *o += alpha * acc;
        }
    }

    /// `<psi|A|psi> / <psi|psi>`.
    pub fn expectation(&self, psi: &[C64]) -> Result<C64> {
        self.require_square("expectation")?;
        let n2 = norm_sqr(psi);
        if n2 == 0.0 {
            return Err(Error::invalid("expectation in the zero vector"));
        }
        let a_psi = self.matvec(psi)?;
        Ok(inner(psi, &a_psi) / n2)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// `self += a * x`. Panics on shape mismatch.
    pub fn axpy(&mut self, a: C64, x: &Self) {
        assert_eq!((self.rows, self.cols), (x.rows, x.cols), "axpy: shape mismatch");
        for (y, x) in self.data.iter_mut().zip(&x.data) {
            *y += a * x;
        }
    }

    pub fn axpy_real(&mut self, a: f64, x: &Self) {
        assert_eq!((self.rows, self.cols), (x.rows, x.cols), "axpy: shape mismatch");
        for (y, x) in self.data.iter_mut().zip(&x.data) {
            *y += x * a;
        }
    }

    /// Adds `s` times the identity.
    pub fn add_identity(&mut self, s: C64) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            self.data[i * self.cols + i] += s;
        }
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let mut c = self.matmul(other)?;
        c.axpy(C64::new(-1.0, 0.0), &other.matmul(self)?);
        Ok(c)
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        let mut c = self.matmul(other)?;
        c.axpy(C64::new(1.0, 0.0), &other.matmul(self)?);
        Ok(c)
    }

    /// `max_jk |A_jk - conj(A_kj)|`.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for j in 0..n {
            for k in j..n {
                let d = (self.data[j * n + k] - self.data[k * n + j].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() < tol
    }

    /// Replaces the matrix by `(A + A^dagger) / 2`.
    pub fn hermitize(&mut self) {
        assert!(self.is_square(), "hermitize: non-square matrix");
        let n = self.rows;
        for j in 0..n {
            let d = self.data[j * n + j];
            self.data[j * n + j] = C64::new(d.re, 0.0);
            for k in (j + 1)..n {
                let avg = (self.data[j * n + k] + self.data[k * n + j].conj()) * 0.5;
                self.data[j * n + k] = avg;
                self.data[k * n + j] = avg.conj();
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Top-left `n x n` block.
    pub fn leading_block(&self, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| self.data[i * self.cols + j])
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::invalid("trace_product: shapes not conformable"));
        }
        let mut acc = C64::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.data[i * self.cols + k] * other.data[k * other.cols + i];
            }
        }
        Ok(acc)
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::invalid(alloc::format!("{what} of non-square {}x{} matrix", self.rows, self.cols)))
        }
    }
}

fn gemm_acc(a: &ComplexMatrix, b: &ComplexMatrix, alpha: C64, out: &mut ComplexMatrix) {
    let n = b.cols;
    for i in 0..a.rows {
        let out_row = &mut out.data[i * n..(i + 1) * n];
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            let s = alpha * aik;
            let b_row = &b.data[k * n..(k + 1) * n];
            for (o, bkj) in out_row.iter_mut().zip(b_row) {
                *o += s * bkj;
            }
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator sugar for building Hamiltonians. These panic on shape mismatch;
// use `matmul` where the shapes come from the caller.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.axpy_real(1.0, rhs);
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.axpy_real(-1.0, rhs);
        out
    }
}

/// `<u|v>` (conjugate-linear in `u`).
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}
