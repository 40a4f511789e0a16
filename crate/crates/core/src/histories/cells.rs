use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::{inner, ComplexMatrix, HermitianEigen, C64};
use crate::oscillator::{coherent_state, BasisSpec};

/// Smallest eigenvalue tolerated in the remainder effect.
pub const REST_PSD_TOLERANCE: f64 = 1e-8;

/// Outcome of a phase-space measurement at one strobe time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellIndex {
    Cell(usize),
    Rest,
}

/// Rectangular lattice of cell centers. `(q0, p0)` is the first center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellLattice {
    pub q0: f64,
    pub p0: f64,
    pub nq: usize,
    pub np: usize,
    pub dq: f64,
    pub dp: f64,
}

impl CellLattice {
    /// `nq x np` cells of side `spacing` centered on `(q, p)`.
    pub fn centered(q: f64, p: f64, nq: usize, np: usize, spacing: f64) -> Self {
        Self {
            q0: q - 0.5 * (nq as f64 - 1.0) * spacing,
            p0: p - 0.5 * (np as f64 - 1.0) * spacing,
            nq,
            np,
            dq: spacing,
            dp: spacing,
        }
    }

    /// `3 sqrt(hbar)`.
    pub fn default_spacing(hbar: f64) -> f64 {
        3.0 * hbar.sqrt()
    }

    pub fn len(&self) -> usize {
        self.nq * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Center of cell `k = i * np + j`.
    pub fn center(&self, k: usize) -> (f64, f64) {
        let (i, j) = (k / self.np, k % self.np);
        (self.q0 + i as f64 * self.dq, self.p0 + j as f64 * self.dp)
    }

    /// Cell whose rectangle contains `(q, p)`, or `Rest`.
    pub fn locate(&self, q: f64, p: f64) -> CellIndex {
        let i = ((q - self.q0) / self.dq + 0.5).floor();
        let j = ((p - self.p0) / self.dp + 0.5).floor();
        if i >= 0.0 && j >= 0.0 && (i as usize) < self.nq && (j as usize) < self.np {
            CellIndex::Cell(i as usize * self.np + j as usize)
        } else {
            CellIndex::Rest
        }
    }

    fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidGrid("lattice has no cells".into()));
        }
        if !(self.dq > 0.0 && self.dp > 0.0) || !(self.q0.is_finite() && self.p0.is_finite()) {
            return Err(Error::InvalidGrid(format!("bad lattice spacing ({}, {})", self.dq, self.dp)));
        }
        Ok(())
    }
}

/// Common weight `c` of the cell effects `E_i = c |q_i, p_i><q_i, p_i|`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CellWeight {
    /// `dq dp / (2 pi hbar)`, the coherent-state resolution of identity.
    Resolution,
    /// The resolution weight, lowered to `1 / lambda_max(sum_i |i><i|)` when
    /// needed to keep the remainder positive.
    #[default]
    Auto,
    Fixed(f64),
}

/// Coherent-state phase-space cells at one strobe time: a POVM with effects
/// `E_i = c |i><i|` and remainder `E_rest = 1 - sum_i E_i`.
#[derive(Debug, Clone)]
pub struct CellGrid {
    lattice: CellLattice,
    basis: BasisSpec,
    weight: f64,
    states: Vec<Vec<C64>>,
    rest: ComplexMatrix,
    rest_sqrt: ComplexMatrix,
    rest_min_eigenvalue: f64,
}

impl CellGrid {
    pub fn new(basis: &BasisSpec, lattice: CellLattice, weight: CellWeight) -> Result<Self> {
        lattice.validate()?;
        let n = basis.dim;
        let mut states = Vec::with_capacity(lattice.len());
        let mut frame = ComplexMatrix::zeros(n, n);
        for k in 0..lattice.len() {
            let (q, p) = lattice.center(k);
            let v = coherent_state(basis, q, p)?.amplitudes;
            frame.axpy_real(1.0, &ComplexMatrix::outer(&v, &v));
            states.push(v);
        }
        let resolution = lattice.dq * lattice.dp / (2.0 * core::f64::consts::PI * basis.hbar);
        let weight = match weight {
            CellWeight::Resolution => resolution,
            CellWeight::Fixed(c) => c,
            CellWeight::Auto => resolution.min(1.0 / HermitianEigen::new(&frame)?.max()),
        };
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::InvalidGrid(format!("cell weight must be > 0, got {weight}")));
        }
        let mut rest = ComplexMatrix::identity(n);
        rest.axpy_real(-weight, &frame);
        rest.hermitize();
        let eig = HermitianEigen::new(&rest)?;
        if eig.min() < -REST_PSD_TOLERANCE {
            return Err(Error::InvalidGrid(format!(
                "remainder effect has eigenvalue {:.3e}; lower the cell weight {weight:.4} or widen the spacing",
                eig.min()
            )));
        }
        let rest_sqrt = eig.map(|v| v.max(0.0).sqrt());
        Ok(Self { lattice, basis: *basis, weight, states, rest, rest_sqrt, rest_min_eigenvalue: eig.min() })
    }

    pub fn lattice(&self) -> &CellLattice {
        &self.lattice
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn n_cells(&self) -> usize {
        self.states.len()
    }

    /// Cells plus the remainder.
    pub fn n_outcomes(&self) -> usize {
        self.states.len() + 1
    }

    pub fn rest_min_eigenvalue(&self) -> f64 {
        self.rest_min_eigenvalue
    }

    /// Outcome `k` of `0..n_outcomes()`; the last one is the remainder.
    pub fn outcome(&self, k: usize) -> CellIndex {
        if k < self.n_cells() {
            CellIndex::Cell(k)
        } else {
            CellIndex::Rest
        }
    }

    pub fn outcome_index(&self, c: CellIndex) -> usize {
        match c {
            CellIndex::Cell(k) => k,
            CellIndex::Rest => self.n_cells(),
        }
    }

    pub fn effect(&self, c: CellIndex) -> ComplexMatrix {
        match c {
            CellIndex::Cell(k) => ComplexMatrix::outer(&self.states[k], &self.states[k]).scale_real(self.weight),
            CellIndex::Rest => self.rest.clone(),
        }
    }

    /// `sqrt(E)`, the branch operator applied on each side of the density
    /// operator.
    pub fn branch_operator(&self, c: CellIndex) -> ComplexMatrix {
        match c {
            CellIndex::Cell(k) => ComplexMatrix::outer(&self.states[k], &self.states[k]).scale_real(self.weight.sqrt()),
            CellIndex::Rest => self.rest_sqrt.clone(),
        }
    }

    /// `sqrt(E_a) X sqrt(E_b)`.
    pub fn sandwich(&self, a: CellIndex, x: &ComplexMatrix, b: CellIndex) -> ComplexMatrix {
        match (a, b) {
            (CellIndex::Cell(i), CellIndex::Cell(j)) => {
                let (u, v) = (&self.states[i], &self.states[j]);
                let xv = x.matvec(v).expect("dimension checked at construction");
                ComplexMatrix::outer(u, v).scale(C64::new(self.weight, 0.0) * inner(u, &xv))
            }
            _ => {
                let left = self.branch_operator(a);
                let right = self.branch_operator(b);
                &(&left * x) * &right
            }
        }
    }

    /// Probability `Tr(E_c rho)`.
    pub fn probability(&self, c: CellIndex, rho: &ComplexMatrix) -> f64 {
        match c {
            CellIndex::Cell(k) => {
                let v = &self.states[k];
                self.weight * rho.expectation(v).expect("dimension checked at construction").re
            }
            CellIndex::Rest => self.rest.trace_product(rho).expect("dimension checked at construction").re,
        }
    }

    /// Outcome whose cell rectangle contains `(q, p)`.
    pub fn locate(&self, q: f64, p: f64) -> CellIndex {
        self.lattice.locate(q, p)
    }
}
