//! Rectangular phase-space grids and real fields defined on them.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};

/// Extent and resolution of a rectangular `(x, p)` grid. Bins are half-open
/// `[lo, hi)` cells; values attach to cell centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2d {
    pub x_lo: f64,
    pub x_hi: f64,
    pub p_lo: f64,
    pub p_hi: f64,
    pub nx: usize,
    pub np: usize,
}

impl Grid2d {
    pub fn new(x: (f64, f64), p: (f64, f64), nx: usize, np: usize) -> Result<Self> {
        let g = Self { x_lo: x.0, x_hi: x.1, p_lo: p.0, p_hi: p.1, nx, np };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.x_lo.is_finite()
            && self.x_hi.is_finite()
            && self.p_lo.is_finite()
            && self.p_hi.is_finite()
            && self.x_hi > self.x_lo
            && self.p_hi > self.p_lo
            && self.nx > 0
            && self.np > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(alloc::format!("degenerate grid {self:?}")))
        }
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.nx as f64
    }

    #[inline]
    pub fn dp(&self) -> f64 {
        (self.p_hi - self.p_lo) / self.np as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dp()
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x_center(&self, i: usize) -> f64 {
        self.x_lo + (i as f64 + 0.5) * self.dx()
    }

    pub fn p_center(&self, j: usize) -> f64 {
        self.p_lo + (j as f64 + 0.5) * self.dp()
    }

    /// Row-major flat index (`x` major).
    #[inline]
    pub fn flat(&self, i: usize, j: usize) -> usize {
        i * self.np + j
    }

    pub fn bin(&self, x: f64, p: f64) -> Option<(usize, usize)> {
        if !(x >= self.x_lo && x < self.x_hi && p >= self.p_lo && p < self.p_hi) {
            return None;
        }
        let i = (((x - self.x_lo) / self.dx()) as usize).min(self.nx - 1);
        let j = (((p - self.p_lo) / self.dp()) as usize).min(self.np - 1);
        Some((i, j))
    }
}

/// A real 2-D array on a [`Grid2d`], e.g. a histogram or a Wigner function.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2d {
    pub grid: Grid2d,
    pub values: Vec<f64>,
}

impl Field2d {
    pub fn zeros(grid: Grid2d) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn new(grid: Grid2d, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(alloc::format!(
                "field of {} values on a {}x{} grid",
                values.len(),
                grid.nx,
                grid.np
            )));
        }
        Ok(Self { grid, values })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.flat(i, j)]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.grid.nx == other.grid.nx && self.grid.np == other.grid.np
    }

    /// Number of bins with positive weight.
    pub fn occupied(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }

    /// Separable Gaussian blur with standard deviations in the units of `x`
    /// and `p`. Mass that would leave the grid is dropped.
    pub fn gaussian_smooth(&self, sigma_x: f64, sigma_p: f64) -> Self {
        let kx = kernel(sigma_x / self.grid.dx());
        let kp = kernel(sigma_p / self.grid.dp());
        let (nx, np) = (self.grid.nx, self.grid.np);
        let mut tmp = vec![0.0; nx * np];
        let hp = (kp.len() / 2) as isize;
        for i in 0..nx {
            for j in 0..np {
                let v = self.values[i * np + j];
                if v == 0.0 {
                    continue;
                }
                for (o, w) in kp.iter().enumerate() {
                    let jj = j as isize + o as isize - hp;
                    if (0..np as isize).contains(&jj) {
                        tmp[i * np + jj as usize] += v * w;
                    }
                }
            }
        }
        let mut out = vec![0.0; nx * np];
        let hx = (kx.len() / 2) as isize;
        for i in 0..nx {
            for (o, w) in kx.iter().enumerate() {
                let ii = i as isize + o as isize - hx;
                if !(0..nx as isize).contains(&ii) {
                    continue;
                }
                let (src, dst) = (i * np, ii as usize * np);
                for j in 0..np {
                    out[dst + j] += tmp[src + j] * w;
                }
            }
        }
        Self { grid: self.grid, values: out }
    }
}

fn kernel(sigma: f64) -> Vec<f64> {
    if !(sigma > 0.0) {
        return vec![1.0];
    }
    let half = (4.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> =
        (-half..=half).map(|o| (-0.5 * (o as f64 / sigma).powi(2)).exp()).collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= s);
    k
}
