use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{Field2d, Grid2d};
use crate::numerics::{ComplexMatrix, C64};
use crate::qsd::DensityOperator;

/// Largest probability allowed outside the grid.
pub const COVERAGE_TOLERANCE: f64 = 1e-4;

/// Wigner function sampled at cell centers,
/// `W(X, p) = (1/(2 pi hbar)) int dxi exp(-i xi p / hbar) <X + xi/2| rho |X - xi/2>`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub grid: Grid2d,
    pub values: Vec<f64>,
    pub hbar: f64,
}

impl WignerGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.flat(i, j)]
    }

    /// Riemann sum `sum W dx dp`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `1/(pi hbar)`, the bound on `|W|` for any state.
    pub fn bound(&self) -> f64 {
        1.0 / (core::f64::consts::PI * self.hbar)
    }

    /// `int W dp` at each `x` center.
    pub fn marginal_x(&self) -> Vec<f64> {
        let g = &self.grid;
        (0..g.nx).map(|i| (0..g.np).map(|j| self.get(i, j)).sum::<f64>() * g.dp()).collect()
    }

    /// `int W dx` at each `p` center.
    pub fn marginal_p(&self) -> Vec<f64> {
        let g = &self.grid;
        (0..g.np).map(|j| (0..g.nx).map(|i| self.get(i, j)).sum::<f64>() * g.dx()).collect()
    }

    pub fn to_field(&self) -> Field2d {
        Field2d { grid: self.grid, values: self.values.clone() }
    }

    /// Pointwise `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::invalid("Wigner grids differ"));
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { grid: self.grid, values, hbar: self.hbar })
    }
}

/// Normalized Hermite functions `h_n(y)`, `int h_n^2 dy = 1`.
pub fn hermite_functions(y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = core::f64::consts::PI.powf(-0.25) * (-0.5 * y * y).exp();
    if out.len() > 1 {
        out[1] = core::f64::consts::SQRT_2 * y * out[0];
    }
    for n in 1..out.len().saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * y * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

/// Wigner transform of one density operator, evaluated row by row so callers
/// can spread rows over threads.
#[derive(Debug, Clone)]
pub struct WignerTransform {
    rho: ComplexMatrix,
    grid: Grid2d,
    hbar: f64,
    /// Length scale `sqrt(hbar / (M w_ref))` of the basis wavefunctions.
    s: f64,
    /// Half-width beyond which every basis function is negligible.
    x_support: f64,
    step: f64,
}

impl WignerTransform {
    /// Validates that the grid holds all but [`COVERAGE_TOLERANCE`] of the
    /// probability; otherwise returns a grid-coverage error carrying a
    /// suggested extent.
    pub fn new(rho: &DensityOperator, grid: &Grid2d) -> Result<Self> {
        grid.validate()?;
        let b = &rho.basis;
        let s = (b.hbar / (b.mass * b.omega_ref)).sqrt();
        let root = (2.0 * b.dim as f64 + 1.0).sqrt();
        let x_support = s * (root + 5.0);
        let p_max = grid.p_lo.abs().max(grid.p_hi.abs());
        let omega = (root + 5.0) / s + p_max / b.hbar;
        let t = Self { rho: rho.matrix.clone(), grid: *grid, hbar: b.hbar, s, x_support, step: core::f64::consts::PI / omega };
        t.check_coverage(rho)?;
        Ok(t)
    }

    fn check_coverage(&self, rho: &DensityOperator) -> Result<()> {
        let g = &self.grid;
        let px = MarginalScan::new(rho, Quadrature::Position);
        let pp = MarginalScan::new(rho, Quadrature::Momentum);
        let outside = px.mass_outside(g.x_lo, g.x_hi) + pp.mass_outside(g.p_lo, g.p_hi);
        if outside < COVERAGE_TOLERANCE {
            return Ok(());
        }
        let q = 0.25 * COVERAGE_TOLERANCE;
        let (x_lo, x_hi) = px.quantile_range(q);
        let (p_lo, p_hi) = pp.quantile_range(q);
        Err(Error::GridCoverage { x_lo, x_hi, p_lo, p_hi })
    }

    pub fn grid(&self) -> &Grid2d {
        &self.grid
    }

    /// `W(x_i, p_j)` for all `j`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        let g = &self.grid;
        let x = g.x_center(i);
        let mut out = vec![0.0; g.np];
        let half_width = self.x_support - x.abs();
        if half_width <= 0.0 {
            return out;
        }
        let n = self.rho.rows();
        let k_max = (2.0 * half_width / self.step).ceil() as usize;
        let inv_sqrt_s = 1.0 / self.s.sqrt();
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        // f_k = <x + xi_k/2| rho |x - xi_k/2>, with f_{-k} = conj(f_k).
        let mut f = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let xi = k as f64 * self.step;
            hermite_functions((x + 0.5 * xi) / self.s, &mut u);
            hermite_functions((x - 0.5 * xi) / self.s, &mut v);
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..n {
                if u[a] == 0.0 {
                    continue;
                }
                let row = self.rho.row(a);
                let mut inner = C64::new(0.0, 0.0);
                for (r, vb) in row.iter().zip(&v) {
                    inner += r * vb;
                }
                acc += inner * u[a];
            }
            f.push(acc * (inv_sqrt_s * inv_sqrt_s));
        }
        let pref = self.step / (2.0 * core::f64::consts::PI * self.hbar);
        for (j, w) in out.iter_mut().enumerate() {
            let p = g.p_center(j);
            let rot = C64::from_polar(1.0, -self.step * p / self.hbar);
            let mut phase = rot;
            let mut sum = f[0].re;
            for fk in &f[1..] {
                sum += 2.0 * (fk * phase).re;
                phase *= rot;
            }
            *w = pref * sum;
        }
        out
    }
}

/// Wigner function of `rho` on the cell centers of `grid`.
pub fn wigner_transform(rho: &DensityOperator, grid: &Grid2d) -> Result<WignerGrid> {
    let t = WignerTransform::new(rho, grid)?;
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.nx {
        values.extend(t.row(i));
    }
    Ok(WignerGrid { grid: *grid, values, hbar: rho.basis.hbar })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Position,
    Momentum,
}

/// Position or momentum probability density of a density operator,
/// evaluated directly from the Fock expansion.
pub fn quadrature_density(rho: &DensityOperator, which: Quadrature, value: f64) -> f64 {
    let b = &rho.basis;
    let n = b.dim;
    let s = (b.hbar / (b.mass * b.omega_ref)).sqrt();
    let scale = match which {
        Quadrature::Position => s,
        Quadrature::Momentum => b.hbar / s,
    };
    let mut h = vec![0.0; n];
    hermite_functions(value / scale, &mut h);
    // <p|n> = (-i)^n h_n(p / scale) / sqrt(scale)
    let phase = |k: usize| match which {
        Quadrature::Position => C64::new(1.0, 0.0),
        Quadrature::Momentum => [C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)][k % 4],
    };
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..n {
        if h[a] == 0.0 {
            continue;
        }
        let ca = phase(a) * h[a];
        for c in 0..n {
            acc += ca * rho.matrix[(a, c)] * (phase(c) * h[c]).conj();
        }
    }
    acc.re / scale
}

/// A quadrature density tabulated on a fine uniform mesh over its support.
struct MarginalScan {
    nodes: Vec<f64>,
    density: Vec<f64>,
    h: f64,
}

impl MarginalScan {
    fn new(rho: &DensityOperator, which: Quadrature) -> Self {
        let b = &rho.basis;
        let s = (b.hbar / (b.mass * b.omega_ref)).sqrt();
        let scale = match which {
            Quadrature::Position => s,
            Quadrature::Momentum => b.hbar / s,
        };
        let root = (2.0 * b.dim as f64 + 1.0).sqrt();
        let support = scale * (root + 5.0);
        // The density is band-limited to about 2 root / scale.
        let h = core::f64::consts::PI * scale / (2.0 * root + 10.0);
        let m = (support / h).ceil() as isize;
        let nodes: Vec<f64> = (-m..=m).map(|k| k as f64 * h).collect();
        let density = nodes.iter().map(|&v| quadrature_density(rho, which, v).max(0.0)).collect();
        Self { nodes, density, h }
    }

    fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        let total: f64 = self.density.iter().sum::<f64>() * self.h;
        let inside: f64 =
            self.nodes.iter().zip(&self.density).filter(|(v, _)| **v >= lo && **v <= hi).map(|(_, d)| d).sum::<f64>()
                * self.h;
        (total - inside).max(0.0)
    }

    /// Interval leaving at most `q` of the mass on each side.
    fn quantile_range(&self, q: f64) -> (f64, f64) {
        let mut acc = 0.0;
        let mut lo = self.nodes[0];
        for (v, d) in self.nodes.iter().zip(&self.density) {
            acc += d * self.h;
            if acc > q {
                lo = *v - self.h;
                break;
            }
        }
        acc = 0.0;
        let mut hi = *self.nodes.last().unwrap();
        for (v, d) in self.nodes.iter().zip(&self.density).rev() {
            acc += d * self.h;
            if acc > q {
                hi = *v + self.h;
                break;
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::{coherent_state, BasisSpec, QuantumState};
    use core::f64::consts::PI;

    fn fock(n: usize, dim: usize, hbar: f64) -> DensityOperator {
        let b = BasisSpec::new(dim, hbar).unwrap();
        DensityOperator::from_state(&QuantumState::fock(&b, n).unwrap()).unwrap()
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let n = 12;
        let h = 0.01;
        let mut gram = vec![0.0; n * n];
        let mut buf = vec![0.0; n];
        let mut y = -12.0;
        while y <= 12.0 {
            hermite_functions(y, &mut buf);
            for a in 0..n {
                for b in 0..n {
                    gram[a * n + b] += buf[a] * buf[b] * h;
                }
            }
            y += h;
        }
        for a in 0..n {
            for b in 0..n {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a * n + b] - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn vacuum_is_the_analytic_gaussian() {
        let hbar = 0.05;
        let rho = fock(0, 16, hbar);
        let grid = Grid2d::new((-1.0, 1.0), (-1.0, 1.0), 41, 41).unwrap();
        let w = wigner_transform(&rho, &grid).unwrap();
        let mut worst = 0.0f64;
        for i in 0..grid.nx {
            for j in 0..grid.np {
                let (x, p) = (grid.x_center(i), grid.p_center(j));
                let exact = (-(x * x + p * p) / hbar).exp() / (PI * hbar);
                worst = worst.max((w.get(i, j) - exact).abs());
            }
        }
        assert!(worst < 1e-6 / (PI * hbar), "{worst}");
        assert!((w.integral() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn first_excited_state_is_negative_at_origin() {
        let hbar = 0.05;
        let rho = fock(1, 16, hbar);
        let grid = Grid2d::new((-1.0, 1.0), (-1.0, 1.0), 41, 41).unwrap();
        let w = wigner_transform(&rho, &grid).unwrap();
        let centre = w.get(20, 20);
        assert!((centre * PI * hbar + 1.0).abs() < 0.01, "{}", centre * PI * hbar);
    }

    #[test]
    fn coherent_marginals_match_gaussians() {
        let hbar = 0.05;
        let b = BasisSpec::new(30, hbar).unwrap();
        let (q0, p0) = (0.4, -0.3);
        let rho = DensityOperator::from_state(&coherent_state(&b, q0, p0).unwrap()).unwrap();
        let grid = Grid2d::new((-0.8, 1.6), (-1.5, 0.9), 96, 96).unwrap();
        let w = wigner_transform(&rho, &grid).unwrap();
        let var = hbar / 2.0;
        let gauss = |d: f64| (-(d * d) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
        for (i, m) in w.marginal_x().iter().enumerate() {
            assert!((m - gauss(grid.x_center(i) - q0)).abs() < 1e-4);
        }
        for (j, m) in w.marginal_p().iter().enumerate() {
            assert!((m - gauss(grid.p_center(j) - p0)).abs() < 1e-4);
        }
    }

    #[test]
    fn momentum_density_has_the_right_sign() {
        let b = BasisSpec::new(30, 0.05).unwrap();
        let rho = DensityOperator::from_state(&coherent_state(&b, 0.0, 0.3).unwrap()).unwrap();
        assert!(quadrature_density(&rho, Quadrature::Momentum, 0.3) > 10.0 * quadrature_density(&rho, Quadrature::Momentum, -0.3));
    }

    #[test]
    fn small_grid_is_rejected_with_suggestion() {
        let rho = fock(0, 16, 0.05);
        let grid = Grid2d::new((-0.2, 0.2), (-1.0, 1.0), 10, 10).unwrap();
        match wigner_transform(&rho, &grid) {
            Err(Error::GridCoverage { x_lo, x_hi, .. }) => assert!(x_lo < -0.6 && x_hi > 0.6 && x_hi < 1.5),
            other => panic!("expected coverage error, got {other:?}"),
        }
    }

    #[test]
    fn low_fock_states_are_normalized_and_bounded() {
        let hbar = 0.05;
        let grid = Grid2d::new((-1.2, 1.2), (-1.2, 1.2), 80, 80).unwrap();
        for n in 0..=5 {
            let w = wigner_transform(&fock(n, 24, hbar), &grid).unwrap();
            assert!((w.integral() - 1.0).abs() < 1e-4, "n={n}");
            assert!(w.max_abs() <= w.bound() + 1e-6, "n={n}");
        }
    }

    #[test]
    fn transform_is_linear() {
        let hbar = 0.05;
        let b = BasisSpec::new(24, hbar).unwrap();
        let r1 = DensityOperator::from_state(&coherent_state(&b, 0.3, 0.1).unwrap()).unwrap();
        let r2 = fock(3, 24, hbar);
        let a = 0.3;
        let mut m = r1.matrix.scale_real(a);
        m.axpy_real(1.0 - a, &r2.matrix);
        let mix = DensityOperator::new(m, b).unwrap();
        let grid = Grid2d::new((-1.2, 1.2), (-1.2, 1.2), 40, 40).unwrap();
        let w1 = wigner_transform(&r1, &grid).unwrap();
        let w2 = wigner_transform(&r2, &grid).unwrap();
        let wm = wigner_transform(&mix, &grid).unwrap();
        let expected = w1.combine(a, &w2, 1.0 - a).unwrap();
        for (x, y) in wm.values.iter().zip(&expected.values) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
