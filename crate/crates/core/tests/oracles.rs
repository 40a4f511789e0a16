//! Library results against independent reference computations written
//! here from scratch.

use std::f64::consts::PI;

use duffing_core::classical::{poincare_section, DuffingParams, PhasePoint};
use duffing_core::grid::Grid2d;
use duffing_core::numerics::{ComplexMatrix, HermitianEigen, C64};
use duffing_core::oscillator::{coherent_state, duffing_hamiltonian, BasisSpec, FrameCenter, QuantumState};
use duffing_core::phase_space::wigner_transform;
use duffing_core::qsd::{DensityOperator, StrobeMap, UnravelingSpec};

fn duffing_rhs(p: &DuffingParams, t: f64, y: [f64; 2]) -> [f64; 2] {
    let force = y[0] - y[0].powi(3) - 2.0 * p.damping * y[1] + p.mass * p.drive_amplitude * (p.drive_frequency * t).cos();
    [y[1] / p.mass, force]
}

fn oracle_strobe(p: &DuffingParams, start: [f64; 2], periods: usize, steps: usize) -> Vec<[f64; 2]> {
    let h = 2.0 * PI / p.drive_frequency / steps as f64;
    let mut y = start;
    let mut out = Vec::new();
    for k in 0..periods * steps {
        let t = k as f64 * h;
        let k1 = duffing_rhs(p, t, y);
        let k2 = duffing_rhs(p, t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = duffing_rhs(p, t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = duffing_rhs(p, t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (k + 1) % steps == 0 {
            out.push(y);
        }
    }
    out
}

#[test]
fn section_matches_reference_integrator() {
    let params = DuffingParams::default();
    let steps = 1000;
    let dt = 2.0 * PI / steps as f64;
    let lib = poincare_section(&params, PhasePoint::new(0.5, 0.0, 0.0), 10, 0, dt).unwrap();
    // a 4x finer reference bounds the discretization error as well
    let fine = oracle_strobe(&params, [0.5, 0.0], 10, 4 * steps);
    let same = oracle_strobe(&params, [0.5, 0.0], 10, steps);
    for ((pt, s), f) in lib.points.iter().zip(&same).zip(&fine) {
        assert!((pt.x - s[0]).abs() < 1e-10 && (pt.p - s[1]).abs() < 1e-10, "{pt:?} vs {s:?}");
        assert!((pt.x - f[0]).abs() < 1e-7 && (pt.p - f[1]).abs() < 1e-7, "{pt:?} vs {f:?}");
    }
}

#[test]
fn undriven_lossless_map_is_the_unitary_propagator() {
    let hbar = 0.1;
    let b = BasisSpec::new(16, hbar).unwrap();
    let params = DuffingParams { hbar, damping: 0.0, drive_amplitude: 0.0, ..DuffingParams::default() };
    let spec = UnravelingSpec::zero_temperature(0.0, hbar);
    let map = StrobeMap::new(&params, &spec, &b, 2.0 * PI / 4000.0).unwrap();
    let rho = DensityOperator::from_state(&coherent_state(&b, 0.6, 0.2).unwrap()).unwrap();
    let got = map.apply(&rho).unwrap();

    let eig = HermitianEigen::new(&duffing_hamiltonian(&b, &params, 0.0)).unwrap();
    let period = 2.0 * PI;
    let v = &eig.vectors;
    let n = b.dim;
    let phases: Vec<C64> = eig.values.iter().map(|e| C64::from_polar(1.0, -e * period / hbar)).collect();
    let u = ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum());
    let expected = u.matmul(&rho.matrix).unwrap().matmul(&u.dagger()).unwrap();
    let expected = DensityOperator::new(expected, b).unwrap();
    assert!(got.trace_distance(&expected).unwrap() < 1e-8);
}

/// Cat state `|q> + |-q>` on the position axis: both quadrature densities are
/// known in closed form.
#[test]
fn wigner_marginals_of_a_cat_match_closed_forms() {
    let hbar = 0.1;
    let q = 0.7;
    let b = BasisSpec::new(48, hbar).unwrap();
    let plus = coherent_state(&b, q, 0.0).unwrap();
    let minus = coherent_state(&b, -q, 0.0).unwrap();
    let amps = plus.amplitudes.iter().zip(&minus.amplitudes).map(|(a, c)| a + c).collect();
    let mut psi = QuantumState::new(amps, b, FrameCenter::ORIGIN).unwrap();
    psi.normalize().unwrap();
    let rho = DensityOperator::from_state(&psi).unwrap();
    let grid = Grid2d::new((-2.0, 2.0), (-1.6, 1.6), 96, 96).unwrap();
    let w = wigner_transform(&rho, &grid).unwrap();

    let overlap = (-q * q / hbar).exp();
    let norm = 2.0 * (1.0 + overlap);
    let gauss = |y: f64| (-y * y / hbar).exp() / (PI * hbar).sqrt();
    let pos = |x: f64| (gauss(x - q) + gauss(x + q) + 2.0 * (gauss(x - q) * gauss(x + q)).sqrt()) / norm;
    let mom = |p: f64| 2.0 * gauss(p) * (1.0 + (2.0 * p * q / hbar).cos()) / norm;

    for (i, m) in w.marginal_x().iter().enumerate() {
        let x = grid.x_center(i);
        assert!((m - pos(x)).abs() < 1e-4, "x = {x}: {m} vs {}", pos(x));
    }
    for (j, m) in w.marginal_p().iter().enumerate() {
        let p = grid.p_center(j);
        assert!((m - mom(p)).abs() < 1e-4, "p = {p}: {m} vs {}", mom(p));
    }
}
