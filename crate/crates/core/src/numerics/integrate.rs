use alloc::vec::Vec;

use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// A state that can be advanced by a linear-combination integrator.
pub trait OdeState: Clone {
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
    fn is_finite(&self) -> bool;
}

impl<const N: usize> OdeState for [f64; N] {
    #[inline]
    fn axpy(&mut self, a: f64, x: &Self) {
        for (y, x) in self.iter_mut().zip(x) {
            *y += a * x;
        }
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (y, x) in self.iter_mut().zip(x) {
            *y += a * x;
        }
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for Vec<C64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (y, x) in self.iter_mut().zip(x) {
            *y += x * a;
        }
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl OdeState for ComplexMatrix {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.axpy_real(a, x);
    }

    fn is_finite(&self) -> bool {
        ComplexMatrix::is_finite(self)
    }
}

/// One classical fourth-order Runge-Kutta step of `y' = f(t, y)`.
pub fn rk4_step<S, F>(mut f: F, y: &S, t: f64, dt: f64) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(alloc::format!("rk4_step needs dt > 0, got {dt}")));
    }
    let out = rk4_unchecked(&mut f, y, t, dt);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::overflow(alloc::format!("non-finite state after RK4 step at t = {t}")))
    }
}

/// RK4 without argument or overflow checks, for hot loops that validate
/// once up front.
#[inline]
pub(crate) fn rk4_unchecked<S, F>(f: &mut F, y: &S, t: f64, dt: f64) -> S
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    let half = 0.5 * dt;
    let k1 = f(t, y);
    let mut y2 = y.clone();
    y2.axpy(half, &k1);
    let k2 = f(t + half, &y2);
    let mut y3 = y.clone();
    y3.axpy(half, &k2);
    let k3 = f(t + half, &y3);
    let mut y4 = y.clone();
    y4.axpy(dt, &k3);
    let k4 = f(t + dt, &y4);
    let mut out = y.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Float;

    #[test]
    fn zero_field_leaves_state_unchanged() {
        let y = [1.5, -2.0, 0.25];
        let out = rk4_step(|_, _| [0.0; 3], &y, 0.0, 0.3).unwrap();
        assert_eq!(out, y);
    }

    #[test]
    fn exponential_growth_one_step() {
        let out = rk4_step(|_, y: &[f64; 1]| *y, &[1.0], 0.0, 0.1).unwrap();
        assert!((out[0] - 0.1f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn harmonic_oscillator_returns_after_one_period() {
        let dt = 1e-3;
        let steps = (2.0 * core::f64::consts::PI / dt).round() as usize;
        let h = 2.0 * core::f64::consts::PI / steps as f64;
        let mut y = [1.0, 0.0];
        for k in 0..steps {
            y = rk4_step(|_, y: &[f64; 2]| [y[1], -y[0]], &y, k as f64 * h, h).unwrap();
        }
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9, "{y:?}");
    }

    #[test]
    fn observed_order_is_four() {
        // y' = lambda y over [0, 1], dt halving, Richardson slope.
        let lambda = -1.3;
        let err = |steps: usize| {
            let h = 1.0 / steps as f64;
            let mut y = [1.0];
            for k in 0..steps {
                y = rk4_step(|_, y: &[f64; 1]| [lambda * y[0]], &y, k as f64 * h, h).unwrap();
            }
            (y[0] - lambda.exp()).abs()
        };
        let (e1, e2) = (err(10), err(20));
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn rejects_bad_step_and_reports_overflow() {
        assert!(matches!(rk4_step(|_, y: &[f64; 1]| *y, &[1.0], 0.0, 0.0), Err(Error::InvalidArgument(_))));
        let r = rk4_step(|_, _: &[f64; 1]| [f64::INFINITY], &[1.0], 0.0, 0.1);
        assert!(matches!(r, Err(Error::NumericalOverflow(_))));
    }
}
