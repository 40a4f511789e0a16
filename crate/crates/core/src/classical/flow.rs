use alloc::vec::Vec;

use num_traits::Float;

use super::{DuffingParams, PhasePoint, SectionCloud};
use crate::error::{Error, Result};
use crate::numerics::integrate::rk4_unchecked;
use crate::numerics::RngStream;

/// Divergence threshold; the double well never gets there for sane input.
const BLOWUP: f64 = 1e6;

/// Fixed time step snapped so that an integer number of steps spans one
/// drive period. Step `m` happens at `t0 + m * dt`, computed by
/// multiplication so strobe times never drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrobeClock {
    pub t0: f64,
    pub dt: f64,
    pub steps_per_period: usize,
}

impl StrobeClock {
    pub fn new(params: &DuffingParams, t0: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid(alloc::format!("time step must be > 0, got {dt}")));
        }
        let period = params.period();
        let steps = (period / dt - 1e-9).ceil().max(1.0) as usize;
        Ok(Self { t0, dt: period / steps as f64, steps_per_period: steps })
    }

    #[inline]
    pub fn time(&self, step: usize) -> f64 {
        self.t0 + step as f64 * self.dt
    }
}

fn check_state(y: &[f64; 2], t: f64) -> Result<()> {
    if y[0].is_finite() && y[1].is_finite() && y[0].abs() <= BLOWUP && y[1].abs() <= BLOWUP {
        Ok(())
    } else {
        Err(Error::overflow(alloc::format!("Duffing trajectory diverged at t = {t}: ({}, {})", y[0], y[1])))
    }
}

/// Deterministic trajectory sampled every step, start included.
///
/// `dt` is snapped down so an integer number of steps fits in a drive
/// period; the run covers at least `duration`.
pub fn duffing_flow(params: &DuffingParams, start: PhasePoint, duration: f64, dt: f64) -> Result<Vec<PhasePoint>> {
    params.validate()?;
    if !(duration >= 0.0) || !duration.is_finite() {
        return Err(Error::invalid(alloc::format!("duration must be >= 0, got {duration}")));
    }
    let clock = StrobeClock::new(params, start.t, dt)?;
    let steps = (duration / clock.dt - 1e-9).ceil().max(0.0) as usize;
    let mut y = [start.x, start.p];
    check_state(&y, start.t)?;
    let mut f = |t: f64, y: &[f64; 2]| params.vector_field(t, y);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(start);
    for m in 0..steps {
        y = rk4_unchecked(&mut f, &y, clock.time(m), clock.dt);
        let t = clock.time(m + 1);
        check_state(&y, t)?;
        out.push(PhasePoint::new(y[0], y[1], t));
    }
    Ok(out)
}

/// Poincaré section of the deterministic flow: `n_points` strobe samples
/// after discarding `skip` drive periods. The first sample with `skip = 0`
/// is the image of `start` under one period of flow.
pub fn poincare_section(
    params: &DuffingParams,
    start: PhasePoint,
    n_points: usize,
    skip: usize,
    dt: f64,
) -> Result<SectionCloud> {
    strobe(params, start, n_points, skip, dt, None)
}

/// Poincaré section of the Langevin dynamics.
///
/// Each step is an RK4 step of the deterministic drift followed by an
/// additive momentum kick `sqrt(4 M Gamma kT dt) g`. With `kT = 0` no random
/// numbers are drawn and the result is bitwise [`poincare_section`].
pub fn langevin_section(
    params: &DuffingParams,
    start: PhasePoint,
    n_points: usize,
    skip: usize,
    dt: f64,
    rng: &mut RngStream,
) -> Result<SectionCloud> {
    strobe(params, start, n_points, skip, dt, Some(rng))
}

fn strobe(
    params: &DuffingParams,
    start: PhasePoint,
    n_points: usize,
    skip: usize,
    dt: f64,
    rng: Option<&mut RngStream>,
) -> Result<SectionCloud> {
    params.validate()?;
    if n_points == 0 {
        return Err(Error::invalid("n_points must be >= 1"));
    }
    let clock = StrobeClock::new(params, start.t, dt)?;
    let kick = (params.noise_strength() * clock.dt).sqrt();
    let mut rng = rng.filter(|_| kick > 0.0);

    let mut y = [start.x, start.p];
    check_state(&y, start.t)?;
    let mut f = |t: f64, y: &[f64; 2]| params.vector_field(t, y);
    let mut points = Vec::with_capacity(n_points);
    let s = clock.steps_per_period;
    for period in 0..(skip + n_points) {
        let base = period * s;
        for k in 0..s {
            y = rk4_unchecked(&mut f, &y, clock.time(base + k), clock.dt);
            if let Some(r) = rng.as_deref_mut() {
                y[1] += kick * r.gauss();
            }
        }
        let t = clock.time(base + s);
        check_state(&y, t)?;
        if period >= skip {
            points.push(PhasePoint::new(y[0], y[1], t));
        }
    }
    Ok(SectionCloud { points, params: *params, transient_skip: skip })
}
