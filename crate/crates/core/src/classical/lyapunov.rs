use alloc::vec::Vec;

use num_traits::Float;

use super::{DuffingParams, PhasePoint};
use crate::classical::flow::StrobeClock;
use crate::error::{Error, Result};
use crate::numerics::integrate::rk4_unchecked;

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    /// Total log-stretch of the tangent vector divided by elapsed time.
    pub exponent: f64,
    /// Mean of the running estimate over the last half of the run.
    pub last_half_mean: f64,
    /// Running estimate after each renormalization.
    pub running: Vec<f64>,
}

/// Largest Lyapunov exponent by the Benettin method: the flow is integrated
/// together with its tangent linearization and the tangent vector is
/// renormalized every `renorm_interval`.
pub fn lyapunov_max(
    params: &DuffingParams,
    start: PhasePoint,
    duration: f64,
    dt: f64,
    renorm_interval: f64,
) -> Result<LyapunovEstimate> {
    params.validate()?;
    if !(renorm_interval > 0.0) || !(duration >= 2.0 * renorm_interval) {
        return Err(Error::invalid(alloc::format!(
            "need duration >> renorm_interval > 0, got {duration} and {renorm_interval}"
        )));
    }
    let clock = StrobeClock::new(params, start.t, dt)?;
    let per_renorm = ((renorm_interval / clock.dt).round() as usize).max(1);
    let n_renorm = ((duration / clock.dt) as usize / per_renorm).max(1);

    let m = params.mass;
    let g2 = 2.0 * params.damping;
    let mut field = |t: f64, s: &[f64; 4]| {
        let [x, p, dx, dp] = *s;
        let v = params.vector_field(t, &[x, p]);
        [v[0], v[1], dp / m, -DuffingParams::curvature(x) * dx - g2 * dp]
    };

    let mut s = [start.x, start.p, 1.0, 0.0];
    let mut log_sum = 0.0;
    let mut running = Vec::with_capacity(n_renorm);
    let mut step = 0usize;
    for _ in 0..n_renorm {
        for _ in 0..per_renorm {
            s = rk4_unchecked(&mut field, &s, clock.time(step), clock.dt);
            step += 1;
        }
        let norm = (s[2] * s[2] + s[3] * s[3]).sqrt();
        if !norm.is_finite() || norm == 0.0 || !s[0].is_finite() || s[0].abs() > 1e6 {
            return Err(Error::overflow(alloc::format!(
                "tangent integration failed at t = {}",
                clock.time(step)
            )));
        }
        log_sum += norm.ln();
        s[2] /= norm;
        s[3] /= norm;
        running.push(log_sum / (step as f64 * clock.dt));
    }
    let half = &running[running.len() / 2..];
    let last_half_mean = half.iter().sum::<f64>() / half.len() as f64;
    Ok(LyapunovEstimate { exponent: *running.last().unwrap(), last_half_mean, running })
}
