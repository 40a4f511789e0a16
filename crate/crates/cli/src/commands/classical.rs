use duffing_core::classical::{langevin_section, lyapunov_max, measure_map_histogram, poincare_section, PhasePoint};
use duffing_core::numerics::RngStream;

use super::Context;
use crate::error::CliError;
use crate::output::{write_histogram, write_rows, write_section, CLASSICAL_SECTION_TAG};
use crate::parallel::map_indexed;

fn finish_section(ctx: &mut Context<'_>, points: &[PhasePoint]) -> Result<(), CliError> {
    let path = ctx.out.path(".csv");
    write_section(&path, CLASSICAL_SECTION_TAG, points)?;
    let hist = measure_map_histogram(points, ctx.config.grid()?)?;
    write_histogram(&ctx.out.path(".hist.csv"), &hist)?;
    if hist.overflow_count > 0 {
        ctx.warn(format!("{} of {} points fall outside the histogram grid", hist.overflow_count, hist.total_count));
    }
    let (mut x_lo, mut x_hi, mut p_lo, mut p_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for pt in points {
        x_lo = x_lo.min(pt.x);
        x_hi = x_hi.max(pt.x);
        p_lo = p_lo.min(pt.p);
        p_hi = p_hi.max(pt.p);
    }
    ctx.record("points", points.len());
    ctx.record("extent", vec![x_lo, x_hi, p_lo, p_hi]);
    ctx.record("support_fraction", hist.support_fraction());
    ctx.record("overflow_weight", hist.overflow_weight);
    Ok(())
}

/// Deterministic surface of section.
pub(super) fn section(ctx: &mut Context<'_>) -> Result<(), CliError> {
    let c = ctx.config;
    let cloud = poincare_section(&c.params(), c.start(), c.n_points, c.skip, c.dt)?;
    finish_section(ctx, &cloud.points)
}

/// Langevin sections; trajectory `k` uses random stream `k`, rows are
/// written in trajectory order.
pub(super) fn langevin(ctx: &mut Context<'_>) -> Result<(), CliError> {
    let c = ctx.config;
    let params = c.params();
    let clouds = map_indexed(&ctx.pool, c.ensemble, |k| {
        let mut rng = RngStream::new(c.seed, k as u64);
        langevin_section(&params, c.start(), c.n_points, c.skip, c.dt, &mut rng)
    })?;
    let points: Vec<PhasePoint> = clouds.into_iter().flat_map(|cl| cl.points).collect();
    if c.temperature > 0.0 {
        let p_var = points.iter().map(|p| p.p * p.p).sum::<f64>() / points.len() as f64
            - (points.iter().map(|p| p.p).sum::<f64>() / points.len() as f64).powi(2);
        ctx.record("momentum_variance", p_var);
    }
    finish_section(ctx, &points)
}

pub(super) fn lyapunov(ctx: &mut Context<'_>) -> Result<(), CliError> {
    let c = ctx.config;
    let est = lyapunov_max(&c.params(), c.start(), c.lyapunov_duration, c.dt, c.renorm_interval)?;
    let step = c.lyapunov_duration / est.running.len() as f64;
    let rows = est.running.iter().enumerate().map(|(k, v)| ((k + 1) as f64 * step, *v));
    write_rows(&ctx.out.path(".csv"), &["t", "lambda"], rows)?;
    ctx.record("exponent", est.exponent);
    ctx.record("last_half_mean", est.last_half_mean);
    Ok(())
}
