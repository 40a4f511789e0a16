use duffing_core::classical::PhasePoint;
use duffing_core::numerics::RngStream;
use duffing_core::oscillator::{momentum_op, position_op, FrameCenter, QuantumState};
use duffing_core::phase_space::{invariant_density, WignerGrid, WignerTransform};
use duffing_core::qsd::{DensityAccumulator, DensityOperator, DuffingTrajectory, StrobeMap};

use super::{initial_density, initial_state, Context};
use crate::config::InitialState;
use crate::error::CliError;
use crate::output::{write_density, write_pgm, write_rows, write_section, write_wigner, QSD_SECTION_TAG};
use crate::parallel::map_indexed;

/// Coherent starts in the moving frame begin as the vacuum of a frame
/// centered on the start point, which sidesteps the fixed-basis truncation
/// bound.
fn trajectory_start(ctx: &Context<'_>) -> Result<QuantumState, CliError> {
    let c = ctx.config;
    if c.initial_state == InitialState::Coherent && c.recenter_threshold.is_some() {
        let mut psi = QuantumState::fock(&c.basis()?, 0)?;
        psi.center = FrameCenter::new(c.start_x, c.start_p);
        Ok(psi)
    } else {
        initial_state(c)
    }
}

pub(super) struct TrajectoryOutput {
    pub points: Vec<PhasePoint>,
    pub last: QuantumState,
    pub recenterings: usize,
}

/// Runs `ensemble` QSD trajectories; trajectory `k` uses random stream `k`.
pub(super) fn qsd_trajectories(ctx: &Context<'_>) -> Result<Vec<TrajectoryOutput>, CliError> {
    let c = ctx.config;
    let (params, spec) = (c.params(), c.spec());
    let psi0 = trajectory_start(ctx)?;
    map_indexed(&ctx.pool, c.ensemble, |k| -> Result<TrajectoryOutput, CliError> {
        let mut rng = RngStream::new(c.seed, k as u64);
        let mut traj = DuffingTrajectory::new(&psi0, &params, &spec, c.dt, c.section_options())?;
        let mut points = Vec::with_capacity(c.n_points);
        for period in 0..c.skip + c.n_points {
            traj.advance_period(&mut rng).map_err(|e| CliError::from(e).context(&format!("trajectory {k}")))?;
            if period >= c.skip {
                points.push(traj.phase_point());
            }
        }
        Ok(TrajectoryOutput { points, recenterings: traj.recenterings(), last: traj.state })
    })
}

/// QSD surface of section, rows in trajectory order.
pub(super) fn qsd_section(ctx: &mut Context<'_>) -> Result<(), CliError> {
    let c = ctx.config;
    let runs = qsd_trajectories(ctx)?;
    let points: Vec<PhasePoint> = runs.iter().flat_map(|r| r.points.iter().copied()).collect();
    write_section(&ctx.out.path(".csv"), QSD_SECTION_TAG, &points)?;
    if c.dump_density {
        let mut acc = DensityAccumulator::new(&c.basis()?);
        for r in &runs {
            acc.add_state(&r.last)?;
        }
        write_density(&ctx.out.path(".rho.csv"), &acc.mean()?.matrix)?;
    }
    ctx.record("points", points.len());
    ctx.record("recenterings", runs.iter().map(|r| r.recenterings).collect::<Vec<_>>());
    Ok(())
}

/// Iterates the one-period map on the initial density operator.
pub(super) fn strobe_map(ctx: &mut Context<'_>) -> Result<(), CliError> {
    let c = ctx.config;
    let b = c.basis()?;
    let map = StrobeMap::new(&c.params(), &c.spec(), &b, c.dt)?;
    let (x, p) = (position_op(&b), momentum_op(&b));
    let mut rho = initial_density(c)?;
    let mut rows = Vec::with_capacity(c.n_points);
    let period = c.params().period();
    for k in 1..=c.skip + c.n_points {
        rho = map.apply(&rho)?;
        if k > c.skip {
            rows.push((k, k as f64 * period, rho.expect(&x)?.re, rho.expect(&p)?.re, rho.purity()));
        }
    }
    write_rows(&ctx.out.path(".csv"), &["k", "t", "x", "p", "purity"], rows)?;
    if c.dump_density {
        write_density(&ctx.out.path(".rho.csv"), &rho.matrix)?;
    }
    ctx.record("final_purity", rho.purity());
    ctx.record("min_eigenvalue", rho.min_eigenvalue()?);
    Ok(())
}

fn transform(ctx: &Context<'_>, rho: &DensityOperator) -> Result<WignerGrid, CliError> {
    let grid = ctx.config.grid()?;
    let t = WignerTransform::new(rho, &grid)?;
    let rows = map_indexed(&ctx.pool, grid.nx, |i| Ok::<_, CliError>(t.row(i)))?;
    Ok(WignerGrid { grid, values: rows.concat(), hbar: rho.basis.hbar })
}

fn finish_wigner(ctx: &mut Context<'_>, w: &WignerGrid) -> Result<(), CliError> {
    write_wigner(&ctx.out.path(".csv"), w)?;
    write_pgm(&ctx.out.path(".pgm"), &w.to_field())?;
    let negative: f64 = w.values.iter().filter(|v| **v < 0.0).map(|v| -v).sum::<f64>() * w.grid.cell_area();
    ctx.record("integral", w.integral());
    ctx.record("max_abs", w.max_abs());
    ctx.record("bound", w.bound());
    ctx.record("negative_volume", negative);
    Ok(())
}

/// Wigner function of the initial state after `skip` map iterations.
pub(super) fn wigner(ctx: &mut Context<'_>) -> Result<(), CliError> {
    let c = ctx.config;
    let mut rho = initial_density(c)?;
    if c.skip > 0 {
        let map = StrobeMap::new(&c.params(), &c.spec(), &rho.basis, c.dt)?;
        for _ in 0..c.skip {
            rho = map.apply(&rho)?;
        }
    }
    let w = transform(ctx, &rho)?;
    finish_wigner(ctx, &w)
}

/// Wigner function of the map iterates averaged over `n_points` periods
/// after `skip`.
pub(super) fn invariant_wigner(ctx: &mut Context<'_>) -> Result<(), CliError> {
    let c = ctx.config;
    let rho = invariant_density(&initial_density(c)?, &c.params(), &c.spec(), c.n_points, c.skip, c.dt)?;
    if c.dump_density {
        write_density(&ctx.out.path(".rho.csv"), &rho.matrix)?;
    }
    let w = transform(ctx, &rho)?;
    finish_wigner(ctx, &w)
}
