use duffing_core::classical::{langevin_section, measure_map_histogram, poincare_section, DuffingParams, PhasePoint};
use duffing_core::grid::Field2d;
use duffing_core::histories::{
    classical_paths, classical_probability_check, coherent_samples, CellGrid, CellIndex, HistoryEngine,
    HistoryProbabilities,
};
use duffing_core::numerics::RngStream;
use duffing_core::phase_space::histogram_overlap;
use serde_json::json;

use super::histories::{grid_json, history_label, outcome_label, spacing_warning};
use super::quantum::qsd_trajectories;
use super::{initial_density, Context};
use crate::config::CompareMode;
use crate::error::CliError;
use crate::output::{bin_rows, read_table, write_rows, write_section, CLASSICAL_SECTION_TAG, QSD_SECTION_TAG, WIGNER_TAG};
use crate::parallel::map_indexed;

/// Classical streams are offset so they never coincide with QSD streams.
const CLASSICAL_STREAM_OFFSET: u64 = 1 << 32;

pub(super) fn compare(ctx: &mut Context<'_>) -> Result<(), CliError> {
    match ctx.config.compare_mode {
        CompareMode::Overlap => overlap(ctx),
        CompareMode::Histories => histories(ctx),
    }
}

fn field_from_file(ctx: &Context<'_>, path: &str) -> Result<(Field2d, usize), CliError> {
    let grid = ctx.config.grid()?;
    let (tag, rows) = read_table(std::path::Path::new(path))?;
    if tag == WIGNER_TAG {
        Ok((bin_rows(&rows, grid), rows.len()))
    } else if tag == CLASSICAL_SECTION_TAG || tag == QSD_SECTION_TAG {
        let pts: Vec<PhasePoint> = rows.iter().map(|r| PhasePoint::new(r[0], r[1], r[2])).collect();
        Ok((measure_map_histogram(&pts, grid)?.field, pts.len()))
    } else {
        Err(CliError::config(format!("{path}: unknown format tag '{tag}'")))
    }
}

fn points_field(ctx: &Context<'_>, pts: &[PhasePoint]) -> Result<Field2d, CliError> {
    Ok(measure_map_histogram(pts, ctx.config.grid()?)?.field)
}

/// Bhattacharyya overlap of two phase-space distributions after the same
/// Gaussian smoothing. Defaults: A = classical Langevin attractor, B = QSD
/// section, both generated from the config.
fn overlap(ctx: &mut Context<'_>) -> Result<(), CliError> {
    let c = ctx.config;
    let (a, n_a) = match &c.compare_a {
        Some(path) => field_from_file(ctx, path)?,
        None => {
            let params = c.params();
            let clouds = map_indexed(&ctx.pool, c.ensemble, |k| {
                let mut rng = RngStream::new(c.seed, CLASSICAL_STREAM_OFFSET + k as u64);
                langevin_section(&params, c.start(), c.n_points, c.skip, c.dt, &mut rng)
            })?;
            let pts: Vec<PhasePoint> = clouds.into_iter().flat_map(|cl| cl.points).collect();
            write_section(&ctx.out.path(".classical.csv"), CLASSICAL_SECTION_TAG, &pts)?;
            (points_field(ctx, &pts)?, pts.len())
        }
    };
    let (b, n_b) = match &c.compare_b {
        Some(path) => field_from_file(ctx, path)?,
        None => {
            let runs = qsd_trajectories(ctx)?;
            let pts: Vec<PhasePoint> = runs.into_iter().flat_map(|r| r.points).collect();
            write_section(&ctx.out.path(".qsd.csv"), QSD_SECTION_TAG, &pts)?;
            (points_field(ctx, &pts)?, pts.len())
        }
    };
    let sigma = c.smoothing_width();
    let (a, b) = (a.gaussian_smooth(sigma, sigma), b.gaussian_smooth(sigma, sigma));
    let r = histogram_overlap(&a, &b)?;
    let rows = vec![
        ("overlap", r.coefficient),
        ("clipped_a", r.clipped_a),
        ("clipped_b", r.clipped_b),
        ("samples_a", n_a as f64),
        ("samples_b", n_b as f64),
        ("smoothing", sigma),
    ];
    write_rows(&ctx.out.path(".csv"), &["quantity", "value"], rows)?;
    ctx.record("overlap", r.coefficient);
    ctx.record("clipped_a", r.clipped_a);
    ctx.record("clipped_b", r.clipped_b);
    ctx.record("smoothing", sigma);
    Ok(())
}

/// Cell sequence of the noiseless classical path from the start point.
fn classical_cells(params: &DuffingParams, grid: &CellGrid, start: PhasePoint, n_times: usize, dt: f64) -> Result<Vec<CellIndex>, CliError> {
    let mut cells = vec![grid.locate(start.x, start.p)];
    if n_times > 1 {
        let cold = DuffingParams { temperature: 0.0, ..*params };
        let cloud = poincare_section(&cold, start, n_times - 1, 0, dt)?;
        cells.extend(cloud.points.iter().map(|pt| grid.locate(pt.x, pt.p)));
    }
    Ok(cells)
}

/// Quantum history probabilities from a coherent start against the cell
/// frequencies of classical Langevin paths started from its Wigner samples.
fn histories(ctx: &mut Context<'_>) -> Result<(), CliError> {
    let c = ctx.config;
    let lattice = c.lattice();
    spacing_warning(ctx, lattice.dq.min(lattice.dp))?;
    let basis = c.basis()?;
    let grid = CellGrid::new(&basis, lattice, c.cell_weight())?;
    let m = grid.n_outcomes();
    let count = (m as u64).checked_pow(c.n_times as u32).unwrap_or(u64::MAX);
    if count > c.history_budget {
        return Err(duffing_core::Error::HistoryBudget { required: count, budget: c.history_budget }.into());
    }
    let rho0 = initial_density(c)?;
    let params = c.params();
    let engine = HistoryEngine::new(&rho0, &grid, c.n_times, &params, &c.spec(), c.dt, u64::MAX)?;
    let parts = map_indexed(&ctx.pool, m, |i| Ok::<_, CliError>(engine.branch_probabilities(i)))?;
    let quantum = HistoryProbabilities::from_diagonal(parts.concat(), c.n_times, m);

    let mut rng = RngStream::new(c.seed, u64::MAX);
    let starts = coherent_samples(&basis, c.start_x, c.start_p, c.ensemble, &mut rng);
    let paths = classical_paths(&params, &starts, c.n_times, c.dt, c.seed)?;
    let report = classical_probability_check(&grid, &quantum, &paths)?;

    let outcomes = |a: usize| -> Vec<usize> {
        let mut o = vec![0; c.n_times];
        let mut a = a;
        for k in (0..c.n_times).rev() {
            o[k] = a % m;
            a /= m;
        }
        o
    };
    let rows: Vec<(usize, String, f64, f64)> = (0..quantum.probabilities.len())
        .map(|a| (a, history_label(&grid, &outcomes(a)), report.quantum[a], report.classical[a]))
        .collect();
    write_rows(&ctx.out.path(".csv"), &["alpha", "history", "quantum", "classical"], rows)?;

    let rest = m - 1;
    let peak = (0..quantum.probabilities.len())
        .filter(|&a| !outcomes(a).contains(&rest))
        .max_by(|&a, &b| quantum.probabilities[a].total_cmp(&quantum.probabilities[b]));
    let path_cells = classical_cells(&params, &grid, c.start(), c.n_times, c.dt)?;
    let path_label: Vec<String> = path_cells.iter().map(|&ci| outcome_label(ci)).collect();
    let peak_label = peak.map(|a| history_label(&grid, &outcomes(a)));
    ctx.record("grid", grid_json(&grid));
    ctx.record("tv_distance", report.tv_distance);
    ctx.record("samples", report.samples);
    ctx.record("quantum_total", quantum.total());
    ctx.record("most_probable_cell_history", json!(peak_label));
    ctx.record("classical_path_cells", path_label.join("-"));
    ctx.record("peak_matches_classical", peak_label.as_deref() == Some(path_label.join("-").as_str()));
    Ok(())
}
