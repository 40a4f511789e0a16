use duffing_core::histories::{
    history_probabilities, strobe_spacing_warning, CellGrid, CellIndex, DecoherenceWarning, HistoryEngine,
};
use serde_json::json;

use super::{initial_density, Context};
use crate::error::CliError;
use crate::output::{write_decoherence, write_rows};
use crate::parallel::map_indexed;

pub(super) fn outcome_label(c: CellIndex) -> String {
    match c {
        CellIndex::Cell(k) => k.to_string(),
        CellIndex::Rest => "rest".into(),
    }
}

pub(super) fn history_label(grid: &CellGrid, outcomes: &[usize]) -> String {
    outcomes.iter().map(|&o| outcome_label(grid.outcome(o))).collect::<Vec<_>>().join("-")
}

pub(super) fn spacing_warning(ctx: &mut Context<'_>, spacing: f64) -> Result<(), CliError> {
    match strobe_spacing_warning(&ctx.config.params(), spacing)? {
        Some(DecoherenceWarning::Undefined(why)) => {
            ctx.warn(format!("decoherence time undefined ({why}); histories may not decohere"))
        }
        Some(DecoherenceWarning::SpacingTooShort { spacing, decoherence_time }) => ctx.warn(format!(
            "strobe spacing {spacing:.4} is below the decoherence time {decoherence_time:.4}"
        )),
        None => {}
    }
    Ok(())
}

pub(super) fn grid_json(grid: &CellGrid) -> serde_json::Value {
    let lat = grid.lattice();
    let centers: Vec<[f64; 2]> = (0..grid.n_cells()).map(|k| lat.center(k).into()).collect();
    json!({
        "centers": centers,
        "dq": lat.dq,
        "dp": lat.dp,
        "weight": grid.weight(),
        "rest_min_eigenvalue": grid.rest_min_eigenvalue(),
        "outcomes": grid.n_outcomes(),
    })
}

/// Full decoherence functional over all histories of `n_times` strobe times.
pub(super) fn histories(ctx: &mut Context<'_>) -> Result<(), CliError> {
    let c = ctx.config;
    let lattice = c.lattice();
    spacing_warning(ctx, lattice.dq.min(lattice.dp))?;
    let grid = CellGrid::new(&c.basis()?, lattice, c.cell_weight())?;
    let rho0 = initial_density(c)?;
    let engine = HistoryEngine::new(&rho0, &grid, c.n_times, &c.params(), &c.spec(), c.dt, c.history_budget)?;
    let pairs = engine.first_pairs();
    let parts = map_indexed(&ctx.pool, pairs.len(), |k| Ok::<_, CliError>(engine.subtree(pairs[k].0, pairs[k].1)))?;
    let d = engine.assemble(parts.into_iter().flatten());
    d.check_invariants()?;
    let hp = history_probabilities(&d);
    write_decoherence(&ctx.out.path(".csv"), &d)?;
    let rows: Vec<(usize, String, f64)> =
        (0..d.history_count()).map(|a| (a, history_label(&grid, &d.outcomes(a)), hp.probabilities[a])).collect();
    write_rows(&ctx.out.path(".probabilities.csv"), &["alpha", "history", "probability"], rows)?;
    let period = c.params().period();
    ctx.record("grid", grid_json(&grid));
    ctx.record("times", (0..c.n_times).map(|k| k as f64 * period).collect::<Vec<_>>());
    ctx.record("histories", d.history_count());
    ctx.record("total_probability", d.total_probability());
    ctx.record("hermiticity_error", d.matrix.hermiticity_error());
    ctx.record("epsilon", hp.epsilon);
    ctx.record("probability_floor", hp.floor);
    if let Some((a, b)) = hp.worst_pair {
        ctx.record("worst_pair", vec![history_label(&grid, &d.outcomes(a)), history_label(&grid, &d.outcomes(b))]);
    }
    Ok(())
}
