//! Decoherent histories on a stroboscopic surface of section.
//!
//! At each strobe time the state is coarse-grained by coherent-state cells
//! `E_i = c |q_i, p_i><q_i, p_i|` plus a remainder `E_rest = 1 - sum E_i`.
//! Branch operators are `sqrt(E)` and the one-period map of the master
//! equation carries the branches from one time to the next.

mod cells;
mod check;
mod functional;

pub use cells::{CellGrid, CellIndex, CellLattice, CellWeight, REST_PSD_TOLERANCE};
pub use check::{
    classical_paths, classical_probability_check, coherent_samples, decoherence_time, strobe_spacing_warning,
    DecoherenceWarning, ProbabilityComparison,
};
pub use functional::{
    decoherence_functional, history_probabilities, history_probabilities_with_floor, DecoherenceMatrix,
    HistoryEngine, HistoryProbabilities, HistorySpec, DEFAULT_HISTORY_BUDGET, DEFAULT_PROBABILITY_FLOOR,
};
