use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::cells::{CellGrid, CellIndex};
use crate::classical::DuffingParams;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64};
use crate::qsd::{DensityOperator, StrobeMap, UnravelingSpec};

/// Default cap on the number of decoherence-matrix entries.
pub const DEFAULT_HISTORY_BUDGET: u64 = 10_000;

/// Probabilities below this are left out of the decoherence quality `eps`.
pub const DEFAULT_PROBABILITY_FLOOR: f64 = 1e-6;

/// A sequence of outcomes at strobe times `t_k = 2 pi k / w0`, `k = 0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistorySpec {
    pub cells: Vec<CellIndex>,
}

impl HistorySpec {
    pub fn n_times(&self) -> usize {
        self.cells.len()
    }

    pub fn times(&self, params: &DuffingParams) -> Vec<f64> {
        (0..self.cells.len()).map(|k| k as f64 * params.period()).collect()
    }
}

/// Decoherence functional `D[a, a']` over every history of a fixed length.
///
/// History index `a` enumerates outcome sequences with the first time most
/// significant, base `n_outcomes`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceMatrix {
    pub matrix: ComplexMatrix,
    pub n_times: usize,
    pub n_outcomes: usize,
}

impl DecoherenceMatrix {
    pub fn history_count(&self) -> usize {
        self.matrix.rows()
    }

    /// Outcome indices of history `a`, earliest first.
    pub fn outcomes(&self, mut a: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_times];
        for k in (0..self.n_times).rev() {
            out[k] = a % self.n_outcomes;
            a /= self.n_outcomes;
        }
        out
    }

    pub fn history_index(&self, outcomes: &[usize]) -> usize {
        outcomes.iter().fold(0, |acc, &o| acc * self.n_outcomes + o)
    }

    pub fn history(&self, a: usize, grid: &CellGrid) -> HistorySpec {
        HistorySpec { cells: self.outcomes(a).into_iter().map(|o| grid.outcome(o)).collect() }
    }

    /// `sum_a D[a, a]`, equal to `Tr rho0` when the histories are exhaustive.
    pub fn total_probability(&self) -> f64 {
        (0..self.history_count()).map(|a| self.matrix[(a, a)].re).sum()
    }

    /// Hermiticity to `1e-10`, diagonal real and `>= -1e-10`, total
    /// probability `1 +- 1e-8`.
    pub fn check_invariants(&self) -> Result<()> {
        let herm = self.matrix.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::overflow(alloc::format!("decoherence matrix not Hermitian: {herm:.3e}")));
        }
        for a in 0..self.history_count() {
            let d = self.matrix[(a, a)];
            if d.re < -1e-10 || d.im.abs() > 1e-10 {
                return Err(Error::overflow(alloc::format!("history {a} has probability {d}")));
            }
        }
        let total = self.total_probability();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::overflow(alloc::format!("history probabilities sum to {total}")));
        }
        Ok(())
    }
}

/// Builds decoherence-matrix entries. The work splits into independent
/// subtrees keyed by the outcome pair at the first time, see
/// [`HistoryEngine::first_pairs`].
#[derive(Debug, Clone)]
pub struct HistoryEngine<'a> {
    rho0: &'a DensityOperator,
    grid: &'a CellGrid,
    map: StrobeMap,
    n_times: usize,
}

impl<'a> HistoryEngine<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rho0: &'a DensityOperator,
        grid: &'a CellGrid,
        n_times: usize,
        params: &DuffingParams,
        spec: &UnravelingSpec,
        dt: f64,
        budget: u64,
    ) -> Result<Self> {
        if n_times == 0 {
            return Err(Error::invalid("n_times must be >= 1"));
        }
        if rho0.basis != *grid.basis() {
            return Err(Error::invalid("density operator and cell grid use different bases"));
        }
        let required = (grid.n_outcomes() as u64)
            .checked_pow(2 * n_times as u32)
            .ok_or(Error::HistoryBudget { required: u64::MAX, budget })?;
        if required > budget {
            return Err(Error::HistoryBudget { required, budget });
        }
        let map = StrobeMap::new(params, spec, grid.basis(), dt)?;
        Ok(Self { rho0, grid, map, n_times })
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn history_count(&self) -> usize {
        self.grid.n_outcomes().pow(self.n_times as u32)
    }

    /// First-time outcome pairs `(i, j)` with `i <= j`; the rest of the
    /// matrix follows from `D[a', a] = conj(D[a, a'])`.
    pub fn first_pairs(&self) -> Vec<(usize, usize)> {
        let m = self.grid.n_outcomes();
        (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect()
    }

    /// Entries `(a, a', D[a, a'])` of the subtree whose histories start with
    /// outcomes `(i, j)`. When `i == j` only `a <= a'` is produced.
    pub fn subtree(&self, i: usize, j: usize) -> Vec<(usize, usize, C64)> {
        let g = self.grid;
        let y = g.sandwich(g.outcome(i), &self.rho0.matrix, g.outcome(j));
        let mut out = Vec::new();
        self.descend(1, y, i, j, i == j, &mut out);
        out
    }

    fn descend(&self, level: usize, y: ComplexMatrix, a: usize, b: usize, tied: bool, out: &mut Vec<(usize, usize, C64)>) {
        if level == self.n_times {
            out.push((a, b, y.trace().expect("square")));
            return;
        }
        let g = self.grid;
        let m = g.n_outcomes();
        let z = self.map.apply_operator(&y);
        for i in 0..m {
            for j in (if tied { i } else { 0 })..m {
                let next = g.sandwich(g.outcome(i), &z, g.outcome(j));
                self.descend(level + 1, next, a * m + i, b * m + j, tied && i == j, out);
            }
        }
    }

    /// Fills the full matrix from subtree entries, mirroring by conjugation.
    pub fn assemble(&self, entries: impl IntoIterator<Item = (usize, usize, C64)>) -> DecoherenceMatrix {
        let h = self.history_count();
        let mut matrix = ComplexMatrix::zeros(h, h);
        for (a, b, d) in entries {
            matrix[(a, b)] = d;
            matrix[(b, a)] = d.conj();
        }
        for a in 0..h {
            let d = matrix[(a, a)];
            matrix[(a, a)] = C64::new(d.re, 0.0);
        }
        DecoherenceMatrix { matrix, n_times: self.n_times, n_outcomes: self.grid.n_outcomes() }
    }

    pub fn run(&self) -> DecoherenceMatrix {
        let entries: Vec<_> = self.first_pairs().into_iter().flat_map(|(i, j)| self.subtree(i, j)).collect();
        self.assemble(entries)
    }

    /// Diagonal `p_a = D[a, a]` only, at a fraction of the cost of [`run`].
    ///
    /// [`run`]: HistoryEngine::run
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.grid.n_outcomes()).flat_map(|i| self.branch_probabilities(i)).collect()
    }

    /// Probabilities of the histories whose first outcome is `i`, in history
    /// order.
    pub fn branch_probabilities(&self, i: usize) -> Vec<f64> {
        let g = self.grid;
        let m = g.n_outcomes();
        let c = g.outcome(i);
        let mut out = vec![0.0; m.pow(self.n_times as u32 - 1)];
        let mut stack = vec![(1, 0usize, g.sandwich(c, &self.rho0.matrix, c))];
        while let Some((level, a, y)) = stack.pop() {
            if level == self.n_times {
                out[a] = y.trace().expect("square").re;
                continue;
            }
            let z = self.map.apply_operator(&y);
            for j in 0..m {
                let c = g.outcome(j);
                if level + 1 == self.n_times {
                    out[a * m + j] = g.probability(c, &z);
                } else {
                    stack.push((level + 1, a * m + j, g.sandwich(c, &z, c)));
                }
            }
        }
        out
    }
}

/// `D[a, a'] = Tr[ B_{a_n} T( ... T(B_{a_1} rho0 B_{a'_1}) ... ) B_{a'_n} ]`
/// with branch operators `B = sqrt(E)` and `T` the one-period map.
#[allow(clippy::too_many_arguments)]
pub fn decoherence_functional(
    rho0: &DensityOperator,
    grid: &CellGrid,
    n_times: usize,
    params: &DuffingParams,
    spec: &UnravelingSpec,
    dt: f64,
    budget: u64,
) -> Result<DecoherenceMatrix> {
    Ok(HistoryEngine::new(rho0, grid, n_times, params, spec, dt, budget)?.run())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryProbabilities {
    pub probabilities: Vec<f64>,
    /// `max |D[a, a']| / sqrt(p_a p_a')` over distinct histories with both
    /// probabilities at or above `floor`.
    pub epsilon: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub floor: f64,
    pub n_times: usize,
    pub n_outcomes: usize,
}

impl HistoryProbabilities {
    /// Probabilities without off-diagonal information; `epsilon` is NaN.
    pub fn from_diagonal(probabilities: Vec<f64>, n_times: usize, n_outcomes: usize) -> Self {
        Self { probabilities, epsilon: f64::NAN, worst_pair: None, floor: 0.0, n_times, n_outcomes }
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Most probable history.
    pub fn argmax(&self) -> usize {
        (0..self.probabilities.len()).max_by(|a, b| self.probabilities[*a].total_cmp(&self.probabilities[*b])).unwrap_or(0)
    }
}

pub fn history_probabilities(d: &DecoherenceMatrix) -> HistoryProbabilities {
    history_probabilities_with_floor(d, DEFAULT_PROBABILITY_FLOOR)
}

pub fn history_probabilities_with_floor(d: &DecoherenceMatrix, floor: f64) -> HistoryProbabilities {
    let h = d.history_count();
    let probabilities: Vec<f64> = (0..h).map(|a| d.matrix[(a, a)].re).collect();
    let mut epsilon = 0.0;
    let mut worst_pair = None;
    for a in 0..h {
        if probabilities[a] < floor {
            continue;
        }
        for b in (a + 1)..h {
            if probabilities[b] < floor {
                continue;
            }
            let r = d.matrix[(a, b)].norm() / (probabilities[a] * probabilities[b]).sqrt();
            if r > epsilon {
                epsilon = r;
                worst_pair = Some((a, b));
            }
        }
    }
    HistoryProbabilities { probabilities, epsilon, worst_pair, floor, n_times: d.n_times, n_outcomes: d.n_outcomes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histories::{CellLattice, CellWeight};
    use crate::oscillator::{coherent_state, BasisSpec};

    fn setup(n: usize, hbar: f64) -> (BasisSpec, CellGrid) {
        let b = BasisSpec::new(n, hbar).unwrap();
        let lat = CellLattice::centered(0.0, 0.0, 3, 2, 0.8);
        (b, CellGrid::new(&b, lat, CellWeight::Auto).unwrap())
    }

    #[test]
    fn single_time_reduces_to_effect_probabilities() {
        let (b, g) = setup(24, 0.1);
        let (q, p) = g.lattice().center(2);
        let rho = DensityOperator::from_state(&coherent_state(&b, q, p).unwrap()).unwrap();
        let params = DuffingParams { hbar: 0.1, ..DuffingParams::default() };
        let spec = UnravelingSpec::zero_temperature(0.125, 0.1);
        let d = decoherence_functional(&rho, &g, 1, &params, &spec, 0.02, DEFAULT_HISTORY_BUDGET).unwrap();
        d.check_invariants().unwrap();
        let hp = history_probabilities(&d);
        for k in 0..g.n_outcomes() {
            assert!((hp.probabilities[k] - g.probability(g.outcome(k), &rho.matrix)).abs() < 1e-14);
        }
        assert_eq!(hp.argmax(), 2);
    }

    #[test]
    fn two_times_are_hermitian_and_exhaustive() {
        let (b, g) = setup(24, 0.1);
        let rho = DensityOperator::from_state(&coherent_state(&b, 0.3, 0.1).unwrap()).unwrap();
        let params = DuffingParams { hbar: 0.1, ..DuffingParams::default() };
        let spec = UnravelingSpec::finite_temperature(0.125, 0.2, 0.1);
        let engine = HistoryEngine::new(&rho, &g, 2, &params, &spec, 0.02, DEFAULT_HISTORY_BUDGET).unwrap();
        let d = engine.run();
        d.check_invariants().unwrap();
        let diag = engine.probabilities();
        for (a, p) in diag.iter().enumerate() {
            assert!((p - d.matrix[(a, a)].re).abs() < 1e-12);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let (b, g) = setup(24, 0.1);
        let rho = DensityOperator::from_state(&coherent_state(&b, 0.0, 0.0).unwrap()).unwrap();
        let params = DuffingParams { hbar: 0.1, ..DuffingParams::default() };
        let spec = UnravelingSpec::zero_temperature(0.125, 0.1);
        match HistoryEngine::new(&rho, &g, 3, &params, &spec, 0.02, DEFAULT_HISTORY_BUDGET) {
            Err(Error::HistoryBudget { required, budget }) => {
                assert_eq!(required, 7u64.pow(6));
                assert_eq!(budget, DEFAULT_HISTORY_BUDGET);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_matrix_has_zero_epsilon() {
        let matrix = ComplexMatrix::from_diagonal(&[C64::new(0.25, 0.0), C64::new(0.75, 0.0)]);
        let d = DecoherenceMatrix { matrix, n_times: 1, n_outcomes: 2 };
        let hp = history_probabilities(&d);
        assert_eq!(hp.probabilities, vec![0.25, 0.75]);
        assert_eq!(hp.epsilon, 0.0);
        assert_eq!(hp.worst_pair, None);
    }

    #[test]
    fn history_indices_round_trip() {
        let d = DecoherenceMatrix { matrix: ComplexMatrix::zeros(27, 27), n_times: 3, n_outcomes: 3 };
        for a in 0..27 {
            assert_eq!(d.history_index(&d.outcomes(a)), a);
        }
        assert_eq!(d.outcomes(5), vec![0, 1, 2]);
    }
}
