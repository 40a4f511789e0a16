use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::cells::CellGrid;
use super::functional::HistoryProbabilities;
use crate::classical::{langevin_section, DuffingParams, PhasePoint};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::oscillator::BasisSpec;

/// `hbar^2 / (2 M Gamma kT d^2)`: time for interference between phase-space
/// points `d` apart to be suppressed by the reservoir.
pub fn decoherence_time(params: &DuffingParams, d: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::invalid(alloc::format!("cell size must be > 0, got {d}")));
    }
    if !(params.temperature > 0.0) {
        return Err(Error::UndefinedDecoherenceTime("reservoir temperature is zero"));
    }
    if !(params.damping > 0.0) {
        return Err(Error::UndefinedDecoherenceTime("damping is zero"));
    }
    Ok(params.hbar * params.hbar / (2.0 * params.mass * params.damping * params.temperature * d * d))
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecoherenceWarning {
    Undefined(&'static str),
    /// Strobe spacing shorter than the decoherence time.
    SpacingTooShort { spacing: f64, decoherence_time: f64 },
}

/// Warning for histories at strobe spacing `2 pi / w0` with cells of size `d`.
pub fn strobe_spacing_warning(params: &DuffingParams, d: f64) -> Result<Option<DecoherenceWarning>> {
    match decoherence_time(params, d) {
        Ok(t) if params.period() < t => {
            Ok(Some(DecoherenceWarning::SpacingTooShort { spacing: params.period(), decoherence_time: t }))
        }
        Ok(_) => Ok(None),
        Err(Error::UndefinedDecoherenceTime(why)) => Ok(Some(DecoherenceWarning::Undefined(why))),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityComparison {
    /// Quantum probability of each history.
    pub quantum: Vec<f64>,
    /// Fraction of classical paths visiting the same cell sequence.
    pub classical: Vec<f64>,
    /// `(1/2) sum |quantum - classical|`, with the quantum side normalized.
    pub tv_distance: f64,
    pub samples: usize,
}

/// Compares history probabilities with the frequencies of classical paths,
/// each sampled at the same strobe times and binned into the same cells.
pub fn classical_probability_check(
    grid: &CellGrid,
    quantum: &HistoryProbabilities,
    paths: &[Vec<PhasePoint>],
) -> Result<ProbabilityComparison> {
    if paths.is_empty() {
        return Err(Error::invalid("classical ensemble is empty"));
    }
    if quantum.n_outcomes != grid.n_outcomes() {
        return Err(Error::invalid("history probabilities were built on a different cell grid"));
    }
    let m = grid.n_outcomes();
    let mut counts = vec![0usize; quantum.probabilities.len()];
    for path in paths {
        if path.len() != quantum.n_times {
            return Err(Error::invalid(alloc::format!(
                "classical path has {} samples, histories have {} times",
                path.len(),
                quantum.n_times
            )));
        }
        let a = path.iter().fold(0, |acc, pt| acc * m + grid.outcome_index(grid.locate(pt.x, pt.p)));
        counts[a] += 1;
    }
    let classical: Vec<f64> = counts.iter().map(|&c| c as f64 / paths.len() as f64).collect();
    let total: f64 = quantum.probabilities.iter().map(|p| p.max(0.0)).sum();
    let q: Vec<f64> = quantum.probabilities.iter().map(|p| p.max(0.0) / total).collect();
    let tv_distance = 0.5 * q.iter().zip(&classical).map(|(a, b)| (a - b).abs()).sum::<f64>();
    Ok(ProbabilityComparison { quantum: q, classical, tv_distance, samples: paths.len() })
}

/// Samples of the Wigner function of the coherent state at `(q, p)`.
pub fn coherent_samples(basis: &BasisSpec, q: f64, p: f64, count: usize, rng: &mut RngStream) -> Vec<PhasePoint> {
    let (sx, sp) = (basis.x_scale(), basis.p_scale());
    (0..count).map(|_| PhasePoint::new(q + sx * rng.gauss(), p + sp * rng.gauss(), 0.0)).collect()
}

/// Langevin paths sampled at `n_times` strobe times starting at each point.
/// Path `k` uses random stream `k` of `seed`.
pub fn classical_paths(
    params: &DuffingParams,
    starts: &[PhasePoint],
    n_times: usize,
    dt: f64,
    seed: u64,
) -> Result<Vec<Vec<PhasePoint>>> {
    if n_times == 0 {
        return Err(Error::invalid("n_times must be >= 1"));
    }
    starts
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let mut path = vec![s];
            if n_times > 1 {
                let mut rng = RngStream::new(seed, k as u64);
                path.extend(langevin_section(params, s, n_times - 1, 0, dt, &mut rng)?.points);
            }
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histories::{CellIndex, CellLattice, CellWeight};

    #[test]
    fn decoherence_time_formula_and_scaling() {
        let params = DuffingParams { hbar: 0.05, temperature: 0.5, ..DuffingParams::default() };
        let t = decoherence_time(&params, 0.2).unwrap();
        assert!((t - 0.5).abs() < 1e-12);
        assert_eq!(decoherence_time(&params, 0.4).unwrap(), t / 4.0);
        assert_eq!(strobe_spacing_warning(&params, 0.2).unwrap(), None);
    }

    #[test]
    fn zero_temperature_or_damping_is_undefined() {
        let cold = DuffingParams { temperature: 0.0, ..DuffingParams::default() };
        assert!(matches!(decoherence_time(&cold, 0.2), Err(Error::UndefinedDecoherenceTime(_))));
        let free = DuffingParams { damping: 0.0, temperature: 0.5, ..DuffingParams::default() };
        assert!(matches!(decoherence_time(&free, 0.2), Err(Error::UndefinedDecoherenceTime(_))));
        assert!(matches!(strobe_spacing_warning(&cold, 0.2).unwrap(), Some(DecoherenceWarning::Undefined(_))));
    }

    fn grid() -> CellGrid {
        let b = BasisSpec::new(16, 0.1).unwrap();
        CellGrid::new(&b, CellLattice::centered(0.0, 0.0, 2, 1, 0.9), CellWeight::Auto).unwrap()
    }

    fn probs(p: Vec<f64>) -> HistoryProbabilities {
        HistoryProbabilities { probabilities: p, epsilon: 0.0, worst_pair: None, floor: 0.0, n_times: 1, n_outcomes: 3 }
    }

    #[test]
    fn identical_distributions_have_zero_distance() {
        let g = grid();
        let left = g.lattice().center(0);
        let paths = vec![vec![PhasePoint::new(left.0, left.1, 0.0)], vec![PhasePoint::new(5.0, 0.0, 0.0)]];
        assert_eq!(g.locate(5.0, 0.0), CellIndex::Rest);
        let r = classical_probability_check(&g, &probs(vec![0.5, 0.0, 0.5]), &paths).unwrap();
        assert_eq!(r.tv_distance, 0.0);
        assert_eq!(r.samples, 2);
    }

    #[test]
    fn empty_ensemble_is_rejected() {
        let g = grid();
        assert!(matches!(classical_probability_check(&g, &probs(vec![1.0, 0.0, 0.0]), &[]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn paths_start_at_their_seeds() {
        let params = DuffingParams::default();
        let starts = [PhasePoint::new(0.5, 0.0, 0.0), PhasePoint::new(-0.5, 0.1, 0.0)];
        let paths = classical_paths(&params, &starts, 3, 0.01, 1).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths.iter().all(|p| p.len() == 3));
        assert_eq!(paths[1][0], starts[1]);
    }
}
