use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::Field2d;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapReport {
    /// Bhattacharyya coefficient `sum sqrt(a_ij b_ij)` of the normalized inputs.
    pub coefficient: f64,
    /// Fraction of `|A|` mass removed by clipping negative entries.
    pub clipped_a: f64,
    pub clipped_b: f64,
}

fn clip_normalize(values: &[f64]) -> Result<(alloc::vec::Vec<f64>, f64)> {
    let positive: f64 = values.iter().filter(|v| **v > 0.0).sum();
    let negative = values.iter().filter(|v| **v < 0.0).fold(0.0, |s, v| s - v);
    if !(positive > 0.0) || !positive.is_finite() {
        return Err(Error::invalid("histogram has no positive mass"));
    }
    let out = values.iter().map(|v| v.max(0.0) / positive).collect();
    Ok((out, negative / (positive + negative)))
}

/// Bhattacharyya overlap of two histograms on the same grid. Negative bins
/// (Wigner functions) are clipped to zero before normalizing.
pub fn histogram_overlap(a: &Field2d, b: &Field2d) -> Result<OverlapReport> {
    if !a.same_shape(b) {
        return Err(Error::invalid("histograms have different shapes"));
    }
    let (na, clipped_a) = clip_normalize(&a.values)?;
    let (nb, clipped_b) = clip_normalize(&b.values)?;
    let coefficient = na.iter().zip(&nb).map(|(x, y)| (x * y).sqrt()).sum::<f64>().min(1.0);
    Ok(OverlapReport { coefficient, clipped_a, clipped_b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2d;
    use alloc::vec;

    fn field(values: alloc::vec::Vec<f64>) -> Field2d {
        let g = Grid2d::new((0.0, 1.0), (0.0, 1.0), 2, 2).unwrap();
        Field2d::new(g, values).unwrap()
    }

    #[test]
    fn identical_histograms_overlap_fully() {
        let a = field(vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(histogram_overlap(&a, &a).unwrap().coefficient, 1.0);
    }

    #[test]
    fn disjoint_histograms_do_not_overlap() {
        let a = field(vec![1.0, 1.0, 0.0, 0.0]);
        let b = field(vec![0.0, 0.0, 2.0, 5.0]);
        assert_eq!(histogram_overlap(&a, &b).unwrap().coefficient, 0.0);
    }

    #[test]
    fn two_bins_inside_four() {
        let a = field(vec![0.5, 0.5, 0.0, 0.0]);
        let b = field(vec![0.25; 4]);
        let r = histogram_overlap(&a, &b).unwrap();
        assert!((r.coefficient - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn negative_bins_are_clipped_and_reported() {
        let a = field(vec![1.0, -0.25, 0.25, 0.0]);
        let r = histogram_overlap(&a, &a).unwrap();
        assert!((r.clipped_a - 0.25 / 1.5).abs() < 1e-15);
        assert!((r.coefficient - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = field(vec![1.0; 4]);
        let g = Grid2d::new((0.0, 1.0), (0.0, 1.0), 4, 1).unwrap();
        let b = Field2d::new(g, vec![1.0; 4]).unwrap();
        assert!(matches!(histogram_overlap(&a, &b), Err(Error::InvalidArgument(_))));
    }
}
