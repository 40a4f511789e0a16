use super::PhasePoint;
use crate::error::{Error, Result};
use crate::grid::{Field2d, Grid2d};

/// Normalized occupancy histogram of a section: the empirical invariant
/// measure. In-grid weights plus `overflow_weight` sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram2d {
    pub field: Field2d,
    pub overflow_weight: f64,
    pub overflow_count: usize,
    pub total_count: usize,
}

impl Histogram2d {
    pub fn grid(&self) -> &Grid2d {
        &self.field.grid
    }

    pub fn total(&self) -> f64 {
        self.field.sum() + self.overflow_weight
    }

    /// Fraction of grid cells with nonzero weight.
    pub fn support_fraction(&self) -> f64 {
        self.field.occupied() as f64 / self.field.grid.len() as f64
    }
}

pub fn measure_map_histogram(points: &[PhasePoint], grid: Grid2d) -> Result<Histogram2d> {
    grid.validate()?;
    if points.is_empty() {
        return Err(Error::invalid("histogram of an empty cloud"));
    }
    let mut field = Field2d::zeros(grid);
    let mut overflow = 0usize;
    for pt in points {
        match grid.bin(pt.x, pt.p) {
            Some((i, j)) => field.values[grid.flat(i, j)] += 1.0,
            None => overflow += 1,
        }
    }
    let n = points.len() as f64;
    field.values.iter_mut().for_each(|w| *w /= n);
    Ok(Histogram2d {
        field,
        overflow_weight: overflow as f64 / n,
        overflow_count: overflow,
        total_count: points.len(),
    })
}
