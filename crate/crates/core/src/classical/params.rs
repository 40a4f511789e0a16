use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::error::{Error, Result};

/// Physical parameters of the forced, damped Duffing oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuffingParams {
    pub mass: f64,
    /// Damping rate `Gamma` (the friction force is `-2 Gamma p`).
    pub damping: f64,
    /// Drive amplitude `q` (acceleration units).
    pub drive_amplitude: f64,
    /// Drive angular frequency `w0`.
    pub drive_frequency: f64,
    /// Reservoir temperature `kT` in energy units.
    pub temperature: f64,
    /// Action scale. Classical dynamics only sees it through the noise
    /// strength, which is in fact independent of it.
    pub hbar: f64,
}

impl Default for DuffingParams {
    /// The chaotic regime `q = 0.3`, `Gamma = 0.125`, `w0 = 1`, noiseless.
    fn default() -> Self {
        Self {
            mass: 1.0,
            damping: 0.125,
            drive_amplitude: 0.3,
            drive_frequency: 1.0,
            temperature: 0.0,
            hbar: 0.05,
        }
    }
}

impl DuffingParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.mass, self.damping, self.drive_amplitude, self.drive_frequency, self.temperature, self.hbar]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("Duffing parameters must be finite"));
        }
        if !(self.mass > 0.0) {
            return Err(Error::invalid(alloc::format!("mass must be > 0, got {}", self.mass)));
        }
        if self.damping < 0.0 {
            return Err(Error::invalid(alloc::format!("damping must be >= 0, got {}", self.damping)));
        }
        if !(self.drive_frequency > 0.0) {
            return Err(Error::invalid(alloc::format!(
                "drive frequency must be > 0, got {}",
                self.drive_frequency
            )));
        }
        if self.temperature < 0.0 {
            return Err(Error::invalid(alloc::format!("temperature must be >= 0, got {}", self.temperature)));
        }
        if !(self.hbar > 0.0) {
            return Err(Error::invalid(alloc::format!("hbar must be > 0, got {}", self.hbar)));
        }
        Ok(())
    }

    /// `hbar K = 4 M Gamma kT`, the white-noise intensity of `F(t)`.
    pub fn noise_strength(&self) -> f64 {
        4.0 * self.mass * self.damping * self.temperature
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.drive_frequency
    }

    pub fn potential(x: f64) -> f64 {
        let x2 = x * x;
        0.25 * x2 * x2 - 0.5 * x2
    }

    /// `dU/dx = x^3 - x`.
    #[inline]
    pub fn force_gradient(x: f64) -> f64 {
        x * x * x - x
    }

    /// `d^2U/dx^2 = 3x^2 - 1`.
    #[inline]
    pub fn curvature(x: f64) -> f64 {
        3.0 * x * x - 1.0
    }

    pub fn energy(&self, x: f64, p: f64) -> f64 {
        0.5 * p * p / self.mass + Self::potential(x)
    }

    /// Deterministic vector field `(dx/dt, dp/dt)`.
    #[inline]
    pub fn vector_field(&self, t: f64, y: &[f64; 2]) -> [f64; 2] {
        [
            y[1] / self.mass,
            -Self::force_gradient(y[0]) - 2.0 * self.damping * y[1]
                + self.mass * self.drive_amplitude * (self.drive_frequency * t).cos(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
    pub t: f64,
}

impl PhasePoint {
    pub fn new(x: f64, p: f64, t: f64) -> Self {
        Self { x, p, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.p.is_finite() && self.t.is_finite()
    }
}

/// Strobe samples `(x_i, p_i)` at `t_i = t_0 + 2 pi i / w0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionCloud {
    pub points: Vec<PhasePoint>,
    pub params: DuffingParams,
    /// Drive periods discarded before the first sample.
    pub transient_skip: usize,
}

impl SectionCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&PhasePoint> {
        self.points.last()
    }

    /// `(min x, max x, min p, max p)` over the cloud.
    pub fn extent(&self) -> Option<(f64, f64, f64, f64)> {
        let first = self.points.first()?;
        Some(self.points.iter().fold((first.x, first.x, first.p, first.p), |(a, b, c, d), q| {
            (a.min(q.x), b.max(q.x), c.min(q.p), d.max(q.p))
        }))
    }
}
