//! Flat JSON run configuration.
//!
//! Every key has a default, so `{}` is a valid config describing the
//! standard chaotic regime `q = 0.3, Gamma = 0.125, w0 = 1, M = 1`.

use std::path::Path;

use duffing_core::classical::{DuffingParams, PhasePoint};
use duffing_core::grid::Grid2d;
use duffing_core::histories::{CellLattice, CellWeight};
use duffing_core::oscillator::BasisSpec;
use duffing_core::qsd::{Friction, SectionOptions, UnravelingMode, UnravelingSpec};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// Coherent state at `(start_x, start_p)`.
    Coherent,
    /// Even superposition of coherent states at `(+-start_x, +-start_p)`.
    Cat,
    /// Fock state `fock_n`.
    Fock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unraveling {
    ZeroTemperature,
    FiniteTemperature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrictionMode {
    Momentum,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompareMode {
    /// Bhattacharyya overlap of two phase-space histograms.
    Overlap,
    /// Quantum history probabilities against classical path frequencies.
    Histories,
}

/// Resolved configuration. Units: time in drive-independent units, `x` in
/// length, `p` in momentum, `temperature` in energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub name: Option<String>,
    pub seed: u64,

    /// Oscillator mass `M`.
    pub mass: f64,
    /// Damping rate `Gamma` (1/time); the classical friction force is `-2 Gamma p`.
    pub damping: f64,
    /// Drive amplitude `q` (acceleration).
    pub drive_amplitude: f64,
    /// Drive angular frequency `w0` (rad/time).
    pub drive_frequency: f64,
    /// Reservoir temperature `kT` (energy).
    pub temperature: f64,
    /// Action scale (quantum runs and the decoherence time).
    pub hbar: f64,

    /// Fock truncation `N`.
    pub dim: usize,
    /// Integration step (time); snapped down to divide the drive period.
    pub dt: f64,
    /// Strobe points or map iterations recorded.
    pub n_points: usize,
    /// Drive periods discarded first.
    pub skip: usize,
    /// Independent trajectories or samples.
    pub ensemble: usize,

    pub start_x: f64,
    pub start_p: f64,
    pub initial_state: InitialState,
    pub fock_n: usize,

    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
    /// Gaussian smoothing width (phase-space units, both axes) for histogram
    /// comparisons; `null` means `sqrt(hbar / 2)`.
    pub smoothing: Option<f64>,

    /// Unraveling; `null` picks finite temperature when `temperature > 0`.
    pub unraveling: Option<Unraveling>,
    pub friction: FrictionMode,
    /// Moving-frame recentering threshold (fraction of `sqrt(N)`), `null`
    /// for a fixed frame.
    pub recenter_threshold: Option<f64>,
    /// Largest tolerated weight in the top two Fock levels.
    pub truncation_tolerance: f64,
    /// Write the ensemble-averaged density operator as well.
    pub dump_density: bool,

    /// Lyapunov run length (time).
    pub lyapunov_duration: f64,
    /// Tangent-vector renormalization interval (time).
    pub renorm_interval: f64,

    pub cells_q: usize,
    pub cells_p: usize,
    pub cell_center_x: f64,
    pub cell_center_p: f64,
    /// Cell spacing (both axes); `null` means `3 sqrt(hbar)`.
    pub cell_spacing: Option<f64>,
    /// Common cell weight; `null` picks the largest weight keeping the
    /// remainder effect positive, capped at `dq dp / (2 pi hbar)`.
    pub cell_weight: Option<f64>,
    pub n_times: usize,
    pub history_budget: u64,

    pub compare_mode: CompareMode,
    /// Existing section or Wigner CSV files to compare; generated when `null`.
    pub compare_a: Option<String>,
    pub compare_b: Option<String>,
}

impl Default for SimConfig {
    fn default() -> Self {
        let p = DuffingParams::default();
        Self {
            name: None,
            seed: 1,
            mass: p.mass,
            damping: p.damping,
            drive_amplitude: p.drive_amplitude,
            drive_frequency: p.drive_frequency,
            temperature: 0.0,
            hbar: 0.05,
            dim: 32,
            dt: std::f64::consts::PI / 1000.0,
            n_points: 1000,
            skip: 200,
            ensemble: 1,
            start_x: 0.5,
            start_p: 0.0,
            initial_state: InitialState::Coherent,
            fock_n: 0,
            x_min: -2.0,
            x_max: 2.0,
            p_min: -1.5,
            p_max: 1.5,
            nx: 128,
            np: 128,
            smoothing: None,
            unraveling: None,
            friction: FrictionMode::Momentum,
            recenter_threshold: Some(0.1),
            truncation_tolerance: duffing_core::qsd::DEFAULT_TRUNCATION_TOLERANCE,
            dump_density: false,
            lyapunov_duration: 2000.0,
            renorm_interval: 1.0,
            cells_q: 3,
            cells_p: 3,
            cell_center_x: 0.0,
            cell_center_p: 0.0,
            cell_spacing: None,
            cell_weight: None,
            n_times: 2,
            history_budget: duffing_core::histories::DEFAULT_HISTORY_BUDGET,
            compare_mode: CompareMode::Overlap,
            compare_a: None,
            compare_b: None,
        }
    }
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::config(format!("{field}: {msg}"))
}

impl SimConfig {
    /// Reads a config file, or the `config` object of a `.meta.json`, then
    /// applies `key=value` overrides. Values are parsed as JSON when
    /// possible and taken as strings otherwise.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut map = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?;
                let value: Value = serde_json::from_str(&text)
                    .map_err(|e| CliError::config(format!("{}: invalid JSON: {e}", p.display())))?;
                match value {
                    Value::Object(mut m) => match m.remove("config") {
                        Some(Value::Object(inner)) if m.contains_key("subcommand") => inner,
                        Some(other) => {
                            m.insert("config".into(), other);
                            m
                        }
                        None => m,
                    },
                    _ => return Err(CliError::config(format!("{}: top level must be an object", p.display()))),
                }
            }
            None => Map::new(),
        };
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("override '{item}' is not key=value")))?;
            let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            map.insert(key.trim().to_string(), value);
        }
        let config: SimConfig = serde_json::from_value(Value::Object(map)).map_err(|e| CliError::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params().validate().map_err(|e| CliError::config(e.to_string()))?;
        let positive = [("dt", self.dt), ("lyapunov_duration", self.lyapunov_duration), ("renorm_interval", self.renorm_interval)];
        for (field, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(field_error(field, format!("must be > 0, got {v}")));
            }
        }
        if self.dim < 2 {
            return Err(field_error("dim", "Fock truncation must be at least 2"));
        }
        for (field, v) in [("n_points", self.n_points), ("ensemble", self.ensemble), ("n_times", self.n_times)] {
            if v == 0 {
                return Err(field_error(field, "must be >= 1"));
            }
        }
        if self.fock_n >= self.dim {
            return Err(field_error("fock_n", format!("must be below dim = {}", self.dim)));
        }
        self.grid().map_err(|e| field_error("x_min/x_max/p_min/p_max/nx/np", e))?;
        if let Some(s) = self.smoothing {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(field_error("smoothing", format!("must be >= 0, got {s}")));
            }
        }
        if let Some(r) = self.recenter_threshold {
            if !(r > 0.0 && r < 1.0) {
                return Err(field_error("recenter_threshold", format!("must lie in (0, 1), got {r}")));
            }
        }
        if !(self.truncation_tolerance > 0.0 && self.truncation_tolerance < 1.0) {
            return Err(field_error("truncation_tolerance", "must lie in (0, 1)"));
        }
        if self.unraveling == Some(Unraveling::ZeroTemperature) && self.temperature > 0.0 {
            return Err(field_error("unraveling", "zero-temperature unraveling with temperature > 0"));
        }
        if self.cells_q == 0 || self.cells_p == 0 {
            return Err(field_error("cells_q/cells_p", "need at least one cell per axis"));
        }
        if let Some(s) = self.cell_spacing {
            if !(s > 0.0 && s.is_finite()) {
                return Err(field_error("cell_spacing", format!("must be > 0, got {s}")));
            }
        }
        if let Some(c) = self.cell_weight {
            if !(c > 0.0 && c.is_finite()) {
                return Err(field_error("cell_weight", format!("must be > 0, got {c}")));
            }
        }
        Ok(())
    }

    pub fn name_or<'a>(&'a self, fallback: &'a str) -> &'a str {
        self.name.as_deref().unwrap_or(fallback)
    }

    pub fn params(&self) -> DuffingParams {
        DuffingParams {
            mass: self.mass,
            damping: self.damping,
            drive_amplitude: self.drive_amplitude,
            drive_frequency: self.drive_frequency,
            temperature: self.temperature,
            hbar: self.hbar,
        }
    }

    pub fn start(&self) -> PhasePoint {
        PhasePoint::new(self.start_x, self.start_p, 0.0)
    }

    pub fn grid(&self) -> duffing_core::Result<Grid2d> {
        Grid2d::new((self.x_min, self.x_max), (self.p_min, self.p_max), self.nx, self.np)
    }

    pub fn smoothing_width(&self) -> f64 {
        self.smoothing.unwrap_or_else(|| (self.hbar / 2.0).sqrt())
    }

    pub fn basis(&self) -> duffing_core::Result<BasisSpec> {
        let mut b = BasisSpec::new(self.dim, self.hbar)?;
        b.mass = self.mass;
        b.validate()?;
        Ok(b)
    }

    pub fn unraveling_mode(&self) -> UnravelingMode {
        match self.unraveling {
            Some(Unraveling::ZeroTemperature) => UnravelingMode::ZeroTemperature,
            Some(Unraveling::FiniteTemperature) => UnravelingMode::FiniteTemperature,
            None if self.temperature > 0.0 => UnravelingMode::FiniteTemperature,
            None => UnravelingMode::ZeroTemperature,
        }
    }

    pub fn spec(&self) -> UnravelingSpec {
        let friction = match self.friction {
            FrictionMode::Momentum => Friction::Momentum,
            FrictionMode::Symmetric => Friction::Symmetric,
        };
        UnravelingSpec::from_params(&self.params(), self.unraveling_mode()).with_friction(friction)
    }

    pub fn section_options(&self) -> SectionOptions {
        SectionOptions { recenter_threshold: self.recenter_threshold, truncation_tolerance: self.truncation_tolerance }
    }

    pub fn lattice(&self) -> CellLattice {
        let spacing = self.cell_spacing.unwrap_or_else(|| CellLattice::default_spacing(self.hbar));
        CellLattice::centered(self.cell_center_x, self.cell_center_p, self.cells_q, self.cells_p, spacing)
    }

    pub fn cell_weight(&self) -> CellWeight {
        self.cell_weight.map_or(CellWeight::Auto, CellWeight::Fixed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_standard_regime() {
        let c = SimConfig::load(None, &[]).unwrap();
        assert_eq!(c.drive_amplitude, 0.3);
        assert_eq!(c.damping, 0.125);
        assert_eq!(c.drive_frequency, 1.0);
        assert_eq!(c.mass, 1.0);
    }

    #[test]
    fn overrides_parse_json_or_strings() {
        let c = SimConfig::load(None, &["hbar=0.1".into(), "name=run-a".into(), "smoothing=null".into()]).unwrap();
        assert_eq!(c.hbar, 0.1);
        assert_eq!(c.name.as_deref(), Some("run-a"));
        assert_eq!(c.smoothing, None);
    }

    #[test]
    fn unknown_and_invalid_fields_are_reported() {
        let e = SimConfig::load(None, &["hbarr=0.1".into()]).unwrap_err();
        assert!(e.to_string().contains("hbarr"));
        let e = SimConfig::load(None, &["dt=-1".into()]).unwrap_err();
        assert!(e.to_string().starts_with("dt:"), "{e}");
        let e = SimConfig::load(None, &["damping=-1".into()]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
