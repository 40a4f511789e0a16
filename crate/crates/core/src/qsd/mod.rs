//! Open-system dynamics: the Lindblad master equation, the one-period
//! quantum map built from it, and the quantum-state-diffusion unraveling
//! used for single trajectories.

mod density;
mod master;
mod stochastic;
mod unravel;

pub use density::{DensityAccumulator, DensityOperator, POSITIVITY_FLOOR};
pub use master::{master_step, strobe_map, MasterEquation, StrobeMap};
pub use stochastic::{
    qsd_section, qsd_section_with, qsd_step, recenter, DuffingTrajectory, QsdEquation, SectionOptions, StepReport,
    DEFAULT_TRUNCATION_TOLERANCE,
};
pub use unravel::{Friction, UnravelingMode, UnravelingSpec};
