//! Classical forced, damped Duffing dynamics.
//!
//! Equation of motion, with `p = M dx/dt`:
//!
//! ```text
//! dx/dt = p / M
//! dp/dt = -(x^3 - x) - 2 Gamma p + M q cos(w0 t) + F(t)
//! <F(t) F(s)> = 4 M Gamma kT delta(t - s)
//! ```
//!
//! The restoring force is `dU/dx` of the double well `U(x) = x^4/4 - x^2/2`.

mod flow;
mod histogram;
mod lyapunov;
mod params;

pub use flow::{duffing_flow, langevin_section, poincare_section, StrobeClock};
pub use histogram::{measure_map_histogram, Histogram2d};
pub use lyapunov::{lyapunov_max, LyapunovEstimate};
pub use params::{DuffingParams, PhasePoint, SectionCloud};
