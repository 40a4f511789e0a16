//! Quantum kinematics in a truncated harmonic-oscillator basis.
//!
//! Ladder convention, with `s = sqrt(hbar / (M w_ref))`:
//!
//! ```text
//! x = sqrt(hbar / (2 M w_ref)) (a + a^dagger)
//! p = i sqrt(hbar M w_ref / 2) (a^dagger - a)
//! ```
//!
//! States may live in a displaced frame (moving basis): amplitudes are
//! coefficients of the displaced Fock states `D(q0, p0)|n>` and the frame
//! center `(q0, p0)` travels with the state.

mod basis;
mod coherent;
mod hamiltonian;
mod ops;

pub use basis::BasisSpec;
pub use coherent::{coherent_amplitudes, coherent_state, displacement, displacement_alpha, FrameCenter, QuantumState};
pub use hamiltonian::{duffing_hamiltonian, DrivenHamiltonian, DuffingOperators};
pub use ops::{creation, ladder, momentum_op, number_op, position_op};
