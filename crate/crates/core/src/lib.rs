//! Classical and quantum dissipative chaos in the forced, damped Duffing
//! oscillator.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! threads or the command line lives in the `duffing-qsd` companion crate.
//!
//! Layers, bottom up:
//!
//! * [`numerics`]: dense complex matrices, a Hermitian eigensolver,
//!   counter-based random streams and an RK4 stepper.
//! * [`classical`]: deterministic and Langevin Duffing flow, Poincaré
//!   sections, Lyapunov exponents and invariant-measure histograms.
//! * [`oscillator`]: truncated harmonic-oscillator basis, ladder operators,
//!   the driven Duffing Hamiltonian, coherent states and displacements.
//! * [`qsd`]: Lindblad master equation, the stroboscopic quantum map and its
//!   quantum-state-diffusion unraveling with a moving basis.
//! * [`phase_space`]: Wigner transforms and histogram overlaps.
//! * [`histories`]: coherent-state phase-space cells and the decoherence
//!   functional over stroboscopic histories.
#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]
// Float methods come from num-traits (libm) on older toolchains; newer ones
// provide them inherently in core, which makes the import look unused.
#![allow(unused_imports)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod classical;
pub mod error;
pub mod grid;
pub mod histories;
pub mod numerics;
pub mod oscillator;
pub mod phase_space;
pub mod qsd;

pub use error::{Error, Result};
pub use numerics::C64;
