//! One-dimensional discrete-time quantum walks with general U(2) coins,
//! and numerical checks of their continuum limits.
//!
//! The walk acts on a periodic lattice of two-component spinors,
//! `Ψ(t+Δt) = S·C·Ψ(t)`, where the coin `C` mixes the left/right components
//! and the shift `S` moves `L` one site left and `R` one site right.
//! Limit experiments work per Fourier mode on the 2x2 generator
//! `i[(S̃C)ⁿ − I]/(nΔt)`.

pub mod bessel;
pub mod coin;
pub mod convergence;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod limits;
pub mod mat2;
pub mod propagators;
pub mod walk;

pub use coin::{CoinSeries, CoinZYZ, PauliAxis, Unitary2};
pub use convergence::{ConvergenceReport, Coupling, LimitSchedule, Verdict};
pub use error::{Error, Result};
pub use hamiltonian::KSpaceHamiltonian;
pub use lattice::{Grid, KSpaceField, Spinor, SpinorField};
pub use mat2::Mat2;
