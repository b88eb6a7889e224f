//! Simulation of discrete-time quantum walks on the two-dimensional square
//! lattice, with a focus on the non-repeating coin family (zero diagonal,
//! amplitude never moves in the same direction twice in a row) and the
//! non-reversal family (zero anti-diagonal, amplitude never steps back onto
//! the site it just left).
//!
//! The crate is organized around the pipeline used by the experiment CLI:
//!
//! - [`coins`] builds the coin operators: the Hadamard⊗Hadamard, Grover and
//!   DFT coins, and the eight-parameter non-repeating / non-reversal
//!   families together with their derived invariants (m₁, m₂, m₃).
//! - [`lattice`] holds the four-channel wave field and applies the
//!   coin-then-shift step exactly, on a dense square array sized from a step
//!   budget.
//! - [`analysis`] computes radial statistics, joint position moments
//!   ⟨XᵏYˡ⟩ and support checks from probability fields.
//! - [`momentum`] carries the Fourier-space machinery: the momentum-space
//!   step operator, closed-form characteristic quartics for both coin
//!   families, the eigenphase ω(k) with its analytic gradient, and the
//!   Brillouin-zone quadrature for asymptotic even moments.
//! - [`classical`] provides the classical baselines: Monte Carlo
//!   non-reversal walk statistics and exact backtracking enumeration of
//!   non-reversal and self-avoiding walks.
//! - [`harness`] is the seeded experiment driver emitting deterministic CSV
//!   tables, PGM heatmaps and run manifests.

pub mod analysis;
pub mod classical;
pub mod coins;
pub mod harness;
pub mod lattice;
pub mod linalg;
pub mod momentum;

mod error;

pub use error::Error;

pub use analysis::{MomentMethod, MomentReport};
pub use coins::{CoinFamily, CoinMatrix, DerivedInvariants, NonRepeatingParams, StandardCoin};
pub use lattice::{CoinChannel, InitialCoinState, ProbabilityField, WalkerState};
pub use momentum::MomentumPoint;
