//! Exact simulation and scalability analysis of boson samplers fed with
//! partially indistinguishable single photons.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices, permanents (Ryser and a factorial
//!   oracle), Haar-random unitaries and the i.i.d. Gaussian submatrix ensemble.
//! - [`permutations`]: permutation and integer-partition enumeration, cycle
//!   structures, conjugacy-class sizes and the cycle sum `chi(n)`.
//! - [`sources`]: single-photon source models producing the indistinguishability
//!   parameters `g_1..g_N`.
//! - [`probability`]: exact output probabilities with cycle-structure weights.
//! - [`variance`]: the rescaled variance `V(N, eta)`, its cubic small-mismatch
//!   approximation, Chebyshev success bounds and the mode-mismatch budget.
//! - [`montecarlo`]: statistical verification of the Gaussian-ensemble identities
//!   and of the boson birthday scaling.

pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod permutations;
pub mod probability;
pub mod sources;
pub mod variance;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, RngSeed, UnitaryNetwork};
pub use num_complex::Complex64;
pub use permutations::{CycleStructure, IntegerPartition, Permutation};
pub use sources::{GVector, SourceModel};
