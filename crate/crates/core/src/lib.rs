//! Sum-of-squares spectral amplification workbench.
//!
//! The crate covers the whole classical side of the pipeline:
//!
//! * [`operators`]: Pauli and Majorana algebra, Jordan–Wigner, LCU bookkeeping
//!   and the termwise square root of a Pauli Hamiltonian.
//! * [`sosopt`]: sum-of-squares lower bounds as semidefinite programs, the
//!   first-order and interior-point solvers, generator extraction and dense
//!   certificate verification.
//! * [`specamp`]: spectral-amplified operators and their normalizations, the
//!   qubitization walk spectrum, and the PARITY∘OR hard instance.
//! * [`phaseest`]: statistical simulation of gapped phase estimation and the
//!   energy / ground-state estimators built on it, with exact query ledgers.
//! * [`doublefact`]: canonical forms of antisymmetric matrices and the double
//!   factorized normalization of quadratic Majorana generators.
//! * [`syk`]: SYK instances, exact ground energies, and the scaling experiment.
//! * [`sampler`]: Hadamard-test shot allocation and its Bernoulli simulation.

pub mod doublefact;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod phaseest;
pub mod sampler;
pub mod sosopt;
pub mod specamp;
pub mod syk;

pub use error::{Error, Result};
pub use num_complex::Complex64;
