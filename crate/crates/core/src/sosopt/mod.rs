//! Sum-of-squares lower bounds as semidefinite programs.

mod basis;
mod certificate;
mod problem;
pub mod solver;

pub use basis::{Algebra, Mono, SosBasis};
pub use certificate::{
    algebraic_residual, dual_norm_bound, extract_generators, solve_sdp, verify_certificate, HermitianMatrix,
    SosCertificate, SosGenerators, VerificationReport,
};
pub use problem::{build_majorana2_sdp, build_sos_sdp, majorana2_hamiltonian, Constraint, SdpProblem, SosTarget};
pub use solver::{SolverKind, SolverOptions};

/// Default relative eigenvalue cutoff for generator extraction.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
