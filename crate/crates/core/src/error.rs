use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Majorana index {index} out of range for {n_modes} modes")]
    ModeOutOfRange { index: usize, n_modes: usize },

    #[error("Jordan-Wigner mapping needs an even mode count, got {0}")]
    OddModeCount(usize),

    #[error("dense dimension 2^{qubits} exceeds the configured cap 2^{cap}")]
    DenseCapExceeded { qubits: usize, cap: usize },

    #[error("coefficient {0} is not real")]
    ComplexCoefficient(String),

    #[error("matrix is not antisymmetric (max |g + g^T| = {0:e})")]
    NotAntisymmetric(f64),

    #[error("monomial {0} of the Hamiltonian is not generated by the basis products")]
    MonomialNotCovered(String),

    #[error("duplicate basis monomial {0}")]
    DuplicateMonomial(String),

    #[error("Gram matrix has eigenvalue {eigenvalue:e} below -10 * solver tolerance")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("certificate rejected: {0}")]
    InvalidCertificate(String),

    #[error("generator row {0} is zero")]
    ZeroRow(usize),

    #[error("eigenvalue {value} outside [-{lambda}, {lambda}]")]
    OutsideNormalization { value: f64, lambda: f64 },

    #[error("gapped phase estimation parameters violate 0 < eps <= theta0 <= eps + theta0 <= pi/2 (theta0 = {theta0}, eps = {eps})")]
    GpeParameters { theta0: f64, eps: f64 },

    #[error("generator basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("lambda {lambda} exceeds the bound {bound}")]
    LambdaBound { lambda: f64, bound: f64 },

    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
