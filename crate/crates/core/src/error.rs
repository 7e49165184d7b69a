//! Error type shared by all modules.

/// Errors raised by structural validation and by operation preconditions.
#[derive(thiserror::Error, Debug, Clone)]
pub enum Error {
    #[error("block shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("element is not hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("element is not skew-adjoint (defect {defect:.3e})")]
    NotSkewAdjoint { defect: f64 },
    #[error("L^p norm requires p >= 1, got p = {0}")]
    InvalidExponent(f64),
    #[error("Leibniz rule violated on seeded pair {pair}: residual {residual:.3e} exceeds {tolerance:.3e}")]
    LeibnizViolation {
        pair: usize,
        residual: f64,
        tolerance: f64,
    },
    #[error("scalar function '{name}' has no derivative evaluator (needed at t = {at})")]
    MissingDerivative { name: String, at: f64 },
    #[error("scalar function '{name}' carries no Lipschitz certificate")]
    MissingLipschitz { name: String },
    #[error("scalar function '{name}' does not vanish at zero (f(0) = {value:.3e})")]
    NonVanishing { name: String, value: f64 },
    #[error("unknown scalar function '{0}'")]
    UnknownFunction(String),
    #[error("form is not real-positive (compressed symmetric part has eigenvalue {min_eig:.3e})")]
    NotRealPositive { min_eig: f64 },
    #[error("operator {alpha} - L is singular; {alpha} is not in the resolvent set")]
    SingularResolvent { alpha: f64 },
    #[error("coefficient matrix not coercive: component {component} has eigenvalue {nu:.3e} below {required:.3e}")]
    NotCoercive {
        component: usize,
        nu: f64,
        required: f64,
    },
    #[error("coefficient matrix is not antisymmetric (defect {defect:.3e})")]
    NotAntisymmetric { defect: f64 },
    #[error("coefficient matrix is not self-adjoint (defect {defect:.3e})")]
    NotSelfAdjoint { defect: f64 },
    #[error("sub-Markovian precondition failed for {which}: {detail}")]
    SubMarkovPrecondition { which: String, detail: String },
    #[error("serialization: {0}")]
    Serialization(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
