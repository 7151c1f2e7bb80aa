use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported domain kind: {0}")]
    UnsupportedKind(String),
    #[error("resolution too small: {0} (need at least 16 nodes per direction)")]
    ResolutionTooSmall(usize),
    #[error("field does not belong to this domain (length {got}, expected {expected})")]
    DomainMismatch { got: usize, expected: usize },
    #[error("weight is not strictly positive on interior nodes (min {0:.3e})")]
    NonPositiveWeight(f64),
    #[error("linear solver did not converge: {0}")]
    LinearSolve(String),
    #[error("Picard map is not a contraction at lambda={lambda} (factor {factor:.3})")]
    NonContraction { lambda: f64, factor: f64 },
    #[error("mass equation has no root in (0, 1] at lambda={0}")]
    RootNotBracketed(f64),
    #[error("linearized system is singular (vanishing constrained eigenvalue nearby)")]
    SingularLinearization,
    #[error("positivity loss: alpha + lambda*psi reached {0:.3e}")]
    PositivityLoss(f64),
    #[error("state exceeded the a-priori bound {bound:.3e} (max {max:.3e}); aborting instead of diverging")]
    DivergenceGuard { max: f64, bound: f64 },
    #[error("Newton iteration did not converge within {0} steps")]
    NewtonStalled(usize),
    #[error("eigenvalue solver did not converge ({0})")]
    EigsNoConvergence(String),
    #[error("ground-state iteration stagnated for t={0}")]
    SobolevStagnation(f64),
    #[error("exponent t={t} out of range for N={n}")]
    ExponentOutOfRange { t: f64, n: u32 },
    #[error("free-boundary map undefined for p=1 or lambda=0")]
    FreeBoundaryUndefined,
    #[error("continuation corrector failed: {0}")]
    CorrectorFailed(String),
    #[error("continuation step size underflow at lambda={0}")]
    StepUnderflow(f64),
    #[error("transversality loss at fold: |<phi_1>| = {0:.3e}")]
    TransversalityLoss(f64),
    #[error("fold limit ({0}) exceeded")]
    FoldLimit(usize),
    #[error("operation not supported on this backend: {0}")]
    Unsupported(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
