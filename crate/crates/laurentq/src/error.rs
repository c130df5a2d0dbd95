use thiserror::Error;

/// Errors surfaced by the numerical pipeline.
///
/// Most variants signal a numerical breakdown that the caller can cure by
/// raising the working precision or loosening a tolerance; they carry enough
/// context to name the offending stage.
#[derive(Error, Debug)]
pub enum LqError {
    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),
    #[error("Newton iteration did not converge after {iters} steps (residual {residual})")]
    NoConvergence { iters: usize, residual: String },
    #[error("Jacobian is numerically singular at pivot {0}")]
    JacobianSingular(usize),
    #[error("root count mismatch: expected {expected}, located {found}")]
    RootCountMismatch { expected: usize, found: usize },
    #[error("missing moment c_{0} in table")]
    MissingMoment(i64),
    #[error("Hankel positivity violated at m={m}: H = {value}")]
    PositivityViolation { m: i64, value: String },
    #[error("singular Hankel determinant H^({m})_{k}")]
    SingularHankel { m: i64, k: usize },
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("division by a vanishing coefficient at index {0} (singular index?)")]
    ZeroDivision(i64),
    #[error("endpoint interlacing violated during Newton step")]
    InterlacingViolated,
    #[error("contour violation: {0}")]
    ContourViolation(String),
    #[error("evaluation point {0} lies outside the support")]
    OutsideSupport(String),
    #[error("variational constant varies across bands: spread {0}")]
    ConstancyViolation(String),
    #[error("finite-difference derivative estimates disagree: {0}")]
    DerivativeNoise(String),
    #[error("period matrix is ill-conditioned (pivot ratio {0})")]
    IllConditionedPeriods(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("config error: {0}")]
    ConfigError(String),
    #[error("equilibrium problem unsolvable at shifted index n={0}")]
    Unsolvable(i64),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LqError>;
