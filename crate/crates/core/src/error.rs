//! Error types shared across the crate.

/// Everything that can go wrong in the laboratory.
///
/// Variants are deliberately fine-grained: callers (and the CLI) distinguish
/// between "the input is outside the contract" and "the computation hit a
/// degenerate configuration and should resample".
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("polynomial is constant, no roots to solve for")]
    DegreeZero,
    #[error("root iteration failed to converge (residual {residual:.3e})")]
    NoConverge { residual: f64 },
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("pencil eigenvalues collide within tolerance, cannot diagonalize")]
    DegeneratePencil,
    #[error("first form of the pencil is singular")]
    SingularA,
    #[error("covector is numerically zero")]
    ZeroCovector,
    #[error("unlucky draw persisted after {attempts} attempts")]
    Unlucky { attempts: usize },
    #[error("point fails the smoothness rank condition")]
    SingularPoint,
    #[error("covector restricts to zero on the tangent frame")]
    ZeroRestriction,
    #[error("spectral polynomial degree dropped below {expected}")]
    DegenerateDrop { expected: usize },
    #[error("gauge calibration failed (residual {residual:.3e})")]
    GaugeError { residual: f64 },
    #[error("plane meets the coordinate slice in dimension {kernel_dim}, expected 1")]
    BadIncidence { kernel_dim: usize },
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("chart hit its branch locus")]
    BranchLocus,
    #[error("chart equations lost rank")]
    RankDeficient,
    #[error("finite-difference step disagreement {disagreement:.3e} exceeds tolerance")]
    StepTooLarge { disagreement: f64 },
    #[error("integration step rejected (estimated error {estimate:.3e})")]
    StepRejected { estimate: f64 },
    #[error("branch points collide, curve would be singular")]
    SingularCurve,
    #[error("branch count {0} is odd")]
    Parity(usize),
    #[error("degenerate differential data (coincident or branch-point support)")]
    DegenerateOmega,
    #[error("point is off the quadric (residual {residual:.3e})")]
    OffQuadric { residual: f64 },
    #[error("no witness found after {draws} draws")]
    NoWitness { draws: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
