use thiserror::Error;

/// Every failure mode surfaced by the library.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type the
/// failing computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative radial momentum r = {0}")]
    NegativeMomentum(f64),
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("m = {m} must be strictly below e1 = {e1}")]
    MassOrderViolation { e1: f64, m: f64 },
    #[error("e1 - e0 = {e1} lies in m*N (m = {m}); the gap dist(e1 - e0, mN) vanishes")]
    GapViolation { e1: f64, m: f64 },

    #[error("invalid integration interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("adaptive quadrature did not reach tolerance: estimate {estimate}, error {error}")]
    ToleranceNotMet { estimate: f64, error: f64 },
    #[error("pole at {pole} is not strictly inside ({lo}, {hi})")]
    PoleOnBoundary { pole: f64, lo: f64, hi: f64 },
    #[error("numerator is discontinuous at the pole {pole} (jump ~ {jump})")]
    NumeratorDiscontinuous { pole: f64, jump: f64 },
    #[error("regularization width must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("tau = {tau} is at or below the threshold m - e1 = {threshold}")]
    BelowThreshold { tau: f64, threshold: f64 },

    #[error("packet support [{lo}, {hi}] must satisfy 0 < lo < hi < inf")]
    SupportAtOrigin { lo: f64, hi: f64 },

    #[error("z-window too narrow: tail remainder bound {bound} exceeds {limit}")]
    WindowTooNarrow { bound: f64, limit: f64 },
    #[error("decay width must be positive for the z-quadrature (got {0})")]
    ZeroWidth(f64),
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("invalid radial grid: {0}")]
    InvalidGrid(String),
    #[error("Fock basis dimension {dim} exceeds the cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },
    #[error("eigensolver failure: {0}")]
    EigensolverFailure(String),
    #[error("contour solve at z = ({re}, {im}) is ill-conditioned (condition estimate {cond:e})")]
    ContourCrossesSpectrum { re: f64, im: f64, cond: f64 },
    #[error("eta = {eta} is below the floor {floor} (3 x level spacing {spacing})")]
    EtaTooSmall { eta: f64, floor: f64, spacing: f64 },
    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("test function does not vanish near the grid boundary (|phi| = {0})")]
    SupportTouchesBoundary(f64),
    #[error("the spectral cutoff annihilates the truncated space")]
    EmptyCutoffRange,
    #[error("eps = {eps} is below the spacing floor {floor}")]
    EpsBelowSpacingFloor { eps: f64, floor: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
