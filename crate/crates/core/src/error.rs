use thiserror::Error;

/// Errors raised by grid construction and the Liouville-space operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("unphysical support: {residual:.3e} of the norm lies in E < |nu| (no kernel preimage)")]
    UnphysicalSupport { residual: f64 },

    #[error("density matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("density matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    TraceNotUnit { trace: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("state has zero norm")]
    ZeroState,

    #[error("resonance pole {re}{im:+}i must lie in the open lower half-plane ℂ₋ (Im xi < 0)")]
    PoleNotInLowerHalfPlane { re: f64, im: f64 },

    #[error("resonance pole not resolvable on this grid: need 10*dnu <= |Im xi| <= nu_max/50, got |Im xi| = {width}, dnu = {spacing}, nu_max = {nu_max}")]
    PoleNotResolvable { width: f64, spacing: f64, nu_max: f64 },

    #[error("profile length {actual} does not match the energy grid ({expected} samples)")]
    ProfileLength { expected: usize, actual: usize },

    #[error("semigroup time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("empty interval ]{t1}, {t2}]: need t1 < t2")]
    EmptyInterval { t1: f64, t2: f64 },

    #[error("times must be finite and strictly increasing")]
    TimesNotIncreasing,

    #[error("a density matrix is required to compute the energy spread")]
    MissingDensity,

    #[error("eigendecomposition failed: {0}")]
    Decomposition(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
