//! Crate-wide error type.

use crate::fock::Label;

/// Alias for `std::result::Result` with the crate error type.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("duplicate subsystem label {0}")]
    DuplicateLabel(Label),

    #[error("subsystem {label} has invalid dimension {dim}")]
    InvalidDimension { label: Label, dim: usize },

    #[error("space has no subsystem labelled {0}")]
    UnknownLabel(Label),

    #[error("subsystem {0} is not a bosonic mode")]
    NotBosonic(Label),

    #[error("occupation {occ} on mode {label} exceeds truncation n_max = {n_max}")]
    OccupationExceedsTruncation {
        label: Label,
        occ: usize,
        n_max: usize,
    },

    #[error("space requires a spin value but none was given")]
    MissingSpin,

    #[error("operands live on different Hilbert spaces")]
    SpaceMismatch,

    #[error("partial trace needs a nonempty set of retained subsystems")]
    EmptyKeep,

    #[error("operator is not Hermitian (max |H - H*| = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("tolerance {0} outside the accepted range (0, 1e-4]")]
    InvalidTolerance(f64),

    #[error("propagation step size underflowed at t = {t} (dt = {dt:.3e}) before meeting tolerance")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("dimension {dim} exceeds the dense-path limit {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("times must be strictly increasing and nonnegative")]
    BadTimeGrid,

    #[error("truncated tail mass {mass:.3e} exceeds budget {budget:.3e}; raise n_max")]
    TailMassTooLarge { mass: f64, budget: f64 },

    #[error("state norm {norm} deviates from 1 beyond the accepted bound")]
    NormDeviation { norm: f64 },

    #[error("output column {name} produced probability {value:.6e} outside [0, 1 + 1e-9]")]
    ProbabilityOutOfRange { name: String, value: f64 },

    #[error("probability model returned a negative probability {p:.3e} at outcome {index}")]
    NegativeProbability { index: usize, p: f64 },

    #[error("rate must be strictly positive")]
    ZeroRate,

    #[error("frequency must be nonnegative, got {0}")]
    NegativeFrequency(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}
