use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("axis {axis} out of range for dimension {d}")]
    AxisOutOfRange { axis: usize, d: usize },

    #[error("negative entry in derivation multi-index: {0:?}")]
    NegativeDerivationOrder(Vec<i64>),

    #[error("deformation parameter must have 0 <= theta < 1 after reduction: {0}")]
    InvalidTheta(String),

    #[error("geometric ratio must be >= 3 (lacunary condition), got {0}")]
    RatioTooSmall(i64),

    #[error("schedule length must be >= 1")]
    EmptySchedule,

    #[error("frequency overflow: {0}")]
    FrequencyOverflow(String),

    #[error("schedule is not lacunary: m[{0}]/m[{1}] < 3")]
    NotLacunary(usize, usize),

    #[error("duplicate spectral index k = ({0}, {1}); schedule not sufficiently lacunary")]
    DuplicateSpectralIndex(i64, i64),

    #[error("amplitude |a_j| must be <= 1, got {0}")]
    AmplitudeOutOfRange(f64),

    #[error("level {level} exceeds schedule length {len}")]
    LevelOutOfRange { level: usize, len: usize },

    #[error("coefficient at {0:?} lies outside the Riesz spectrum")]
    SpectrumMismatch(Vec<i64>),

    #[error("p = {p} and q = {q} are not coprime")]
    NotCoprime { p: i64, q: i64 },

    #[error("modulus q must be >= 1, got {0}")]
    InvalidModulus(i64),

    #[error("matrix is not unitary: max deviation {0:.3e}")]
    NotUnitary(f64),

    #[error("truncation radius {radius} is smaller than the polynomial degree {degree}")]
    RadiusTooSmall { radius: i64, degree: i64 },

    #[error("search cap {0} exceeded without finding a rescaling")]
    SearchCapExceeded(u64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("anisotropic spec violation: {0}")]
    AnisotropicSpec(String),

    #[error("cannot parse theta '{0}'")]
    ThetaParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
