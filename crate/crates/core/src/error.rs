use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid radius vector: {0}")]
    InvalidRadius(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate torus: coordinate {index} of the radius vector is zero")]
    DegenerateTorus { index: usize },

    #[error("points {first} and {second} are at distance {distance:.9}, below the required {required}")]
    DistanceViolation {
        first: usize,
        second: usize,
        distance: f64,
        required: f64,
    },

    #[error("matrix is singular")]
    Singular,

    #[error("not a sublattice: B^-1 B1 has a non-integral entry at ({row}, {col})")]
    NotSublattice { row: usize, col: usize },

    #[error("hyperbox too small: axis {axis} fits no sublattice step")]
    BoxTooSmall { axis: usize },

    #[error("exact nearest-point search refused in dimension {dim} (cap {cap})")]
    DimensionCap { dim: usize, cap: usize },

    #[error("code too large to materialize: {size} codewords (cap {cap})")]
    CodeTooLarge { size: String, cap: u64 },

    #[error("invalid label: {0}")]
    InvalidLabel(String),

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("density {0} exceeds 1: inconsistent inputs")]
    DensityOverflow(f64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("codebook format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Parameter problems map to exit code 2 on the command line.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidRadius(_)
                | Error::DimensionMismatch { .. }
                | Error::BoxTooSmall { .. }
                | Error::DegenerateTorus { .. }
                | Error::Parse { .. }
                | Error::InvalidLabel(_)
        )
    }
}
