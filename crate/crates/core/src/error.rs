use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its domain (negative penalty,
    /// zero folds, and so on).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Resources or settings do not fit together.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("feature space mismatch: model expects {expected}, got {found}")]
    FeatureSpaceMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },

    #[error("dialog `{0}` has no turns")]
    EmptyDialog(String),

    #[error("dimension `{0}` is not declared in scale bounds")]
    UndeclaredDimension(String),

    #[error("rating {value} for dimension `{dimension}` on {unit} is outside scale bounds [{min}, {max}]")]
    RatingOutOfBounds {
        dimension: String,
        unit: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("unresolved ids: {}", .0.join(", "))]
    UnresolvedIds(Vec<String>),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("too few observations: need {needed}, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("rank-deficient design: column `{column}` is collinear with {}", .with.join(", "))]
    RankDeficient { column: String, with: Vec<String> },

    #[error("constant predictor `{0}`")]
    ConstantPredictor(String),

    #[error("insufficient paired ratings for agreement")]
    InsufficientAgreementData,

    #[error("no annotations at the requested level")]
    NoAnnotations,

    #[error("at least two systems are required, found {0}")]
    TooFewSystems(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid pattern `{0}`: `*` may only appear as the final character")]
    InvalidPattern(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),
}

impl Error {
    /// True for errors caused by settings or resources rather than data.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::Config(_)
                | Error::FeatureSpaceMismatch { .. }
                | Error::UnknownMetric(_)
                | Error::InvalidPattern(_)
        )
    }
}
