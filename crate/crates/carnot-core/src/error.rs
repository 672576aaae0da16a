use thiserror::Error;

/// Errors produced by parsing, validation and the computational pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: i64, n: usize },
    #[error("duplicate bracket entry ({i},{j})")]
    DuplicateBracket { i: usize, j: usize },
    #[error("bracket entry ({i},{j}): i must be < j")]
    BracketOrder { i: usize, j: usize },
    #[error("invalid rational literal {literal:?}")]
    BadRational { literal: String },
    #[error("zero denominator in rational literal {literal:?}")]
    ZeroDenominator { literal: String },
    #[error("labels has length {got}, expected {expected}")]
    LabelCount { got: usize, expected: usize },
    #[error("strata dimensions must be positive")]
    EmptyStratum,
    #[error("Jacobi identity fails on basis triple ({i},{j},{k})")]
    JacobiViolation { i: usize, j: usize, k: usize },
    #[error("grading violation: c({i},{j})^{k} is nonzero but weight({k}) = {wk} != {wi} + {wj}")]
    GradingViolation {
        i: usize,
        j: usize,
        k: usize,
        wi: u32,
        wj: u32,
        wk: u32,
    },
    #[error("stratum {stratum} is not generated by brackets of lower strata")]
    NotGenerated { stratum: u32 },
    #[error("unknown builtin algebra {0:?}")]
    UnknownBuiltin(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension {n} exceeds the exact-arithmetic capacity limit {max}")]
    CapacityExceeded { n: usize, max: usize },
    #[error("operation requires a step-{max} group, this algebra has step {step}")]
    StepUnsupported { step: u32, max: u32 },
    #[error("retraction iterates did not stabilize in degree {degree} after {iterations} steps")]
    NonStabilization { degree: usize, iterations: usize },
    #[error("constraint violation {violation:e} above tolerance {tolerance:e}")]
    NonConvergence { violation: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag used in JSON diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Json(_) => "MalformedJson",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DuplicateBracket { .. } => "DuplicateBracket",
            Error::BracketOrder { .. } => "BracketOrder",
            Error::BadRational { .. } => "BadRational",
            Error::ZeroDenominator { .. } => "ZeroDenominator",
            Error::LabelCount { .. } => "LabelCount",
            Error::EmptyStratum => "EmptyStratum",
            Error::JacobiViolation { .. } => "JacobiViolation",
            Error::GradingViolation { .. } => "GradingViolation",
            Error::NotGenerated { .. } => "NotGenerated",
            Error::UnknownBuiltin(_) => "UnknownBuiltin",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::CapacityExceeded { .. } => "CapacityExceeded",
            Error::StepUnsupported { .. } => "StepUnsupported",
            Error::NonStabilization { .. } => "NonStabilization",
            Error::NonConvergence { .. } => "NonConvergence",
        }
    }
}
