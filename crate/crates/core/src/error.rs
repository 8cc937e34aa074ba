use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance matrix is not symmetric at ({0}, {1})")]
    AsymmetricDistance(usize, usize),

    #[error("triangle inequality violated: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    TriangleViolation { i: usize, j: usize, k: usize },

    #[error("distinct points {0} and {1} are at distance zero")]
    ZeroDistanceDistinctPoints(usize, usize),

    #[error("base point index {base} out of range for {n} points")]
    BadBaseIndex { base: usize, n: usize },

    #[error("malformed metric: {0}")]
    MalformedMetric(String),

    #[error("malformed partial order: {0}")]
    MalformedOrder(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("objects live on different metric spaces")]
    SpaceMismatch,

    #[error("mixing weight {0} outside [0, 1]")]
    LambdaOutOfRange(f64),

    #[error("scale factor {0} is negative")]
    NegativeScale(f64),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("signed measure has total mass {0}, expected zero")]
    NonzeroTotalMass(f64),

    #[error("utility family is empty")]
    EmptyFamily,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("malformed linear program: {0}")]
    MalformedProgram(String),

    #[error("flow supplies do not balance (net {0})")]
    Unbalanced(f64),

    #[error("flow network cannot route all supply ({0} left over)")]
    Disconnected(f64),

    #[error("labels are not real numbers: {0:?}")]
    NonNumericLabels(String),

    #[error("{n} points exceeds the enumeration limit of {limit}")]
    TooManyPoints { n: usize, limit: usize },

    #[error("choice set is empty")]
    EmptyChoiceSet,

    #[error("proper family is not strictly increasing on the strict pair ({0}, {1})")]
    NotStrictlyIncreasing(usize, usize),

    #[error("oracle functional exceeds its declared Lipschitz bound: quotient {quotient} > {bound}")]
    OracleNotLipschitz { quotient: f64, bound: f64 },

    #[error("state utility member {member} is not a nonnegative multiple of one utility (state {state})")]
    NotRankOne { member: usize, state: usize },

    #[error("members {0} and {1} imply different priors")]
    PriorMismatch(usize, usize),

    #[error("every member of the state-dependent family is zero")]
    TrivialFamily,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("portfolio problem is unbounded")]
    Unbounded,

    #[error("portfolio constraints are infeasible")]
    Infeasible,

    #[error("non-concave utility requires a bounding box")]
    BoxRequired,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// The variant name, for machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::AsymmetricDistance(..) => "AsymmetricDistance",
            Error::TriangleViolation { .. } => "TriangleViolation",
            Error::ZeroDistanceDistinctPoints(..) => "ZeroDistanceDistinctPoints",
            Error::BadBaseIndex { .. } => "BadBaseIndex",
            Error::MalformedMetric(_) => "MalformedMetric",
            Error::MalformedOrder(_) => "MalformedOrder",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::SpaceMismatch => "SpaceMismatch",
            Error::LambdaOutOfRange(_) => "LambdaOutOfRange",
            Error::NegativeScale(_) => "NegativeScale",
            Error::InvalidProbability(_) => "InvalidProbability",
            Error::NonzeroTotalMass(_) => "NonzeroTotalMass",
            Error::EmptyFamily => "EmptyFamily",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::NumericalBreakdown(_) => "NumericalBreakdown",
            Error::MalformedProgram(_) => "MalformedProgram",
            Error::Unbalanced(_) => "Unbalanced",
            Error::Disconnected(_) => "Disconnected",
            Error::NonNumericLabels(_) => "NonNumericLabels",
            Error::TooManyPoints { .. } => "TooManyPoints",
            Error::EmptyChoiceSet => "EmptyChoiceSet",
            Error::NotStrictlyIncreasing(..) => "NotStrictlyIncreasing",
            Error::OracleNotLipschitz { .. } => "OracleNotLipschitz",
            Error::NotRankOne { .. } => "NotRankOne",
            Error::PriorMismatch(..) => "PriorMismatch",
            Error::TrivialFamily => "TrivialFamily",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::Unbounded => "Unbounded",
            Error::Infeasible => "Infeasible",
            Error::BoxRequired => "BoxRequired",
        }
    }
}
