use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("attribute `{attribute}` cannot evaluate value {value}")]
    Domain { attribute: String, value: String },

    #[error("invalid attribute: {0}")]
    InvalidAttribute(String),

    #[error("invalid subutility for `{attribute}`: {reason}")]
    InvalidSubutility { attribute: String, reason: String },

    #[error("invalid prospect: {0}")]
    InvalidProspect(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("plan matrix is empty")]
    EmptyMatrix,

    #[error("invalid plan matrix: {0}")]
    InvalidMatrix(String),

    #[error("need at least 2 active columns, have {0}")]
    TooFewColumns(usize),

    #[error("need at least 2 surviving plans, have {0}")]
    TooFewSurvivors(usize),

    #[error("rankings must have at least 2 items, have {0}")]
    RankingTooShort(usize),

    #[error("column {0} is not active")]
    InactiveColumn(usize),

    #[error("cannot merge column {0} into itself")]
    SameColumn(usize),

    #[error("tradeoff ratio must be positive and finite, got {0}")]
    InvalidRatio(f64),

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("invalid answer: {0}")]
    InvalidAnswer(String),

    #[error("already decided: the frontier holds a single plan")]
    AlreadyDecided,

    #[error("session is done")]
    SessionDone,

    #[error("no question is pending")]
    NoPendingQuestion,

    #[error("a question is already pending")]
    QuestionPending,

    #[error("answer does not match the pending question: {0}")]
    AnswerMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// A stable snake_case name for the variant, for machine-readable error
    /// bodies.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Domain { .. } => "domain",
            Error::InvalidAttribute(_) => "invalid_attribute",
            Error::InvalidSubutility { .. } => "invalid_subutility",
            Error::InvalidProspect(_) => "invalid_prospect",
            Error::InvalidModel(_) => "invalid_model",
            Error::EmptyMatrix => "empty_matrix",
            Error::InvalidMatrix(_) => "invalid_matrix",
            Error::TooFewColumns(_) => "too_few_columns",
            Error::TooFewSurvivors(_) => "too_few_survivors",
            Error::RankingTooShort(_) => "ranking_too_short",
            Error::InactiveColumn(_) => "inactive_column",
            Error::SameColumn(_) => "same_column",
            Error::InvalidRatio(_) => "invalid_ratio",
            Error::UndefinedRatio(_) => "undefined_ratio",
            Error::InvalidProbability(_) => "invalid_probability",
            Error::InvalidAnswer(_) => "invalid_answer",
            Error::AlreadyDecided => "already_decided",
            Error::SessionDone => "session_done",
            Error::NoPendingQuestion => "no_pending_question",
            Error::QuestionPending => "question_pending",
            Error::AnswerMismatch(_) => "answer_mismatch",
            Error::Parse(_) => "parse",
        }
    }

    pub(crate) fn dims(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }
}
