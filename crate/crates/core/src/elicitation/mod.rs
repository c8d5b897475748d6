//! The lazy elicitation loop: pick the most conflicting pair of columns,
//! ask for their tradeoff, merge them, refilter, repeat.

mod merge;
mod question;
mod session;

pub use merge::merge_attributes;
pub use question::{
    coefficient_from_type1, ratio_from_answers, Answer, Question, QuestionKind, RatioEvidence,
    MIN_PROBE_UTILITY,
};
pub use session::{
    ElicitationSession, EliminationEvent, FinalReport, MergeRecord, RatioSource, SessionStatus,
    SessionView, COEFFICIENT_SUM_TOLERANCE,
};
