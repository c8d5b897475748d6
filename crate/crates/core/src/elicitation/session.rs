use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::merge::merge_attributes;
use super::question::{
    coefficient_from_type1, ratio_from_answers, Answer, Question, QuestionKind, RatioEvidence,
};
use crate::error::{Error, Result};
use crate::frontier::{
    efficient_frontier, select_merge_pair, ColumnDescriptor, FrontierResult, PlanMatrix,
    PlanRecord,
};
use crate::utility::ScaledAttribute;

/// Coefficient sums further than this from 1 draw a warning in the report.
pub const COEFFICIENT_SUM_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Active,
    AwaitingAnswer,
    Done,
}

/// How the ratio behind a merge was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RatioSource {
    Coefficients {
        absorbed_attribute: String,
        k_absorbed: f64,
        into_attribute: String,
        k_into: f64,
    },
    Matching {
        probe_attribute: String,
        probe: f64,
        probe_utility: f64,
        matched_attribute: String,
        matching_value: f64,
        matching_utility: f64,
    },
    Direct {
        r: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeRecord {
    /// Column index, at merge time, of the column that disappeared.
    pub absorbed: usize,
    /// Column index, at merge time, of the column that received it.
    pub into: usize,
    /// `k_absorbed / k_into` for the two columns.
    pub ratio: f64,
    pub label: String,
    pub source: RatioSource,
    pub frontier_before: usize,
    pub frontier_after: usize,
}

/// A plan removed during the session and the survivor that dominated it,
/// with both vectors as they were in the column space of that moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationEvent {
    pub id: usize,
    pub dominator: usize,
    /// Number of merges performed before the elimination.
    pub step: usize,
    pub w: Vec<f64>,
    pub dominator_w: Vec<f64>,
}

/// Lazy elicitation over a fixed set of plans.
///
/// The session alternates between filtering the plans through the current
/// partial model and asking for one tradeoff. Every transition either
/// succeeds or leaves the session exactly as it was.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElicitationSession {
    attributes: Vec<ScaledAttribute>,
    epsilon: f64,
    matrix: PlanMatrix,
    frontier: FrontierResult,
    eliminations: Vec<EliminationEvent>,
    history: Vec<MergeRecord>,
    pending_question: Option<Question>,
    status: SessionStatus,
    assessed_coefficients: BTreeMap<String, f64>,
    answers: Vec<Answer>,
}

/// The session as exchanged with clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub status: SessionStatus,
    pub columns: Vec<ColumnDescriptor>,
    pub frontier: Vec<usize>,
    pub plans: Vec<PlanRecord>,
    pub eliminated: Vec<EliminationEvent>,
    pub history: Vec<MergeRecord>,
    pub pending_question: Option<Question>,
    pub assessed_coefficients: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalReport {
    pub surviving: Vec<usize>,
    pub surviving_labels: Vec<String>,
    pub history: Vec<MergeRecord>,
    pub assessed_coefficients: BTreeMap<String, f64>,
    /// Every attribute's scaling constant, present once all attributes sit
    /// in one merged column.
    pub weights: Option<BTreeMap<String, f64>>,
    pub answers: Vec<Answer>,
    pub warnings: Vec<String>,
}

impl ElicitationSession {
    /// Filters the plans once and opens the session.
    pub fn start(
        plans: Vec<PlanRecord>,
        attributes: Vec<ScaledAttribute>,
        epsilon: f64,
    ) -> Result<Self> {
        if plans.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if attributes.is_empty() {
            return Err(Error::InvalidAttribute("no attributes".into()));
        }
        for a in &attributes {
            a.attribute.validate()?;
            a.subutility.validate(&a.attribute)?;
        }
        for (idx, a) in attributes.iter().enumerate() {
            if attributes[..idx].iter().any(|b| b.name() == a.name()) {
                return Err(Error::InvalidAttribute(format!(
                    "duplicate attribute `{}`",
                    a.name()
                )));
            }
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidMatrix(format!("epsilon must be >= 0, got {epsilon}")));
        }
        let columns = attributes
            .iter()
            .enumerate()
            .map(|(i, a)| ColumnDescriptor::attribute(i, a.name()))
            .collect();
        let matrix = PlanMatrix::new(plans, columns)?;
        let frontier = efficient_frontier(&matrix, epsilon)?;
        let mut session = ElicitationSession {
            attributes,
            epsilon,
            matrix,
            frontier: frontier.clone(),
            eliminations: Vec::new(),
            history: Vec::new(),
            pending_question: None,
            status: SessionStatus::Active,
            assessed_coefficients: BTreeMap::new(),
            answers: Vec::new(),
        };
        session.log_eliminations(&frontier);
        session.refresh_status();
        Ok(session)
    }

    /// Rebuilds a session by feeding `answers` in order, asking for the next
    /// question whenever an answer needs one.
    pub fn replay(
        plans: Vec<PlanRecord>,
        attributes: Vec<ScaledAttribute>,
        epsilon: f64,
        answers: &[Answer],
    ) -> Result<Self> {
        let mut session = Self::start(plans, attributes, epsilon)?;
        for answer in answers {
            let explicit = matches!(answer, Answer::DirectRatio { pair: Some(_), .. });
            if !explicit && session.pending_question.is_none() {
                session.next_question()?;
            }
            session.apply_answer(answer.clone())?;
        }
        Ok(session)
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn frontier(&self) -> &FrontierResult {
        &self.frontier
    }

    pub fn matrix(&self) -> &PlanMatrix {
        &self.matrix
    }

    pub fn attributes(&self) -> &[ScaledAttribute] {
        &self.attributes
    }

    pub fn history(&self) -> &[MergeRecord] {
        &self.history
    }

    pub fn eliminations(&self) -> &[EliminationEvent] {
        &self.eliminations
    }

    pub fn pending_question(&self) -> Option<&Question> {
        self.pending_question.as_ref()
    }

    pub fn assessed_coefficients(&self) -> &BTreeMap<String, f64> {
        &self.assessed_coefficients
    }

    pub fn answers(&self) -> &[Answer] {
        &self.answers
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn is_decided(&self) -> bool {
        self.frontier.len() <= 1
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            status: self.status,
            columns: self.matrix.columns().to_vec(),
            frontier: self.frontier.surviving.clone(),
            plans: self.matrix.plans().to_vec(),
            eliminated: self.eliminations.clone(),
            history: self.history.clone(),
            pending_question: self.pending_question.clone(),
            assessed_coefficients: self.assessed_coefficients.clone(),
        }
    }

    /// The question to put to the user next.
    ///
    /// Repeated calls return the same question until it is answered. The
    /// pair is the most conflicting one among the survivors; a matching
    /// question is used when both sides have a continuous attribute whose
    /// midpoint carries utility, standard gambles otherwise.
    pub fn next_question(&mut self) -> Result<Question> {
        if let Some(q) = &self.pending_question {
            return Ok(q.clone());
        }
        if self.is_decided() {
            return Err(Error::AlreadyDecided);
        }
        if self.status == SessionStatus::Done {
            return Err(Error::SessionDone);
        }
        let (i, j) = select_merge_pair(&self.matrix, &self.frontier)?;
        let q = self.question_for((i, j));
        self.pending_question = Some(q.clone());
        self.status = SessionStatus::AwaitingAnswer;
        Ok(q)
    }

    /// Records an answer and, once the pair's ratio is known, merges the
    /// pair and refilters the surviving plans. Afterwards, while the most
    /// conflicting pair has both weights implied by earlier answers, that
    /// pair is merged too, so the state depends only on the answers given.
    pub fn apply_answer(&mut self, answer: Answer) -> Result<()> {
        let mut next = self.clone();
        next.apply_answer_inner(answer.clone())?;
        next.settle()?;
        next.answers.push(answer);
        *self = next;
        Ok(())
    }

    fn apply_answer_inner(&mut self, answer: Answer) -> Result<()> {
        if self.status == SessionStatus::Done {
            return Err(Error::SessionDone);
        }
        if let Answer::DirectRatio { r, pair: Some(pair) } = answer {
            let n = self.matrix.column_count();
            if pair.0 >= n {
                return Err(Error::InactiveColumn(pair.0));
            }
            if pair.1 >= n {
                return Err(Error::InactiveColumn(pair.1));
            }
            if pair.0 == pair.1 {
                return Err(Error::SameColumn(pair.0));
            }
            self.pending_question = None;
            return self.merge(pair, r, RatioSource::Direct { r });
        }
        let question = self.pending_question.clone().ok_or(Error::NoPendingQuestion)?;
        let pair = question.pair;
        match (&question.kind, answer) {
            (_, Answer::DirectRatio { r, pair: None }) => {
                self.pending_question = None;
                self.merge(pair, r, RatioSource::Direct { r })
            }
            (QuestionKind::TypeI { attribute, name, .. }, Answer::Probability { p }) => {
                let k = coefficient_from_type1(p)?;
                self.assessed_coefficients.insert(name.clone(), k);
                let (ki, kj) = (self.column_weight(pair.0), self.column_weight(pair.1));
                match (ki, kj) {
                    // A failed merge discards this whole working copy, so the
                    // coefficient is not kept either.
                    (Some(_), Some(_)) => self.merge_known_pair(pair),
                    _ => {
                        let other = if ki.is_none() { pair.0 } else { pair.1 };
                        debug_assert_ne!(self.representative(other), *attribute);
                        let target = self.representative(other);
                        self.pending_question =
                            Some(Question::type_i(pair, &self.attributes, target));
                        Ok(())
                    }
                }
            }
            (
                QuestionKind::TypeII {
                    attribute_i,
                    attribute_j,
                    probe,
                    probe_utility,
                    ..
                },
                Answer::MatchingValue { value },
            ) => {
                let target = &self.attributes[*attribute_j];
                let matching_utility = target.eval(&value.into()).map_err(|_| {
                    Error::InvalidAnswer(format!(
                        "{value} is outside the range of `{}`",
                        target.name()
                    ))
                })?;
                // k_a / k_b for the two original attributes.
                let attr_ratio = ratio_from_answers(RatioEvidence::Matching {
                    u_i: *probe_utility,
                    u_j: matching_utility,
                })?;
                let cols = self.matrix.columns();
                let scale_a = cols[pair.0].scale_of(*attribute_i).expect("member of column");
                let scale_b = cols[pair.1].scale_of(*attribute_j).expect("member of column");
                let r = attr_ratio * scale_b / scale_a;
                let source = RatioSource::Matching {
                    probe_attribute: self.attributes[*attribute_i].name().to_string(),
                    probe: *probe,
                    probe_utility: *probe_utility,
                    matched_attribute: target.name().to_string(),
                    matching_value: value,
                    matching_utility,
                };
                self.pending_question = None;
                self.merge(pair, r, source)
            }
            (kind, other) => Err(Error::AnswerMismatch(format!(
                "{} does not answer a {} question",
                answer_name(&other),
                match kind {
                    QuestionKind::TypeI { .. } => "probability",
                    QuestionKind::TypeII { .. } => "matching",
                }
            ))),
        }
    }

    /// Closes the session and reports the outcome.
    pub fn accept(&mut self) -> FinalReport {
        self.pending_question = None;
        self.status = SessionStatus::Done;
        self.report()
    }

    pub fn report(&self) -> FinalReport {
        let mut warnings = Vec::new();
        let weights = (self.matrix.column_count() == 1).then(|| {
            let col = &self.matrix.columns()[0];
            let total: f64 = col.members.iter().map(|m| m.scale).sum();
            col.members
                .iter()
                .map(|m| (m.name.clone(), m.scale / total))
                .collect::<BTreeMap<_, _>>()
        });
        if self.assessed_coefficients.len() == self.attributes.len() {
            let total: f64 = self.assessed_coefficients.values().sum();
            if (total - 1.0).abs() > COEFFICIENT_SUM_TOLERANCE {
                warnings.push(format!(
                    "assessed coefficients sum to {total:.4}, not 1; the answers may be inconsistent"
                ));
            }
        }
        FinalReport {
            surviving: self.frontier.surviving.clone(),
            surviving_labels: self
                .frontier
                .surviving
                .iter()
                .map(|&id| self.matrix.plan(id).map(|p| p.label.clone()).unwrap_or_default())
                .collect(),
            history: self.history.clone(),
            assessed_coefficients: self.assessed_coefficients.clone(),
            weights,
            answers: self.answers.clone(),
            warnings,
        }
    }

    /// Merges pairs whose weights already follow from earlier answers for as
    /// long as the most conflicting pair is such a pair.
    fn settle(&mut self) -> Result<()> {
        while self.status == SessionStatus::Active {
            let pair = select_merge_pair(&self.matrix, &self.frontier)?;
            if self.column_weight(pair.0).is_none() || self.column_weight(pair.1).is_none() {
                break;
            }
            self.merge_known_pair(pair)?;
        }
        Ok(())
    }

    /// First member of a column, by attribute order.
    fn representative(&self, column: usize) -> usize {
        self.matrix.columns()[column].members[0].attribute
    }

    /// The column's weight if some member's coefficient has been assessed:
    /// that coefficient divided by the member's scale in the column.
    fn column_weight(&self, column: usize) -> Option<f64> {
        self.matrix.columns()[column].members.iter().find_map(|m| {
            self.assessed_coefficients
                .get(&m.name)
                .map(|k| k / m.scale)
        })
    }

    fn assessed_member(&self, column: usize) -> Option<(String, f64)> {
        self.matrix.columns()[column].members.iter().find_map(|m| {
            self.assessed_coefficients
                .get(&m.name)
                .map(|k| (m.name.clone(), *k))
        })
    }

    fn question_for(&self, (i, j): (usize, usize)) -> Question {
        let cols = self.matrix.columns();
        let continuous_member = |c: usize| {
            cols[c]
                .members
                .iter()
                .map(|m| m.attribute)
                .find(|&a| self.attributes[a].attribute.kind == crate::utility::AttributeKind::Continuous)
        };
        if let (Some(a), Some(b)) = (continuous_member(i), continuous_member(j)) {
            if let Some(q) = Question::type_ii((i, j), &self.attributes, a, b) {
                return q;
            }
        }
        let column = if self.column_weight(i).is_none() { i } else { j };
        Question::type_i((i, j), &self.attributes, self.representative(column))
    }

    fn merge_known_pair(&mut self, pair: (usize, usize)) -> Result<()> {
        let (name_i, k_i) = self.assessed_member(pair.0).expect("assessed");
        let (name_j, k_j) = self.assessed_member(pair.1).expect("assessed");
        let col_i = self.column_weight(pair.0).expect("assessed");
        let col_j = self.column_weight(pair.1).expect("assessed");
        let r = ratio_from_answers(RatioEvidence::Coefficients {
            k_i: col_i,
            k_j: col_j,
        })?;
        self.pending_question = None;
        self.merge(
            pair,
            r,
            RatioSource::Coefficients {
                absorbed_attribute: name_i,
                k_absorbed: k_i,
                into_attribute: name_j,
                k_into: k_j,
            },
        )
    }

    fn merge(&mut self, (i, j): (usize, usize), r: f64, source: RatioSource) -> Result<()> {
        let merged = merge_attributes(&self.matrix, i, j, r)?;
        let before = self.frontier.len();
        let frontier = efficient_frontier(&merged.restrict(&self.frontier.surviving), self.epsilon)?;
        self.history.push(MergeRecord {
            absorbed: i,
            into: j,
            ratio: r,
            label: merged.columns()[if i < j { j - 1 } else { j }].label.clone(),
            source,
            frontier_before: before,
            frontier_after: frontier.len(),
        });
        self.matrix = merged;
        self.frontier = frontier.clone();
        self.log_eliminations(&frontier);
        self.refresh_status();
        Ok(())
    }

    fn log_eliminations(&mut self, frontier: &FrontierResult) {
        let step = self.history.len();
        for e in &frontier.eliminated {
            let w = self.matrix.plan(e.id).expect("known plan").w.clone();
            let dominator_w = self.matrix.plan(e.dominator).expect("known plan").w.clone();
            self.eliminations.push(EliminationEvent {
                id: e.id,
                dominator: e.dominator,
                step,
                w,
                dominator_w,
            });
        }
    }

    fn refresh_status(&mut self) {
        self.status = if self.is_decided() || self.matrix.column_count() <= 1 {
            self.pending_question = None;
            SessionStatus::Done
        } else if self.pending_question.is_some() {
            SessionStatus::AwaitingAnswer
        } else {
            SessionStatus::Active
        };
    }
}

fn answer_name(a: &Answer) -> &'static str {
    match a {
        Answer::Probability { .. } => "a probability",
        Answer::MatchingValue { .. } => "a matching value",
        Answer::DirectRatio { .. } => "a direct ratio",
    }
}
