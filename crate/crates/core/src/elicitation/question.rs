use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::utility::{format_number, AttrValue, ScaledAttribute};

/// Probes whose subutility is at or below this fall back to standard-gamble
/// questions.
pub const MIN_PROBE_UTILITY: f64 = 1e-9;

/// A question about the tradeoff between two active columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Question {
    /// Column indices `(i, j)`; answering leads to merging `i` into `j`.
    pub pair: (usize, usize),
    #[serde(flatten)]
    pub kind: QuestionKind,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum QuestionKind {
    /// Standard gamble: the indifference probability between the all-best /
    /// all-worst lottery and a sure outcome that is best on `attribute` and
    /// worst elsewhere equals that attribute's scaling constant.
    TypeI {
        attribute: usize,
        name: String,
        lottery_best: Vec<AttrValue>,
        lottery_worst: Vec<AttrValue>,
        certain: Vec<AttrValue>,
    },
    /// Matching: the level of `attribute_j` that compensates moving
    /// `attribute_i` from its worst level to `probe`.
    TypeII {
        attribute_i: usize,
        name_i: String,
        attribute_j: usize,
        name_j: String,
        probe: f64,
        probe_utility: f64,
    },
}

impl Question {
    pub fn type_i(pair: (usize, usize), attributes: &[ScaledAttribute], target: usize) -> Self {
        let best: Vec<AttrValue> = attributes.iter().map(|a| a.attribute.best.clone()).collect();
        let worst: Vec<AttrValue> = attributes.iter().map(|a| a.attribute.worst.clone()).collect();
        let mut certain = worst.clone();
        certain[target] = best[target].clone();
        let text = format!(
            "For what probability p are you indifferent between a lottery that yields either \
             the outcome {} with probability p and outcome {} with probability 1 - p, \
             and the certain outcome {}?",
            render_outcome(attributes, &best),
            render_outcome(attributes, &worst),
            render_outcome(attributes, &certain),
        );
        Question {
            pair,
            kind: QuestionKind::TypeI {
                attribute: target,
                name: attributes[target].name().to_string(),
                lottery_best: best,
                lottery_worst: worst,
                certain,
            },
            text,
        }
    }

    /// A matching question probing the midpoint of `attribute_i`'s range, or
    /// `None` when either attribute is not continuous or the probe carries no
    /// utility.
    pub fn type_ii(
        pair: (usize, usize),
        attributes: &[ScaledAttribute],
        attribute_i: usize,
        attribute_j: usize,
    ) -> Option<Self> {
        let a = &attributes[attribute_i].attribute;
        let b = &attributes[attribute_j].attribute;
        if !(is_continuous(a) && is_continuous(b)) {
            return None;
        }
        let probe = 0.5 * (a.worst.as_number()? + a.best.as_number()?);
        let probe_utility = attributes[attribute_i].eval(&probe.into()).ok()?;
        if probe_utility <= MIN_PROBE_UTILITY {
            return None;
        }
        let text = format!(
            "For what value of {nj} are you indifferent between an outcome with {ni} = {p} and \
             {nj} = {wj}, and an outcome with {ni} = {wi} and {nj} at that value, all other \
             attributes being equal?",
            ni = a.name,
            nj = b.name,
            p = format_number(probe),
            wi = a.worst,
            wj = b.worst,
        );
        Some(Question {
            pair,
            kind: QuestionKind::TypeII {
                attribute_i,
                name_i: a.name.clone(),
                attribute_j,
                name_j: b.name.clone(),
                probe,
                probe_utility,
            },
            text,
        })
    }
}

fn is_continuous(a: &crate::utility::Attribute) -> bool {
    a.kind == crate::utility::AttributeKind::Continuous
}

fn render_outcome(attributes: &[ScaledAttribute], values: &[AttrValue]) -> String {
    let parts: Vec<String> = attributes
        .iter()
        .zip(values)
        .map(|(a, v)| format!("{} = {}", a.name(), v))
        .collect();
    format!("⟨{}⟩", parts.join(", "))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Answer {
    /// Indifference probability for a standard-gamble question.
    Probability { p: f64 },
    /// The matching level for a matching question.
    MatchingValue { value: f64 },
    /// A tradeoff ratio `k_i / k_j` stated directly. Without `pair` it
    /// applies to the pending question's pair; with `pair` it merges that
    /// pair of active columns whatever is pending.
    DirectRatio {
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pair: Option<(usize, usize)>,
    },
}

/// A standard-gamble answer is the attribute's scaling constant.
pub fn coefficient_from_type1(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(p)
}

/// What a tradeoff ratio is computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioEvidence {
    /// Two assessed scaling constants.
    Coefficients { k_i: f64, k_j: f64 },
    /// A matching answer: `u_i(x'_i)` at the probe, `u_j(x'_j)` at the reply.
    Matching { u_i: f64, u_j: f64 },
}

/// `k_i / k_j`, either directly or as `u_j(x'_j) / u_i(x'_i)`.
pub fn ratio_from_answers(evidence: RatioEvidence) -> Result<f64> {
    match evidence {
        RatioEvidence::Coefficients { k_i, k_j } => {
            if k_j == 0.0 {
                return Err(Error::UndefinedRatio(
                    "the second attribute's coefficient is zero".into(),
                ));
            }
            Ok(k_i / k_j)
        }
        RatioEvidence::Matching { u_i, u_j } => {
            if u_i == 0.0 {
                return Err(Error::UndefinedRatio("the probe has zero subutility".into()));
            }
            Ok(u_j / u_i)
        }
    }
}
