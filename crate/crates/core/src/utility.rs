//! Attributes, subutility functions, prospects and the additive, multilinear
//! and multiplicative utility forms built on top of them.
//!
//! Every subutility is scaled so that the attribute's worst level maps to 0
//! and its best level to 1. A plan is summarised by its vector of expected
//! subutilities, one entry per attribute; the dominance checks at the bottom
//! of this module work on those vectors only.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SCALE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    Discrete,
    Continuous,
}

/// A level of an attribute: a number, or a symbolic label for discrete
/// attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Number(f64),
    Label(String),
}

impl AttrValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            AttrValue::Number(x) => Some(*x),
            AttrValue::Label(_) => None,
        }
    }
}

impl From<f64> for AttrValue {
    fn from(x: f64) -> Self {
        AttrValue::Number(x)
    }
}

impl From<&str> for AttrValue {
    fn from(s: &str) -> Self {
        AttrValue::Label(s.to_string())
    }
}

impl fmt::Display for AttrValue {
    /// Numbers print with thousands separators and no trailing zeros, so
    /// `50000.0` renders as `50,000`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Label(s) => f.write_str(s),
            AttrValue::Number(x) => f.write_str(&format_number(*x)),
        }
    }
}

pub(crate) fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let neg = x < 0.0;
    let abs = x.abs();
    let raw = if abs.fract() == 0.0 && abs < 1e15 {
        format!("{abs:.0}")
    } else {
        format!("{abs}")
    };
    let (int_part, frac_part) = match raw.split_once('.') {
        Some((i, f)) => (i.to_string(), Some(f.to_string())),
        None => (raw.clone(), None),
    };
    let mut grouped = String::new();
    for (idx, ch) in int_part.chars().enumerate() {
        if idx > 0 && (int_part.len() - idx) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&grouped);
    if let Some(frac) = frac_part {
        out.push('.');
        out.push_str(&frac);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
    /// Scaling anchor with subutility 0.
    pub worst: AttrValue,
    /// Scaling anchor with subutility 1.
    pub best: AttrValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl Attribute {
    pub fn new(
        name: impl Into<String>,
        kind: AttributeKind,
        worst: impl Into<AttrValue>,
        best: impl Into<AttrValue>,
    ) -> Result<Self> {
        let attr = Attribute {
            name: name.into(),
            kind,
            worst: worst.into(),
            best: best.into(),
            unit: None,
        };
        attr.validate()?;
        Ok(attr)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::InvalidAttribute("empty attribute name".into()));
        }
        if self.worst == self.best {
            return Err(Error::InvalidAttribute(format!(
                "`{}`: worst and best levels coincide",
                self.name
            )));
        }
        if self.kind == AttributeKind::Continuous {
            match (self.worst.as_number(), self.best.as_number()) {
                (Some(w), Some(b)) if w.is_finite() && b.is_finite() => {}
                _ => {
                    return Err(Error::InvalidAttribute(format!(
                        "`{}`: continuous anchors must be finite numbers",
                        self.name
                    )))
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "points", rename_all = "snake_case")]
pub enum SubutilityForm {
    /// Exact lookup; values are distinct.
    Tabulated(Vec<(AttrValue, f64)>),
    /// Linear interpolation between breakpoints with strictly increasing
    /// values. No extrapolation outside the first and last breakpoint.
    PiecewiseLinear(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubutilityFunction {
    pub owner: String,
    pub form: SubutilityForm,
}

impl SubutilityFunction {
    /// Builds and validates a subutility against the attribute it scales.
    pub fn new(attribute: &Attribute, form: SubutilityForm) -> Result<Self> {
        let f = SubutilityFunction {
            owner: attribute.name.clone(),
            form,
        };
        f.validate(attribute)?;
        Ok(f)
    }

    /// `u(x) = 1 - x` on `[0, 1]`, the usual form for a binary "bad event" attribute.
    pub fn binary_loss(attribute: &Attribute) -> Result<Self> {
        Self::new(
            attribute,
            SubutilityForm::Tabulated(vec![(0.0.into(), 1.0), (1.0.into(), 0.0)]),
        )
    }

    fn invalid(&self, reason: impl Into<String>) -> Error {
        Error::InvalidSubutility {
            attribute: self.owner.clone(),
            reason: reason.into(),
        }
    }

    pub fn validate(&self, attribute: &Attribute) -> Result<()> {
        if attribute.name != self.owner {
            return Err(self.invalid(format!("owned by `{}`", attribute.name)));
        }
        let utilities: Vec<f64> = match &self.form {
            SubutilityForm::Tabulated(points) => {
                if points.is_empty() {
                    return Err(self.invalid("no points"));
                }
                for (idx, (v, _)) in points.iter().enumerate() {
                    if points[..idx].iter().any(|(w, _)| w == v) {
                        return Err(self.invalid(format!("duplicate value {v}")));
                    }
                }
                points.iter().map(|(_, u)| *u).collect()
            }
            SubutilityForm::PiecewiseLinear(points) => {
                if points.len() < 2 {
                    return Err(self.invalid("need at least two breakpoints"));
                }
                if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                    return Err(self.invalid("breakpoints must be strictly increasing"));
                }
                points.iter().map(|(_, u)| *u).collect()
            }
        };
        if utilities.iter().any(|u| !(0.0..=1.0).contains(u)) {
            return Err(self.invalid("utilities must lie in [0, 1]"));
        }
        let at_worst = self.eval(&attribute.worst)?;
        let at_best = self.eval(&attribute.best)?;
        if at_worst.abs() > SCALE_TOL {
            return Err(self.invalid(format!("utility at worst level is {at_worst}, not 0")));
        }
        if (at_best - 1.0).abs() > SCALE_TOL {
            return Err(self.invalid(format!("utility at best level is {at_best}, not 1")));
        }
        Ok(())
    }

    pub fn eval(&self, value: &AttrValue) -> Result<f64> {
        let domain = || Error::Domain {
            attribute: self.owner.clone(),
            value: value.to_string(),
        };
        match &self.form {
            SubutilityForm::Tabulated(points) => points
                .iter()
                .find(|(v, _)| v == value)
                .map(|(_, u)| *u)
                .ok_or_else(domain),
            SubutilityForm::PiecewiseLinear(points) => {
                let x = value.as_number().ok_or_else(domain)?;
                let first = points[0];
                let last = points[points.len() - 1];
                if !(first.0..=last.0).contains(&x) {
                    return Err(domain());
                }
                let seg = points
                    .windows(2)
                    .find(|w| x <= w[1].0)
                    .expect("x lies within the breakpoint span");
                let (x0, u0) = seg[0];
                let (x1, u1) = seg[1];
                if x == x1 {
                    return Ok(u1);
                }
                Ok(u0 + (u1 - u0) * (x - x0) / (x1 - x0))
            }
        }
    }
}

/// An attribute together with its subutility, as read from an attribute
/// schema file: `{name, kind, worst, best, unit?, subutility: {type, points}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScaledAttribute", into = "RawScaledAttribute")]
pub struct ScaledAttribute {
    pub attribute: Attribute,
    pub subutility: SubutilityFunction,
}

impl ScaledAttribute {
    pub fn new(attribute: Attribute, form: SubutilityForm) -> Result<Self> {
        attribute.validate()?;
        let subutility = SubutilityFunction::new(&attribute, form)?;
        Ok(ScaledAttribute {
            attribute,
            subutility,
        })
    }

    pub fn name(&self) -> &str {
        &self.attribute.name
    }

    pub fn eval(&self, value: &AttrValue) -> Result<f64> {
        self.subutility.eval(value)
    }
}

#[derive(Serialize, Deserialize)]
struct RawScaledAttribute {
    #[serde(flatten)]
    attribute: Attribute,
    subutility: SubutilityForm,
}

impl TryFrom<RawScaledAttribute> for ScaledAttribute {
    type Error = Error;

    fn try_from(raw: RawScaledAttribute) -> Result<Self> {
        ScaledAttribute::new(raw.attribute, raw.subutility)
    }
}

impl From<ScaledAttribute> for RawScaledAttribute {
    fn from(a: ScaledAttribute) -> Self {
        RawScaledAttribute {
            attribute: a.attribute,
            subutility: a.subutility.form,
        }
    }
}

/// One attribute level per attribute, in problem order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome(pub Vec<AttrValue>);

/// A finite discrete distribution over outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(Outcome, f64)>", into = "Vec<(Outcome, f64)>")]
pub struct Prospect {
    support: Vec<(Outcome, f64)>,
}

impl Prospect {
    pub fn new(support: Vec<(Outcome, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidProspect("empty support".into()));
        }
        let n = support[0].0 .0.len();
        let mut total = 0.0;
        for (idx, (outcome, p)) in support.iter().enumerate() {
            if outcome.0.len() != n {
                return Err(Error::dims(n, outcome.0.len()));
            }
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::InvalidProspect(format!("probability {p} is negative")));
            }
            if support[..idx].iter().any(|(o, _)| o == outcome) {
                return Err(Error::InvalidProspect("duplicate outcome in support".into()));
            }
            total += p;
        }
        if (total - 1.0).abs() > SCALE_TOL {
            return Err(Error::InvalidProspect(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Prospect { support })
    }

    /// A prospect concentrated on one outcome.
    pub fn certain(outcome: Outcome) -> Self {
        Prospect {
            support: vec![(outcome, 1.0)],
        }
    }

    /// The joint distribution in which each attribute is drawn independently
    /// from its own marginal.
    pub fn product(marginals: &[Vec<(AttrValue, f64)>]) -> Result<Self> {
        let mut support = vec![(Vec::new(), 1.0)];
        for marginal in marginals {
            let mut next = Vec::with_capacity(support.len() * marginal.len());
            for (prefix, p) in &support {
                for (value, q) in marginal {
                    let mut values: Vec<AttrValue> = prefix.clone();
                    values.push(value.clone());
                    next.push((values, p * q));
                }
            }
            support = next;
        }
        Prospect::new(support.into_iter().map(|(v, p)| (Outcome(v), p)).collect())
    }

    /// `lambda * a + (1 - lambda) * b`, merging repeated outcomes.
    pub fn mixture(a: &Prospect, b: &Prospect, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidProspect(format!("mixing weight {lambda}")));
        }
        let mut support: Vec<(Outcome, f64)> = Vec::new();
        let weighted = a
            .support
            .iter()
            .map(|(o, p)| (o, lambda * p))
            .chain(b.support.iter().map(|(o, p)| (o, (1.0 - lambda) * p)));
        for (outcome, p) in weighted {
            match support.iter_mut().find(|(o, _)| o == outcome) {
                Some(slot) => slot.1 += p,
                None => support.push((outcome.clone(), p)),
            }
        }
        Prospect::new(support)
    }

    pub fn support(&self) -> &[(Outcome, f64)] {
        &self.support
    }

    pub fn dimension(&self) -> usize {
        self.support[0].0 .0.len()
    }
}

impl TryFrom<Vec<(Outcome, f64)>> for Prospect {
    type Error = Error;

    fn try_from(support: Vec<(Outcome, f64)>) -> Result<Self> {
        Prospect::new(support)
    }
}

impl From<Prospect> for Vec<(Outcome, f64)> {
    fn from(p: Prospect) -> Self {
        p.support
    }
}

fn check_subutilities(prospect: &Prospect, subutilities: &[SubutilityFunction]) -> Result<()> {
    if prospect.dimension() != subutilities.len() {
        return Err(Error::dims(subutilities.len(), prospect.dimension()));
    }
    Ok(())
}

/// Expected subutility of each attribute under `prospect`.
pub fn expected_subutilities(
    prospect: &Prospect,
    subutilities: &[SubutilityFunction],
) -> Result<Vec<f64>> {
    check_subutilities(prospect, subutilities)?;
    let mut w = vec![0.0; subutilities.len()];
    for (outcome, p) in prospect.support() {
        for ((wi, u), value) in w.iter_mut().zip(subutilities).zip(&outcome.0) {
            *wi += p * u.eval(value)?;
        }
    }
    Ok(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveModel {
    k: Vec<f64>,
}

impl AdditiveModel {
    pub fn new(k: Vec<f64>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::InvalidModel("no scaling constants".into()));
        }
        if k.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidModel("scaling constants must be non-negative".into()));
        }
        let total: f64 = k.iter().sum();
        if (total - 1.0).abs() > SCALE_TOL {
            return Err(Error::InvalidModel(format!(
                "scaling constants sum to {total}, not 1"
            )));
        }
        Ok(AdditiveModel { k })
    }

    pub fn weights(&self) -> &[f64] {
        &self.k
    }

    pub fn as_multilinear(&self) -> MultilinearModel {
        MultilinearModel {
            n: self.k.len(),
            coefficients: self
                .k
                .iter()
                .enumerate()
                .map(|(i, &k)| (AttrSet::singleton(i), k))
                .collect(),
        }
    }
}

/// `k · w`.
pub fn additive_expected_utility(model: &AdditiveModel, w: &[f64]) -> Result<f64> {
    if model.k.len() != w.len() {
        return Err(Error::dims(model.k.len(), w.len()));
    }
    Ok(model.k.iter().zip(w).map(|(k, w)| k * w).sum())
}

/// A nonempty set of attribute indices, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttrSet(u64);

impl AttrSet {
    pub const MAX_ATTRIBUTES: usize = 64;

    pub fn new(members: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &i in members {
            if i >= Self::MAX_ATTRIBUTES {
                return Err(Error::InvalidModel(format!("attribute index {i} out of range")));
            }
            bits |= 1 << i;
        }
        if bits == 0 {
            return Err(Error::InvalidModel("empty attribute subset".into()));
        }
        Ok(AttrSet(bits))
    }

    pub fn singleton(i: usize) -> Self {
        AttrSet(1 << i)
    }

    pub fn from_bits(bits: u64) -> Option<Self> {
        (bits != 0).then_some(AttrSet(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1 << i) != 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.0 & (1 << i) != 0)
    }

    /// Largest index plus one.
    fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    fn product(self, values: &[f64]) -> f64 {
        self.iter().map(|i| values[i]).product()
    }
}

/// `u(x) = Σ_Y k_Y Π_{i∈Y} u_i(x_i)` over nonempty attribute subsets `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearModel {
    n: usize,
    coefficients: BTreeMap<AttrSet, f64>,
}

impl MultilinearModel {
    /// Fails unless the coefficients sum to 1, i.e. the model scores the
    /// all-best outcome at exactly 1.
    pub fn new(n: usize, coefficients: BTreeMap<AttrSet, f64>) -> Result<Self> {
        if n == 0 || n > AttrSet::MAX_ATTRIBUTES {
            return Err(Error::InvalidModel(format!("unsupported attribute count {n}")));
        }
        if let Some(set) = coefficients.keys().find(|s| s.span() > n) {
            return Err(Error::InvalidModel(format!(
                "subset {:?} mentions attributes beyond {n}",
                set.iter().collect::<Vec<_>>()
            )));
        }
        if coefficients.values().any(|k| !k.is_finite()) {
            return Err(Error::InvalidModel("non-finite coefficient".into()));
        }
        let model = MultilinearModel { n, coefficients };
        let top = model.evaluate(&vec![1.0; n]);
        if (top - 1.0).abs() > SCALE_TOL {
            return Err(Error::InvalidModel(format!(
                "utility of the all-best outcome is {top}, not 1"
            )));
        }
        Ok(model)
    }

    /// The two-attribute product model `u = u_1 · u_2`.
    pub fn product_of_two() -> Self {
        let mut coefficients = BTreeMap::new();
        coefficients.insert(AttrSet(0b11), 1.0);
        MultilinearModel { n: 2, coefficients }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &BTreeMap<AttrSet, f64> {
        &self.coefficients
    }

    fn evaluate(&self, values: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .map(|(set, k)| k * set.product(values))
            .sum()
    }
}

/// `E[u]` for a multilinear `u`, taken over the full joint distribution.
pub fn multilinear_expected_utility(
    prospect: &Prospect,
    model: &MultilinearModel,
    subutilities: &[SubutilityFunction],
) -> Result<f64> {
    check_subutilities(prospect, subutilities)?;
    if model.n != subutilities.len() {
        return Err(Error::dims(model.n, subutilities.len()));
    }
    let mut total = 0.0;
    let mut values = vec![0.0; model.n];
    for (outcome, p) in prospect.support() {
        for ((slot, u), x) in values.iter_mut().zip(subutilities).zip(&outcome.0) {
            *slot = u.eval(x)?;
        }
        total += p * model.evaluate(&values);
    }
    Ok(total)
}

/// The multilinear polynomial evaluated at a vector of expected subutilities.
/// Under probabilistic independence this equals the expected utility.
pub fn multilinear_aggregator_h(w: &[f64], model: &MultilinearModel) -> Result<f64> {
    if w.len() != model.n {
        return Err(Error::dims(model.n, w.len()));
    }
    Ok(model.evaluate(w))
}

/// Multiplicative (or, at `k = 0`, additive) utility under mutual utility
/// independence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuiModel {
    k: f64,
    k_i: Vec<f64>,
}

impl MuiModel {
    pub fn new(k_i: Vec<f64>) -> Result<Self> {
        let k = solve_multiplicative_k(&k_i)?;
        Ok(MuiModel { k, k_i })
    }

    pub fn master_constant(&self) -> f64 {
        self.k
    }

    pub fn attribute_constants(&self) -> &[f64] {
        &self.k_i
    }

    /// `(1 + k) - Π(1 + k k_i)`.
    pub fn residual(&self) -> f64 {
        mui_residual(self.k, &self.k_i)
    }

    /// `k_Y = k^{|Y|-1} Π_{i∈Y} k_i` for every nonempty subset.
    pub fn to_multilinear(&self) -> Result<MultilinearModel> {
        let n = self.k_i.len();
        if n > 20 {
            return Err(Error::InvalidModel(format!(
                "refusing to expand {n} attributes into 2^{n} coefficients"
            )));
        }
        let mut coefficients = BTreeMap::new();
        for bits in 1u64..(1 << n) {
            let set = AttrSet(bits);
            let coef = self.k.powi(set.len() as i32 - 1) * set.product(&self.k_i);
            if coef != 0.0 {
                coefficients.insert(set, coef);
            }
        }
        Ok(MultilinearModel { n, coefficients })
    }
}

fn mui_residual(k: f64, k_i: &[f64]) -> f64 {
    (1.0 + k) - k_i.iter().map(|ki| 1.0 + k * ki).product::<f64>()
}

/// Solves `1 + k = Π(1 + k k_i)` for the master constant.
///
/// Returns 0 when the `k_i` sum to 1. Otherwise the nonzero root is found by
/// bisection on `(Π(1 + k k_i) - 1 - k) / k`, expanded through elementary
/// symmetric polynomials so the sign near `k = 0` is exact. The root is
/// positive when `Σ k_i < 1` and in `(-1, 0)` when `Σ k_i > 1`.
pub fn solve_multiplicative_k(k_i: &[f64]) -> Result<f64> {
    if k_i.len() < 2 {
        return Err(Error::InvalidModel("need at least two attributes".into()));
    }
    if let Some(bad) = k_i.iter().find(|&&x| !(x > 0.0 && x <= 1.0)) {
        return Err(Error::InvalidModel(format!(
            "attribute constant {bad} outside (0, 1]"
        )));
    }
    // e[d] = d-th elementary symmetric polynomial of k_i.
    let mut e = vec![0.0; k_i.len() + 1];
    e[0] = 1.0;
    for &x in k_i {
        for d in (1..e.len()).rev() {
            e[d] += e[d - 1] * x;
        }
    }
    let excess = e[1] - 1.0;
    if excess.abs() <= 1e-12 {
        return Ok(0.0);
    }
    // Horner evaluation of e_1 - 1 + e_2 k + ... + e_n k^{n-1}.
    let reduced = |k: f64| {
        let mut acc = 0.0;
        for d in (2..e.len()).rev() {
            acc = acc * k + e[d];
        }
        acc * k + excess
    };
    let (mut lo, mut hi) = if excess < 0.0 {
        let mut hi = 1.0;
        while reduced(hi) < 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::InvalidModel("no finite positive root".into()));
            }
        }
        (0.0, hi)
    } else {
        (-1.0, 0.0)
    };
    // Invariant on both branches: reduced(lo) <= 0 < reduced(hi).
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if reduced(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = if reduced(lo).abs() <= reduced(hi).abs() {
        lo
    } else {
        hi
    };
    if k <= -1.0 + 1e-12 {
        return Err(Error::InvalidModel(
            "the only root is k = -1; the constants admit no valid multiplicative form".into(),
        ));
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Strict,
    WeakEqual,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelClass {
    Additive,
    Multilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceBasis {
    Additive,
    MultilinearIndependent,
    RefusedDependentMultilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceVerdict {
    pub relation: Relation,
    pub basis: DominanceBasis,
}

/// Compares two expected-subutility vectors attribute by attribute.
pub fn componentwise_dominates(w_a: &[f64], w_b: &[f64], epsilon: f64) -> Result<Relation> {
    if w_a.len() != w_b.len() {
        return Err(Error::dims(w_a.len(), w_b.len()));
    }
    Ok(relation(w_a, w_b, epsilon))
}

pub(crate) fn relation(w_a: &[f64], w_b: &[f64], epsilon: f64) -> Relation {
    let mut all_ge = true;
    let mut any_gt = false;
    let mut all_eq = true;
    for (a, b) in w_a.iter().zip(w_b) {
        if *a < b - epsilon {
            all_ge = false;
        }
        if *a > b + epsilon {
            any_gt = true;
        }
        if (a - b).abs() > epsilon {
            all_eq = false;
        }
    }
    if all_eq {
        Relation::WeakEqual
    } else if all_ge && any_gt {
        Relation::Strict
    } else {
        Relation::None
    }
}

/// Lifts local (per-attribute) dominance to overall dominance where that is
/// sound: always for additive utilities, and for multilinear utilities only
/// when the plans' outcome distributions are declared independent.
pub fn infer_overall_dominance(
    w_a: &[f64],
    w_b: &[f64],
    model_class: ModelClass,
    independence_declared: bool,
) -> Result<DominanceVerdict> {
    let relation = componentwise_dominates(w_a, w_b, 0.0)?;
    Ok(match (model_class, independence_declared) {
        (ModelClass::Additive, _) => DominanceVerdict {
            relation,
            basis: DominanceBasis::Additive,
        },
        (ModelClass::Multilinear, true) => DominanceVerdict {
            relation,
            basis: DominanceBasis::MultilinearIndependent,
        },
        (ModelClass::Multilinear, false) => DominanceVerdict {
            relation: Relation::None,
            basis: DominanceBasis::RefusedDependentMultilinear,
        },
    })
}
