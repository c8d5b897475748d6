//! Plan matrices, efficient-frontier filtering, per-column rankings and the
//! rank-correlation pair selector.
//!
//! A plan is a row of expected subutilities, one per active column. Columns
//! start as single attributes and become groups as attributes are merged.
//! Under an additive utility any plan that is componentwise dominated by a
//! survivor can never be optimal, whatever the unknown weights are.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::utility::{relation, Relation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub id: usize,
    pub label: String,
    pub w: Vec<f64>,
}

/// An original attribute inside a (possibly merged) column.
///
/// The column value is `Σ scale · w_attribute` over its members, and each
/// member's true weight is the column's weight times its `scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMember {
    pub attribute: usize,
    pub name: String,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RatioTree {
    Attribute {
        name: String,
    },
    /// `ratio · absorbed + into`.
    Merge {
        ratio: f64,
        absorbed: Box<RatioTree>,
        into: Box<RatioTree>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDescriptor {
    pub label: String,
    pub members: Vec<ColumnMember>,
    pub ratio_tree: RatioTree,
}

impl ColumnDescriptor {
    pub fn attribute(index: usize, name: impl Into<String>) -> Self {
        let name = name.into();
        ColumnDescriptor {
            label: name.clone(),
            members: vec![ColumnMember {
                attribute: index,
                name: name.clone(),
                scale: 1.0,
            }],
            ratio_tree: RatioTree::Attribute { name },
        }
    }

    /// Scale of an original attribute within this column, if it is a member.
    pub fn scale_of(&self, attribute: usize) -> Option<f64> {
        self.members
            .iter()
            .find(|m| m.attribute == attribute)
            .map(|m| m.scale)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanMatrix {
    plans: Vec<PlanRecord>,
    columns: Vec<ColumnDescriptor>,
}

impl PlanMatrix {
    pub fn new(plans: Vec<PlanRecord>, columns: Vec<ColumnDescriptor>) -> Result<Self> {
        for plan in &plans {
            if plan.w.len() != columns.len() {
                return Err(Error::dims(columns.len(), plan.w.len()));
            }
            if plan.w.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidMatrix(format!(
                    "plan {} has a non-finite entry",
                    plan.id
                )));
            }
        }
        let mut ids: Vec<usize> = plans.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidMatrix("duplicate plan ids".into()));
        }
        Ok(PlanMatrix { plans, columns })
    }

    /// Rows of raw values with ids `0..m` and columns named `c0, c1, ...`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let columns = (0..n)
            .map(|i| ColumnDescriptor::attribute(i, format!("c{i}")))
            .collect();
        let plans = rows
            .into_iter()
            .enumerate()
            .map(|(id, w)| PlanRecord {
                id,
                label: format!("plan {id}"),
                w,
            })
            .collect();
        PlanMatrix::new(plans, columns)
    }

    pub fn plans(&self) -> &[PlanRecord] {
        &self.plans
    }

    pub fn columns(&self) -> &[ColumnDescriptor] {
        &self.columns
    }

    pub fn plan(&self, id: usize) -> Option<&PlanRecord> {
        self.plans.iter().find(|p| p.id == id)
    }

    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    /// Only the plans whose ids are listed, in matrix order.
    pub fn restrict(&self, ids: &[usize]) -> PlanMatrix {
        PlanMatrix {
            plans: self
                .plans
                .iter()
                .filter(|p| ids.contains(&p.id))
                .cloned()
                .collect(),
            columns: self.columns.clone(),
        }
    }

}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub id: usize,
    pub dominator: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierResult {
    /// Ascending plan ids.
    pub surviving: Vec<usize>,
    /// Ascending by eliminated id; every dominator is a survivor.
    pub eliminated: Vec<Elimination>,
}

impl FrontierResult {
    pub fn len(&self) -> usize {
        self.surviving.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surviving.is_empty()
    }
}

/// Componentwise-undominated plans.
///
/// A plan is eliminated when a survivor strictly dominates it, or when it
/// equals (within `epsilon`) a survivor with a lower id.
///
/// Plans are visited in descending order of coordinate sum, then descending
/// lexicographic order, then ascending id, and each is checked only against
/// the plans kept so far. With `epsilon = 0` a dominator always precedes the
/// plans it dominates in that order, so the result is exactly the pairwise
/// definition. With `epsilon > 0` the relation is no longer transitive and
/// the visiting order decides borderline cases.
pub fn efficient_frontier(matrix: &PlanMatrix, epsilon: f64) -> Result<FrontierResult> {
    if matrix.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidMatrix(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let plans = matrix.plans();
    let sums: Vec<f64> = plans.iter().map(|p| p.w.iter().sum()).collect();
    let mut order: Vec<usize> = (0..plans.len()).collect();
    order.sort_by(|&a, &b| {
        sums[b]
            .partial_cmp(&sums[a])
            .unwrap_or(Ordering::Equal)
            .then_with(|| lex_desc(&plans[a].w, &plans[b].w))
            .then_with(|| plans[a].id.cmp(&plans[b].id))
    });

    let mut kept: Vec<usize> = Vec::new();
    let mut eliminated = Vec::new();
    for &idx in &order {
        let candidate = &plans[idx];
        let dominator = kept.iter().find(|&&k| {
            let keeper = &plans[k];
            match relation(&keeper.w, &candidate.w, epsilon) {
                Relation::Strict => true,
                Relation::WeakEqual => keeper.id < candidate.id,
                Relation::None => false,
            }
        });
        match dominator {
            Some(&k) => eliminated.push(Elimination {
                id: candidate.id,
                dominator: plans[k].id,
            }),
            None => kept.push(idx),
        }
    }

    let mut surviving: Vec<usize> = kept.into_iter().map(|k| plans[k].id).collect();
    surviving.sort_unstable();
    eliminated.sort_by_key(|e| e.id);
    Ok(FrontierResult {
        surviving,
        eliminated,
    })
}

fn lex_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.partial_cmp(x) {
            Some(Ordering::Equal) | None => continue,
            Some(other) => return other,
        }
    }
    Ordering::Equal
}

/// Ranks over plans; rank 1 is the highest value, ties share the mean rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking(pub Vec<f64>);

impl Ranking {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn rank_column(values: &[f64]) -> Ranking {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let mid = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mid;
        }
        start = end;
    }
    Ranking(ranks)
}

/// `1 - 6 Σ (a_i - b_i)^2 / (m^3 - m)` over `m` ranked items.
pub fn rcc(a: &Ranking, b: &Ranking) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::dims(a.len(), b.len()));
    }
    let m = a.len();
    if m < 2 {
        return Err(Error::RankingTooShort(m));
    }
    let d2: f64 = a.0.iter().zip(&b.0).map(|(x, y)| (x - y) * (x - y)).sum();
    let m = m as f64;
    let denom = m * m * m - m;
    // One rounding step: exact for integer ranks whenever the true value is
    // representable.
    Ok((denom - 6.0 * d2) / denom)
}

/// Rankings of every active column, computed over the surviving plans only.
pub fn survivor_rankings(matrix: &PlanMatrix, frontier: &FrontierResult) -> Vec<Ranking> {
    let survivors: Vec<&PlanRecord> = matrix
        .plans()
        .iter()
        .filter(|p| frontier.surviving.binary_search(&p.id).is_ok())
        .collect();
    (0..matrix.column_count())
        .map(|c| {
            let values: Vec<f64> = survivors.iter().map(|p| p.w[c]).collect();
            rank_column(&values)
        })
        .collect()
}

/// RCC for every column pair `(i, j)` with `i < j`, in lexicographic order.
pub fn pairwise_rcc(matrix: &PlanMatrix, frontier: &FrontierResult) -> Result<Vec<((usize, usize), f64)>> {
    let n = matrix.column_count();
    if n < 2 {
        return Err(Error::TooFewColumns(n));
    }
    if frontier.len() < 2 {
        return Err(Error::TooFewSurvivors(frontier.len()));
    }
    let ranks = survivor_rankings(matrix, frontier);
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(((i, j), rcc(&ranks[i], &ranks[j])?));
        }
    }
    Ok(out)
}

/// The most conflicting column pair among the survivors: minimal RCC, ties
/// to the lexicographically smallest `(i, j)`.
pub fn select_merge_pair(matrix: &PlanMatrix, frontier: &FrontierResult) -> Result<(usize, usize)> {
    let scores = pairwise_rcc(matrix, frontier)?;
    let mut best = scores[0];
    for &(pair, rho) in &scores[1..] {
        if rho < best.1 {
            best = (pair, rho);
        }
    }
    Ok(best.0)
}
