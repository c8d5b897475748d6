use crate::error::{Error, Result};
use crate::frontier::{ColumnDescriptor, ColumnMember, PlanMatrix, PlanRecord, RatioTree};

/// Folds column `absorbed` into column `into` using `ratio = k_absorbed / k_into`.
///
/// Every plan's `into` entry becomes `ratio · w_absorbed + w_into` and the
/// `absorbed` column is dropped, so the result has one column fewer. Column
/// indices above `absorbed` shift down by one. Values are not renormalised.
pub fn merge_attributes(
    matrix: &PlanMatrix,
    absorbed: usize,
    into: usize,
    ratio: f64,
) -> Result<PlanMatrix> {
    let n = matrix.column_count();
    for c in [absorbed, into] {
        if c >= n {
            return Err(Error::InactiveColumn(c));
        }
    }
    if absorbed == into {
        return Err(Error::SameColumn(absorbed));
    }
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::InvalidRatio(ratio));
    }

    let plans = matrix
        .plans()
        .iter()
        .map(|p| {
            let mut w = p.w.clone();
            w[into] = ratio * p.w[absorbed] + p.w[into];
            w.remove(absorbed);
            PlanRecord {
                id: p.id,
                label: p.label.clone(),
                w,
            }
        })
        .collect();

    let mut columns = matrix.columns().to_vec();
    let gone = columns[absorbed].clone();
    let target = &mut columns[into];
    let mut members: Vec<ColumnMember> = target.members.clone();
    members.extend(gone.members.iter().map(|m| ColumnMember {
        attribute: m.attribute,
        name: m.name.clone(),
        scale: m.scale * ratio,
    }));
    members.sort_by_key(|m| m.attribute);
    *target = ColumnDescriptor {
        label: members
            .iter()
            .map(|m| m.name.as_str())
            .collect::<Vec<_>>()
            .join("+"),
        members,
        ratio_tree: RatioTree::Merge {
            ratio,
            absorbed: Box::new(gone.ratio_tree),
            into: Box::new(target.ratio_tree.clone()),
        },
    };
    columns.remove(absorbed);
    PlanMatrix::new(plans, columns)
}
