//! Independent reference implementations used to check the library.
#![allow(dead_code)]

use std::path::PathBuf;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

/// Plans not dominated by anything, brute force over all ordered pairs.
/// A plan goes if another is `>=` everywhere and `>` somewhere, or equal to
/// it everywhere with a smaller index.
pub fn brute_frontier(rows: &[Vec<f64>]) -> Vec<usize> {
    let dominated = |p: usize| {
        (0..rows.len()).any(|q| {
            if q == p {
                return false;
            }
            let ge = rows[q].iter().zip(&rows[p]).all(|(a, b)| a >= b);
            let gt = rows[q].iter().zip(&rows[p]).any(|(a, b)| a > b);
            (ge && gt) || (ge && !gt && q < p)
        })
    };
    (0..rows.len()).filter(|&p| !dominated(p)).collect()
}

/// Midranks by counting: 1 + #greater + #ties/2.
pub fn count_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let greater = values.iter().filter(|w| *w > v).count() as f64;
            let ties = values
                .iter()
                .enumerate()
                .filter(|(j, w)| *j != i && *w == v)
                .count() as f64;
            1.0 + greater + ties / 2.0
        })
        .collect()
}

/// Sum of squared rank differences, the quantity the coefficient is an
/// affine function of.
pub fn rank_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Most conflicting column pair over the given rows: maximal squared rank
/// distance, first in lexicographic order on ties.
pub fn brute_min_rcc_pair(rows: &[Vec<f64>]) -> (usize, usize) {
    let n = rows[0].len();
    let ranks: Vec<Vec<f64>> = (0..n)
        .map(|c| count_ranks(&rows.iter().map(|r| r[c]).collect::<Vec<_>>()))
        .collect();
    let mut best = (0, 1);
    let mut best_d = f64::NEG_INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let d = rank_distance(&ranks[i], &ranks[j]);
            if d > best_d {
                best_d = d;
                best = (i, j);
            }
        }
    }
    best
}

/// Rows with column `i` folded into column `j` as `r * w_i + w_j`.
pub fn fold_columns(rows: &[Vec<f64>], i: usize, j: usize, r: f64) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|row| {
            let mut out = row.clone();
            out[j] = r * row[i] + row[j];
            out.remove(i);
            out
        })
        .collect()
}

pub fn dot(k: &[f64], w: &[f64]) -> f64 {
    k.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// Plans attaining the largest `k · w`.
pub fn argmax_set(rows: &[Vec<f64>], k: &[f64]) -> Vec<usize> {
    let eu: Vec<f64> = rows.iter().map(|r| dot(k, r)).collect();
    let best = eu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..rows.len()).filter(|&p| eu[p] == best).collect()
}
