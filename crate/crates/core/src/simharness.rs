//! Monte-Carlo comparison of pair-selection strategies on random instances.
//!
//! Every trial owns an independent ChaCha8 stream: the generator is seeded
//! from the master seed and switched to stream number `trial index`. The
//! instance is drawn first, then any random pair choices, so every strategy
//! in a trial sees the same instance. Trials may run on the rayon pool;
//! results are collected in trial order and reduced sequentially, which keeps
//! reports bit-identical between serial and parallel runs.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elicitation::merge_attributes;
use crate::error::{Error, Result};
use crate::frontier::{efficient_frontier, select_merge_pair, FrontierResult, PlanMatrix};

/// Plan counts used by the pooled headline experiment.
pub const POOLED_M: [usize; 4] = [25, 50, 100, 200];
/// Attribute counts used by the pooled headline experiment.
pub const POOLED_N: [usize; 5] = [4, 5, 6, 7, 8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Strategy {
    Rcc,
    Rand,
    Opt,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Rcc, Strategy::Rand, Strategy::Opt];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Rcc => "RCC",
            Strategy::Rand => "RAND",
            Strategy::Opt => "OPT",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RCC" => Ok(Strategy::Rcc),
            "RAND" => Ok(Strategy::Rand),
            "OPT" => Ok(Strategy::Opt),
            other => Err(Error::Parse(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Which `(m, n)` each trial uses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Sizes {
    Fixed { m: usize, n: usize },
    /// Each trial draws `m` and `n` uniformly and independently from its
    /// own stream.
    Pooled { m: Vec<usize>, n: Vec<usize> },
}

impl Sizes {
    pub fn pooled_default() -> Self {
        Sizes::Pooled {
            m: POOLED_M.to_vec(),
            n: POOLED_N.to_vec(),
        }
    }

    fn validate(&self) -> Result<()> {
        let check = |m: usize, n: usize| {
            if m < 2 || n < 2 {
                Err(Error::Parse(format!("need m >= 2 and n >= 2, got m={m}, n={n}")))
            } else {
                Ok(())
            }
        };
        match self {
            Sizes::Fixed { m, n } => check(*m, *n),
            Sizes::Pooled { m, n } => {
                if m.is_empty() || n.is_empty() {
                    return Err(Error::Parse("empty size grid".into()));
                }
                m.iter()
                    .flat_map(|&mm| n.iter().map(move |&nn| (mm, nn)))
                    .try_for_each(|(mm, nn)| check(mm, nn))
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> (usize, usize) {
        match self {
            Sizes::Fixed { m, n } => (*m, *n),
            Sizes::Pooled { m, n } => {
                let mm = m[rng.random_range(0..m.len())];
                let nn = n[rng.random_range(0..n.len())];
                (mm, nn)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub sizes: Sizes,
    pub trials: usize,
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    /// Run trials on the rayon pool. Does not change the results.
    #[serde(skip)]
    pub parallel: bool,
}

impl TrialConfig {
    pub fn new(sizes: Sizes, trials: usize, seed: u64) -> Result<Self> {
        let config = TrialConfig {
            sizes,
            trials,
            seed,
            strategies: Strategy::ALL.to_vec(),
            parallel: true,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn fixed(m: usize, n: usize, trials: usize, seed: u64) -> Result<Self> {
        Self::new(Sizes::Fixed { m, n }, trials, seed)
    }

    pub fn serial(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.sizes.validate()?;
        if self.trials == 0 {
            return Err(Error::Parse("trials must be >= 1".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Parse("no strategies selected".into()));
        }
        Ok(())
    }

    fn strategies_sorted(&self) -> Vec<Strategy> {
        let mut s = self.strategies.clone();
        s.sort();
        s.dedup();
        s
    }

    fn run_trials<T: Send>(&self, f: impl Fn(usize, &mut ChaCha8Rng) -> T + Sync) -> Vec<T> {
        let one = |t: usize| f(t, &mut trial_rng(self.seed, t as u64));
        if self.parallel {
            (0..self.trials).into_par_iter().map(one).collect()
        } else {
            (0..self.trials).map(one).collect()
        }
    }
}

/// The generator for one trial: the master seed on stream `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Hidden weights and an `m × n` matrix of expected subutilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub k: Vec<f64>,
    pub w: Vec<Vec<f64>>,
}

impl Instance {
    pub fn m(&self) -> usize {
        self.w.len()
    }

    pub fn n(&self) -> usize {
        self.k.len()
    }

    pub fn matrix(&self) -> PlanMatrix {
        PlanMatrix::from_rows(self.w.clone()).expect("instance rows share a width")
    }

    pub fn expected_utility(&self, plan: usize) -> f64 {
        self.k.iter().zip(&self.w[plan]).map(|(k, w)| k * w).sum()
    }

    /// Plans attaining the maximal true expected utility.
    pub fn argmax_set(&self) -> Vec<usize> {
        let eu: Vec<f64> = (0..self.m()).map(|p| self.expected_utility(p)).collect();
        let best = eu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..self.m()).filter(|&p| eu[p] == best).collect()
    }
}

/// Weights uniform on `[0, 1]^n` normalised to sum 1, then the matrix
/// uniform on `[0, 1]^{m×n}` in row-major order.
pub fn generate_instance(m: usize, n: usize, rng: &mut impl Rng) -> Instance {
    let k = loop {
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        if raw.iter().any(|&x| x >= 1e-12) {
            let total: f64 = raw.iter().sum();
            break raw.into_iter().map(|x| x / total).collect::<Vec<f64>>();
        }
    };
    let w = (0..m)
        .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
        .collect();
    Instance { k, w }
}

/// Column pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn column_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// True weight of each active column: any member's weight over its scale.
fn column_weights(matrix: &PlanMatrix, k: &[f64]) -> Vec<f64> {
    matrix
        .columns()
        .iter()
        .map(|c| {
            let m = &c.members[0];
            k[m.attribute] / m.scale
        })
        .collect()
}

/// Merges `pair` with the true ratio and refilters the survivors.
fn merge_step(
    matrix: &PlanMatrix,
    frontier: &FrontierResult,
    k: &[f64],
    (i, j): (usize, usize),
) -> Result<(PlanMatrix, FrontierResult)> {
    let weights = column_weights(matrix, k);
    let merged = merge_attributes(matrix, i, j, weights[i] / weights[j])?;
    let next = efficient_frontier(&merged.restrict(&frontier.surviving), 0.0)?;
    Ok((merged, next))
}

/// Eliminations achieved by merging each column pair first, in
/// [`column_pairs`] order, measured against the given frontier.
pub fn pair_eliminations(
    matrix: &PlanMatrix,
    frontier: &FrontierResult,
    k: &[f64],
) -> Result<Vec<usize>> {
    let survivors = matrix.restrict(&frontier.surviving);
    column_pairs(matrix.column_count())
        .into_iter()
        .map(|pair| {
            let (_, next) = merge_step(&survivors, frontier, k, pair)?;
            Ok(frontier.len() - next.len())
        })
        .collect()
}

fn argmax_pair(eliminations: &[usize]) -> usize {
    let mut best = 0;
    for (idx, &e) in eliminations.iter().enumerate() {
        if e > eliminations[best] {
            best = idx;
        }
    }
    best
}

/// Eliminations from one first merge chosen by `strategy`, with the true
/// ratio, starting from the instance's efficient frontier. `rng` is only
/// used by [`Strategy::Rand`].
pub fn first_merge_eliminations(
    instance: &Instance,
    strategy: Strategy,
    rng: &mut impl Rng,
) -> Result<usize> {
    let matrix = instance.matrix();
    let frontier = efficient_frontier(&matrix, 0.0)?;
    if frontier.len() < 2 {
        return Ok(0);
    }
    let pairs = column_pairs(instance.n());
    let pair = match strategy {
        Strategy::Rcc => select_merge_pair(&matrix, &frontier)?,
        Strategy::Rand => pairs[rng.random_range(0..pairs.len())],
        Strategy::Opt => {
            let el = pair_eliminations(&matrix, &frontier, &instance.k)?;
            pairs[argmax_pair(&el)]
        }
    };
    let (_, next) = merge_step(&matrix, &frontier, &instance.k, pair)?;
    Ok(frontier.len() - next.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub strategy: Strategy,
    pub pair: Option<(usize, usize)>,
    pub eliminated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub m: usize,
    pub n: usize,
    pub initial_frontier: usize,
    pub opt_eliminated: usize,
    /// Mean eliminations over all column pairs.
    pub average_eliminated: f64,
    pub outcomes: Vec<StrategyOutcome>,
}

impl TrialRecord {
    pub fn eliminated(&self, strategy: Strategy) -> Option<usize> {
        self.outcomes
            .iter()
            .find(|o| o.strategy == strategy)
            .map(|o| o.eliminated)
    }
}

/// Strictly better than the all-pairs mean.
pub fn beats_average(eliminated: usize, average: f64) -> bool {
    eliminated as f64 > average
}

fn run_first_merge_trial(
    config: &TrialConfig,
    strategies: &[Strategy],
    trial: usize,
    rng: &mut ChaCha8Rng,
) -> TrialRecord {
    let (m, n) = config.sizes.draw(rng);
    let instance = generate_instance(m, n, rng);
    let matrix = instance.matrix();
    let frontier = efficient_frontier(&matrix, 0.0).expect("m >= 2");
    let pairs = column_pairs(n);
    let rand_pick = rng.random_range(0..pairs.len());

    let (eliminations, rcc_pair) = if frontier.len() >= 2 {
        let el = pair_eliminations(&matrix, &frontier, &instance.k).expect("valid instance");
        let rcc = select_merge_pair(&matrix, &frontier).expect("two survivors, two columns");
        (el, Some(rcc))
    } else {
        (vec![0; pairs.len()], None)
    };
    let opt_idx = argmax_pair(&eliminations);
    let lookup = |pair: (usize, usize)| eliminations[pairs.iter().position(|&p| p == pair).unwrap()];

    let outcomes = strategies
        .iter()
        .map(|&strategy| {
            let pair = match strategy {
                Strategy::Rcc => rcc_pair,
                Strategy::Rand => Some(pairs[rand_pick]),
                Strategy::Opt => Some(pairs[opt_idx]),
            };
            StrategyOutcome {
                strategy,
                pair,
                eliminated: pair.map_or(0, lookup),
            }
        })
        .collect();

    TrialRecord {
        trial,
        m,
        n,
        initial_frontier: frontier.len(),
        opt_eliminated: eliminations[opt_idx],
        average_eliminated: eliminations.iter().sum::<usize>() as f64 / eliminations.len() as f64,
        outcomes,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    /// Mean of `eliminated / OPT eliminated` over trials where OPT > 0.
    pub mean_competitive_ratio: f64,
    pub mean_eliminated: f64,
    /// Share of all trials with as many eliminations as OPT.
    pub matches_opt: f64,
    /// Share of all trials strictly above the all-pairs mean.
    pub above_average: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadToHead {
    pub strategy: Strategy,
    pub opponent: Strategy,
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

impl HeadToHead {
    pub fn win_rate(&self) -> f64 {
        self.wins as f64 / (self.wins + self.ties + self.losses) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: TrialConfig,
    pub trials: usize,
    /// Trials where no pair eliminated anything; left out of ratio means.
    pub excluded_trials: usize,
    pub strategies: Vec<StrategySummary>,
    pub head_to_head: Vec<HeadToHead>,
    pub records: Vec<TrialRecord>,
}

impl ExperimentReport {
    pub fn summary(&self, strategy: Strategy) -> Option<&StrategySummary> {
        self.strategies.iter().find(|s| s.strategy == strategy)
    }

    pub fn head_to_head(&self, strategy: Strategy, opponent: Strategy) -> Option<&HeadToHead> {
        self.head_to_head
            .iter()
            .find(|h| h.strategy == strategy && h.opponent == opponent)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// First-merge comparison: per trial, every strategy merges one pair of the
/// same instance and the eliminations are compared with OPT's.
pub fn run_first_merge_comparison(config: &TrialConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let strategies = config.strategies_sorted();
    let records = config.run_trials(|t, rng| run_first_merge_trial(config, &strategies, t, rng));

    let counted: Vec<&TrialRecord> = records.iter().filter(|r| r.opt_eliminated > 0).collect();
    let total = records.len() as f64;
    let summaries = strategies
        .iter()
        .map(|&s| {
            let el = |r: &TrialRecord| r.eliminated(s).unwrap_or(0);
            let ratio_sum: f64 = counted
                .iter()
                .map(|r| el(r) as f64 / r.opt_eliminated as f64)
                .sum();
            StrategySummary {
                strategy: s,
                mean_competitive_ratio: if counted.is_empty() {
                    f64::NAN
                } else {
                    ratio_sum / counted.len() as f64
                },
                mean_eliminated: records.iter().map(|r| el(r) as f64).sum::<f64>() / total,
                matches_opt: records.iter().filter(|r| el(r) == r.opt_eliminated).count() as f64
                    / total,
                above_average: records
                    .iter()
                    .filter(|r| beats_average(el(r), r.average_eliminated))
                    .count() as f64
                    / total,
            }
        })
        .collect();

    let mut head_to_head = Vec::new();
    for &a in &strategies {
        for &b in &strategies {
            if a == b {
                continue;
            }
            let mut h = HeadToHead {
                strategy: a,
                opponent: b,
                wins: 0,
                ties: 0,
                losses: 0,
            };
            for r in &records {
                match r.eliminated(a).cmp(&r.eliminated(b)) {
                    std::cmp::Ordering::Greater => h.wins += 1,
                    std::cmp::Ordering::Equal => h.ties += 1,
                    std::cmp::Ordering::Less => h.losses += 1,
                }
            }
            head_to_head.push(h);
        }
    }

    Ok(ExperimentReport {
        config: config.clone(),
        trials: records.len(),
        excluded_trials: records.len() - counted.len(),
        strategies: summaries,
        head_to_head,
        records,
    })
}

/// Frontier sizes after `0..=n-1` merges for one strategy in one trial.
fn anytime_curve(
    instance: &Instance,
    strategy: Strategy,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    let mut matrix = instance.matrix();
    let mut frontier = efficient_frontier(&matrix, 0.0)?;
    let mut sizes = vec![frontier.len()];
    while matrix.column_count() > 1 {
        let pairs = column_pairs(matrix.column_count());
        let pair = match strategy {
            Strategy::Rand => pairs[rng.random_range(0..pairs.len())],
            _ if frontier.len() < 2 => pairs[0],
            Strategy::Rcc => select_merge_pair(&matrix, &frontier)?,
            Strategy::Opt => {
                let el = pair_eliminations(&matrix, &frontier, &instance.k)?;
                pairs[argmax_pair(&el)]
            }
        };
        let (merged, next) = merge_step(&matrix, &frontier, &instance.k, pair)?;
        matrix = merged;
        frontier = next;
        sizes.push(frontier.len());
    }
    Ok(sizes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnytimeTrial {
    pub trial: usize,
    pub m: usize,
    pub n: usize,
    pub argmax_set_size: usize,
    pub curves: Vec<(Strategy, Vec<usize>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnytimePoint {
    pub merge_count: usize,
    pub strategy: Strategy,
    pub mean_frontier_size: f64,
    /// Trials that reached this merge count.
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnytimeReport {
    pub config: TrialConfig,
    pub mean_argmax_set_size: f64,
    pub points: Vec<AnytimePoint>,
    pub records: Vec<AnytimeTrial>,
}

impl AnytimeReport {
    /// Mean frontier sizes by merge count for one strategy.
    pub fn curve(&self, strategy: Strategy) -> Vec<f64> {
        self.points
            .iter()
            .filter(|p| p.strategy == strategy)
            .map(|p| p.mean_frontier_size)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// `merge_count,strategy,mean_frontier_size,trials`, one row per point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("merge_count,strategy,mean_frontier_size,trials\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.merge_count, p.strategy, p.mean_frontier_size, p.trials
            ));
        }
        out
    }
}

/// Repeated merging until one column is left, recording the frontier size
/// after every merge. RAND redraws its pair uniformly at each step.
pub fn run_anytime_experiment(config: &TrialConfig) -> Result<AnytimeReport> {
    config.validate()?;
    let strategies = config.strategies_sorted();
    let records: Vec<AnytimeTrial> = config
        .run_trials(|t, rng| -> Result<AnytimeTrial> {
            let (m, n) = config.sizes.draw(rng);
            let instance = generate_instance(m, n, rng);
            let mut curves = Vec::with_capacity(strategies.len());
            for &s in &strategies {
                curves.push((s, anytime_curve(&instance, s, rng)?));
            }
            Ok(AnytimeTrial {
                trial: t,
                m,
                n,
                argmax_set_size: instance.argmax_set().len(),
                curves,
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let max_len = records
        .iter()
        .flat_map(|r| r.curves.iter().map(|(_, c)| c.len()))
        .max()
        .unwrap_or(0);
    let mut points = Vec::new();
    for (si, &s) in strategies.iter().enumerate() {
        for step in 0..max_len {
            let sizes: Vec<usize> = records
                .iter()
                .filter_map(|r| r.curves[si].1.get(step).copied())
                .collect();
            if sizes.is_empty() {
                continue;
            }
            points.push(AnytimePoint {
                merge_count: step,
                strategy: s,
                mean_frontier_size: sizes.iter().sum::<usize>() as f64 / sizes.len() as f64,
                trials: sizes.len(),
            });
        }
    }
    let mean_argmax_set_size =
        records.iter().map(|r| r.argmax_set_size).sum::<usize>() as f64 / records.len() as f64;

    Ok(AnytimeReport {
        config: config.clone(),
        mean_argmax_set_size,
        points,
        records,
    })
}
