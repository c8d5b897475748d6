//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tradeoff_core::elicitation::{
    merge_attributes, ratio_from_answers, Answer, ElicitationSession, QuestionKind, RatioEvidence,
};
use tradeoff_core::frontier::{efficient_frontier, rcc, select_merge_pair, PlanMatrix, Ranking};
use tradeoff_core::io::{parse_attributes_json, read_plans_csv};
use tradeoff_core::simharness::*;
use tradeoff_core::utility::*;

type Outcome_ = std::result::Result<String, String>;

fn check(cond: bool, ok: impl Into<String>, err: impl Into<String>) -> Outcome_ {
    if cond {
        Ok(ok.into())
    } else {
        Err(err.into())
    }
}

fn counterexample_fixture() -> Outcome_ {
    type Q = Ratio<i64>;
    let table: [(Q, Q, Q, Q); 3] = [
        (Q::new(1, 1), Q::new(0, 1), Q::new(1, 2), Q::new(1, 4)),
        (Q::new(0, 1), Q::new(1, 1), Q::new(1, 2), Q::new(1, 4)),
        (Q::new(1, 3), Q::new(1, 3), Q::new(0, 1), Q::new(1, 2)),
    ];
    let sum = |f: &dyn Fn(&(Q, Q, Q, Q)) -> Q| -> Q { table.iter().map(f).sum() };
    let exact = [
        sum(&|r| r.0 * r.2),
        sum(&|r| r.1 * r.2),
        sum(&|r| r.0 * r.3),
        sum(&|r| r.1 * r.3),
        sum(&|r| r.0 * r.1 * r.2),
        sum(&|r| r.0 * r.1 * r.3),
    ];
    let want = [
        Q::new(1, 2),
        Q::new(1, 2),
        Q::new(5, 12),
        Q::new(5, 12),
        Q::new(0, 1),
        Q::new(1, 18),
    ];
    if exact != want {
        return Err(format!("rational table gives {exact:?}"));
    }

    let y = Attribute::new("Y", AttributeKind::Discrete, "y2", "y1").unwrap();
    let z = Attribute::new("Z", AttributeKind::Discrete, "z1", "z2").unwrap();
    let third = 1.0 / 3.0;
    let subs = [
        SubutilityFunction::new(
            &y,
            SubutilityForm::Tabulated(vec![("y1".into(), 1.0), ("y2".into(), 0.0), ("y3".into(), third)]),
        )
        .unwrap(),
        SubutilityFunction::new(
            &z,
            SubutilityForm::Tabulated(vec![("z1".into(), 0.0), ("z2".into(), 1.0), ("z3".into(), third)]),
        )
        .unwrap(),
    ];
    let o = |a: &str, b: &str| Outcome(vec![a.into(), b.into()]);
    let f1 = Prospect::new(vec![(o("y1", "z1"), 0.5), (o("y2", "z2"), 0.5)]).unwrap();
    let f2 = Prospect::new(vec![(o("y1", "z1"), 0.25), (o("y2", "z2"), 0.25), (o("y3", "z3"), 0.5)])
        .unwrap();
    let w1 = expected_subutilities(&f1, &subs).unwrap();
    let w2 = expected_subutilities(&f2, &subs).unwrap();
    let model = MultilinearModel::product_of_two();
    let eu1 = multilinear_expected_utility(&f1, &model, &subs).unwrap();
    let eu2 = multilinear_expected_utility(&f2, &model, &subs).unwrap();
    let as_f64 = |q: Q| *q.numer() as f64 / *q.denom() as f64;
    let floats = [w1[0], w1[1], w2[0], w2[1], eu1, eu2];
    let worst = floats
        .iter()
        .zip(want)
        .map(|(x, q)| (x - as_f64(q)).abs())
        .fold(0.0, f64::max);
    if worst > 1e-12 {
        return Err(format!("float deviation {worst:e}"));
    }
    let componentwise = componentwise_dominates(&w1, &w2, 0.0).unwrap();
    let inferred = infer_overall_dominance(&w1, &w2, ModelClass::Multilinear, false).unwrap();
    check(
        componentwise == Relation::Strict
            && inferred.relation == Relation::None
            && inferred.basis == DominanceBasis::RefusedDependentMultilinear
            && eu2 > eu1,
        format!("w1={w1:?} w2={w2:?} E[u]: {eu1} < {eu2}; inference refused; max float error {worst:e}"),
        format!("componentwise {componentwise:?}, inferred {inferred:?}"),
    )
}

fn rcc_unit_values() -> Outcome_ {
    let a = Ranking(vec![1.0, 2.0, 3.0, 4.0]);
    let ab = rcc(&a, &Ranking(vec![1.0, 3.0, 4.0, 2.0])).unwrap();
    let ac = rcc(&a, &Ranking(vec![4.0, 2.0, 1.0, 3.0])).unwrap();
    check(
        ab == 0.4 && ac == -0.4,
        format!("rho(a,b) = {ab}, rho(a,c) = {ac}"),
        format!("rho(a,b) = {ab:?}, rho(a,c) = {ac:?}"),
    )
}

const HEADLINE_SEED: u64 = 42;

fn headline(report: &ExperimentReport) -> Vec<(&'static str, Outcome_)> {
    let rcc = report.summary(Strategy::Rcc).unwrap();
    let rand = report.summary(Strategy::Rand).unwrap();
    let beats = report.head_to_head(Strategy::Rcc, Strategy::Rand).unwrap().win_rate();
    let within = |name: &'static str, got: f64, target: f64, tol: f64| {
        let line = format!("{got:.4} (target {target} ± {tol})");
        (name, check((got - target).abs() <= tol, line.clone(), line))
    };
    vec![
        within("headline: RCC mean competitive ratio", rcc.mean_competitive_ratio, 0.89, 0.05),
        within("headline: RAND mean competitive ratio", rand.mean_competitive_ratio, 0.65, 0.07),
        within("headline: RCC beats RAND", beats, 0.85, 0.05),
        within("headline: RCC matches OPT", rcc.matches_opt, 0.37, 0.07),
        within("headline: RCC strictly above average", rcc.above_average, 0.92, 0.05),
    ]
}

fn anytime_curves(report: &AnytimeReport) -> Outcome_ {
    let rcc = report.curve(Strategy::Rcc);
    let rand = report.curve(Strategy::Rand);
    if rcc.len() != 6 || rand.len() != 6 {
        return Err(format!("curves have {} and {} points", rcc.len(), rand.len()));
    }
    let below = (1..=5).all(|s| rcc[s] <= rand[s]);
    let nonincreasing = |c: &[f64]| c.windows(2).all(|w| w[1] <= w[0]);
    let target = report.mean_argmax_set_size;
    let ends = rcc[5] == target && rand[5] == target;
    let fmt = |c: &[f64]| c.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" ");
    let line = format!(
        "RCC [{}] RAND [{}] argmax {target}",
        fmt(&rcc),
        fmt(&rand)
    );
    check(below && nonincreasing(&rcc) && nonincreasing(&rand) && ends, line.clone(), line)
}

fn frontier_oracle() -> Outcome_ {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for case in 0..1000 {
        let m = rng.random_range(1..=12);
        let n = rng.random_range(1..=5);
        // Every fourth case uses coarse levels so that ties and duplicates occur.
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        if case % 4 == 0 {
                            rng.random_range(0..=2) as f64 / 2.0
                        } else {
                            rng.random::<f64>()
                        }
                    })
                    .collect()
            })
            .collect();
        let got = efficient_frontier(&PlanMatrix::from_rows(rows.clone()).unwrap(), 0.0)
            .unwrap()
            .surviving;
        let want = brute_frontier(&rows);
        if got != want {
            return Err(format!("case {case}: {got:?} != {want:?}"));
        }
    }
    Ok("1000 instances identical to the pairwise oracle".into())
}

fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn additive_soundness() -> Outcome_ {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checks = 0usize;
    for case in 0..500 {
        let m = rng.random_range(2..=40);
        let n = rng.random_range(2..=6);
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
            .collect();
        let f = efficient_frontier(&PlanMatrix::from_rows(rows.clone()).unwrap(), 0.0).unwrap();
        for e in &f.eliminated {
            for _ in 0..100 {
                let k = random_weights(&mut rng, n);
                let lost = dot(&k, &rows[e.id]);
                let best = f
                    .surviving
                    .iter()
                    .map(|&s| dot(&k, &rows[s]))
                    .fold(f64::NEG_INFINITY, f64::max);
                if best < lost - 1e-12 {
                    return Err(format!("case {case}: plan {} beats every survivor", e.id));
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} (plan, k) checks"))
}

fn independence_property() -> Outcome_ {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(2..=4);
        let subs: Vec<SubutilityFunction> = (0..n)
            .map(|i| {
                let a = Attribute::new(format!("x{i}"), AttributeKind::Continuous, 0.0, 1.0).unwrap();
                let knee = (rng.random_range(0.05..0.95), rng.random::<f64>());
                SubutilityFunction::new(
                    &a,
                    SubutilityForm::PiecewiseLinear(vec![(0.0, 0.0), knee, (1.0, 1.0)]),
                )
                .unwrap()
            })
            .collect();
        let marginals: Vec<Vec<(AttrValue, f64)>> = (0..n)
            .map(|_| {
                let levels = rng.random_range(1..=3);
                let mut values: Vec<u32> = Vec::new();
                while values.len() < levels {
                    let v = rng.random_range(0..=32);
                    if !values.contains(&v) {
                        values.push(v);
                    }
                }
                let p = random_weights(&mut rng, levels);
                values
                    .into_iter()
                    .map(|v| AttrValue::Number(v as f64 / 32.0))
                    .zip(p)
                    .collect()
            })
            .collect();
        let raw = random_weights(&mut rng, (1 << n) - 1);
        let coefficients: BTreeMap<AttrSet, f64> = raw
            .into_iter()
            .enumerate()
            .map(|(b, k)| (AttrSet::from_bits(b as u64 + 1).unwrap(), k))
            .collect();
        let model = MultilinearModel::new(n, coefficients).unwrap();
        let prospect = Prospect::product(&marginals).unwrap();
        let w = expected_subutilities(&prospect, &subs).unwrap();
        let eu = multilinear_expected_utility(&prospect, &model, &subs).unwrap();
        let h = multilinear_aggregator_h(&w, &model).unwrap();
        worst = worst.max((eu - h).abs());
    }
    check(
        worst <= 1e-9,
        format!("200 product prospects, max |E[u] - h(w)| = {worst:e}"),
        format!("max |E[u] - h(w)| = {worst:e}"),
    )
}

fn mui_solver() -> Outcome_ {
    // The non-zero root of (1 + 0.4k)^2 = 1 + k: 0.16k^2 - 0.2k = 0.
    let quadratic = 0.2 / 0.16;
    let k = solve_multiplicative_k(&[0.4, 0.4]).unwrap();
    if (k - quadratic).abs() > 1e-9 || (k - 1.25).abs() > 1e-9 {
        return Err(format!("k(0.4, 0.4) = {k}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let n = rng.random_range(2..=8);
        let k_i: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..=1.0)).collect();
        let total: f64 = k_i.iter().sum();
        let model = MuiModel::new(k_i.clone()).map_err(|e| format!("case {case}: {e}"))?;
        let k = model.master_constant();
        let residual = model.residual().abs();
        worst = worst.max(residual);
        let sign_ok = if (total - 1.0).abs() <= 1e-12 {
            k == 0.0
        } else if total < 1.0 {
            k > 0.0
        } else {
            -1.0 < k && k < 0.0
        };
        if residual > 1e-9 || !sign_ok {
            return Err(format!("case {case}: k_i={k_i:?} k={k} residual={residual:e}"));
        }
    }
    Ok(format!("k(0.4, 0.4) = {k}; 1000 random vectors, max residual {worst:e}"))
}

fn full_merge_consistency() -> Outcome_ {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..500 {
        let m = rng.random_range(2..=60);
        let n = rng.random_range(2..=8);
        let inst = generate_instance(m, n, &mut rng);
        let mut matrix = inst.matrix();
        let mut frontier = efficient_frontier(&matrix, 0.0).unwrap();
        while matrix.column_count() > 1 {
            let (i, j) = if frontier.len() >= 2 {
                select_merge_pair(&matrix, &frontier).unwrap()
            } else {
                (0, 1)
            };
            let weight = |c: usize| {
                let member = &matrix.columns()[c].members[0];
                inst.k[member.attribute] / member.scale
            };
            let merged = merge_attributes(&matrix, i, j, weight(i) / weight(j)).unwrap();
            frontier = efficient_frontier(&merged.restrict(&frontier.surviving), 0.0).unwrap();
            matrix = merged;
        }
        let want = argmax_set(&inst.w, &inst.k);
        if frontier.surviving != want {
            return Err(format!("case {case}: {:?} != {want:?}", frontier.surviving));
        }
    }
    Ok("500 instances: single-column argmax equals the additive argmax".into())
}

fn dvt_substitute() -> Outcome_ {
    const EXPECTED: &str = "For what probability p are you indifferent between a lottery that yields either the outcome ⟨DEATH = 0, BLEED = 0, PE = 0, COST = 0⟩ with probability p and outcome ⟨DEATH = 1, BLEED = 1, PE = 1, COST = 50,000⟩ with probability 1 - p, and the certain outcome ⟨DEATH = 1, BLEED = 0, PE = 1, COST = 50,000⟩?";
    let table = read_plans_csv(read_fixture("dvt_plans.csv").as_bytes()).unwrap();
    let attrs = parse_attributes_json(&read_fixture("dvt_attrs.json")).unwrap();
    let mut session = ElicitationSession::start(table.plans, attrs, 0.0).unwrap();
    let q = session.next_question().unwrap();
    let is_bleed = matches!(&q.kind, QuestionKind::TypeI { name, .. } if name == "BLEED");
    let tokens = |s: &str| s.split_whitespace().map(str::to_owned).collect::<Vec<_>>();
    if !is_bleed || tokens(&q.text) != tokens(EXPECTED) {
        return Err(format!("question was {:?}: {}", q.kind, q.text));
    }
    let r = ratio_from_answers(RatioEvidence::Coefficients { k_i: 0.01, k_j: 0.02 }).unwrap();
    session.apply_answer(Answer::Probability { p: 0.01 }).unwrap();
    session.apply_answer(Answer::Probability { p: 0.02 }).unwrap();
    let merged = session.history().first().map(|h| h.ratio);
    check(
        r == 0.5 && merged == Some(0.5),
        "BLEED question text matches token for token; ratio 0.01/0.02 = 0.5",
        format!("ratio {r}, session merge {merged:?}"),
    )
}

fn determinism(first: &ExperimentReport, config: &TrialConfig) -> Outcome_ {
    let serial = run_first_merge_comparison(&config.clone().serial()).unwrap();
    let again = run_first_merge_comparison(config).unwrap();
    let fm = first.to_json();
    if serial.to_json() != fm || again.to_json() != fm {
        return Err("first-merge report differs between runs".into());
    }
    let any = TrialConfig::fixed(50, 6, 100, 7).unwrap();
    let a = run_anytime_experiment(&any).unwrap();
    let b = run_anytime_experiment(&any.clone().serial()).unwrap();
    let c = run_anytime_experiment(&any).unwrap();
    check(
        a.to_json() == b.to_json()
            && a.to_json() == c.to_json()
            && a.to_csv() == b.to_csv()
            && a.to_csv() == c.to_csv(),
        format!(
            "first-merge JSON ({} bytes) and anytime JSON/CSV identical across serial and parallel runs",
            fm.len()
        ),
        "anytime report differs between runs",
    )
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |name: &str, started: Instant, outcome: Outcome_| {
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name} ({secs:.1}s): {detail}");
            }
        }
    };

    let t = Instant::now();
    report("counterexample fixture", t, counterexample_fixture());
    let t = Instant::now();
    report("RCC unit values", t, rcc_unit_values());

    let t = Instant::now();
    let config = TrialConfig::new(Sizes::pooled_default(), 500, HEADLINE_SEED).unwrap();
    let first_merge = run_first_merge_comparison(&config).unwrap();
    for (name, outcome) in headline(&first_merge) {
        report(name, t, outcome);
    }

    let t = Instant::now();
    let anytime = run_anytime_experiment(&TrialConfig::fixed(50, 6, 500, HEADLINE_SEED).unwrap()).unwrap();
    report("anytime curves (50, 6)", t, anytime_curves(&anytime));

    let t = Instant::now();
    report("frontier oracle equivalence", t, frontier_oracle());
    let t = Instant::now();
    report("additive soundness of elimination", t, additive_soundness());
    let t = Instant::now();
    report("independence makes E[u] = h(w)", t, independence_property());
    let t = Instant::now();
    report("multiplicative constant solver", t, mui_solver());
    let t = Instant::now();
    report("full-merge consistency", t, full_merge_consistency());
    let t = Instant::now();
    report("DVT question text and ratio", t, dvt_substitute());
    let t = Instant::now();
    report("simulation determinism", t, determinism(&first_merge, &config));

    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} check(s) failed");
        ExitCode::FAILURE
    }
}
