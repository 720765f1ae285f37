//! Built-in instances and seeded generators shared by tests and benches.
//!
//! The fixed instances are small enough to verify by hand. The generators
//! derive everything from a single seed through the crate's stream
//! splitting, so a logged seed reproduces the exact instance.

use rand::Rng;

use crate::instance::Instance;
use crate::model::{IndependentPrior, Item, Prior, Realization, TabularPrior};
use crate::objectives::{
    compile_cascade, wrap_table_unchecked, CascadeEdge, CoverageObjective, Objective,
    SetFunctionTable, VersionSpaceObjective,
};
use crate::seed::{stream, Purpose};

/// Two items over ground `{a, b}`: item 0 covers `a` surely, item 1 covers
/// `b` in one of two equally likely states. Marginals at the start are 1.0
/// and 0.5.
pub fn two_item_coverage() -> Instance {
    two_item_coverage_with_costs(1.0, 1.0)
}

/// Same structure with explicit costs, for benefit-per-cost selection.
pub fn two_item_coverage_with_costs(c0: f64, c1: f64) -> Instance {
    let items = vec![
        Item::new(0, c0, vec!["on".into()]).with_label("item1"),
        Item::new(1, c1, vec!["good".into(), "bad".into()]).with_label("item2"),
    ];
    let prior = Prior::Independent(
        IndependentPrior::new(vec![vec![1.0], vec![0.5, 0.5]], &items).expect("valid factors"),
    );
    let objective = CoverageObjective::new(
        vec!["a".into(), "b".into()],
        None,
        vec![vec![vec![0]], vec![vec![1], vec![]]],
        &items,
    )
    .expect("valid coverage");
    Instance::new(
        "two-item-coverage",
        items,
        prior,
        Objective::Coverage(objective),
    )
}

/// Three equally likely hypotheses and two binary queries: query 0 isolates
/// h1, query 1 isolates h3. Both root marginals are 4/9 and the expected
/// identification cost of the greedy tree is 5/3.
pub fn three_hypotheses() -> Instance {
    let items = vec![
        Item::new(0, 1.0, vec!["a".into(), "b".into()]).with_label("q1"),
        Item::new(1, 1.0, vec!["a".into(), "b".into()]).with_label("q2"),
    ];
    let objective = VersionSpaceObjective::new(
        vec![
            ("h1".into(), 1.0 / 3.0),
            ("h2".into(), 1.0 / 3.0),
            ("h3".into(), 1.0 / 3.0),
        ],
        vec![vec![0, 1, 1], vec![0, 0, 1]],
        &items,
    )
    .expect("valid hypotheses");
    let prior = objective.induced_prior(&items).expect("valid prior");
    Instance::new(
        "three-hypotheses",
        items,
        prior,
        Objective::VersionSpace(objective),
    )
}

/// A two-node cascade with one edge of probability one half. Seeding the
/// source is worth 1.5 in expectation, the sink 1.0, and the sink is worth
/// nothing once observed active.
pub fn cascade_path() -> Instance {
    let edges = vec![CascadeEdge {
        from: 0,
        to: 1,
        p: 0.5,
    }];
    let (items, prior, objective) =
        compile_cascade(vec!["A".into(), "B".into()], edges, &Default::default())
            .expect("valid cascade");
    Instance::new("cascade-path", items, prior, Objective::Cascade(objective))
}

/// Two items worthless alone and worth 1 together. Violates the diminishing
/// returns property; the checker must produce a witness.
pub fn complementary_pair() -> Instance {
    let table = SetFunctionTable::new(2, vec![0.0, 0.0, 0.0, 1.0]).expect("valid table");
    let (items, prior, objective) = wrap_table_unchecked(table).expect("valid wrapper");
    Instance::new("complementary-pair", items, prior, objective)
}

/// A set function that decreases when the second item joins the first.
/// Violates monotonicity; the checker must produce a witness.
pub fn decreasing_pair() -> Instance {
    let table = SetFunctionTable::new(2, vec![0.0, 0.5, 0.5, 0.2]).expect("valid table");
    let (items, prior, objective) = wrap_table_unchecked(table).expect("valid wrapper");
    Instance::new("decreasing-pair", items, prior, objective)
}

/// A correlated coverage instance where one observation makes another
/// item's benefit surge. Not adaptive submodular, so stale queue entries
/// stop being upper bounds and the lazy engine picks a different item than
/// the naive engine on one branch.
pub fn correlated_surge() -> Instance {
    let items = vec![
        Item::new(0, 1.0, vec!["s".into()]).with_label("safe"),
        Item::new(1, 1.0, vec!["no".into(), "yes".into()]).with_label("probe"),
        Item::new(2, 1.0, vec!["no".into(), "yes".into()]).with_label("payoff"),
    ];
    let rows = vec![
        (Realization::from_states(vec![0, 0, 0]), 0.5),
        (Realization::from_states(vec![0, 1, 1]), 0.5),
    ];
    let prior = Prior::Tabular(TabularPrior::new(rows, &items, true).expect("valid prior"));
    let objective = CoverageObjective::new(
        vec!["a".into(), "b".into(), "c".into()],
        Some(vec![0.72, 0.8, 1.3]),
        vec![vec![vec![0]], vec![vec![1], vec![1]], vec![vec![], vec![2]]],
        &items,
    )
    .expect("valid coverage");
    Instance::new(
        "correlated-surge",
        items,
        prior,
        Objective::Coverage(objective),
    )
}

/// Random two-state coverage instance with 3 to 5 items. Small enough for
/// the exact oracles and the property checkers.
pub fn random_coverage_small(seed: u64) -> Instance {
    random_coverage(seed, 3..=5, 3..=6, 0.4, "coverage-small")
}

/// Random two-state coverage instance with 20 to 50 items, for engine
/// benchmarks. Far beyond oracle caps but exact under the factored
/// evaluation path.
pub fn random_coverage_large(seed: u64) -> Instance {
    random_coverage(seed, 20..=50, 30..=60, 0.15, "coverage-large")
}

fn random_coverage(
    seed: u64,
    items_range: std::ops::RangeInclusive<usize>,
    ground_range: std::ops::RangeInclusive<usize>,
    cover_p: f64,
    tag: &str,
) -> Instance {
    let mut rng = stream(seed, Purpose::Corpus, 0);
    let n = rng.gen_range(items_range);
    let g = rng.gen_range(ground_range);
    let ground: Vec<String> = (0..g).map(|i| format!("e{i}")).collect();
    let weights: Vec<f64> = (0..g).map(|_| rng.gen_range(0.5..2.0)).collect();
    let items: Vec<Item> = (0..n)
        .map(|i| Item::new(i, 1.0, vec!["s0".into(), "s1".into()]))
        .collect();
    let factors: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let p = rng.gen_range(0.1..0.9);
            vec![p, 1.0 - p]
        })
        .collect();
    let covers: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|_| {
            (0..2)
                .map(|_| (0..g).filter(|_| rng.gen_bool(cover_p)).collect())
                .collect()
        })
        .collect();
    let prior = Prior::Independent(IndependentPrior::new(factors, &items).expect("valid factors"));
    let objective =
        CoverageObjective::new(ground, Some(weights), covers, &items).expect("valid coverage");
    Instance::new(
        format!("{tag}-{seed}"),
        items,
        prior,
        Objective::Coverage(objective),
    )
}

/// Random small coverage instance paired with the largest quota feasible in
/// every realization. Coverage value is a function of the observations
/// alone, so reaching the quota is certifiable mid-run. Draws again with the
/// next stream counter until the quota is positive.
pub fn random_self_certifying(seed: u64) -> (Instance, f64) {
    for attempt in 0..64 {
        let mut rng = stream(seed, Purpose::Corpus, 1 + attempt);
        let n = rng.gen_range(3..=5usize);
        let g = rng.gen_range(3..=6usize);
        let ground: Vec<String> = (0..g).map(|i| format!("e{i}")).collect();
        let weights: Vec<f64> = (0..g).map(|_| rng.gen_range(0.5..2.0)).collect();
        let items: Vec<Item> = (0..n)
            .map(|i| Item::new(i, 1.0, vec!["s0".into(), "s1".into()]))
            .collect();
        let factors: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let p = rng.gen_range(0.2..0.8);
                vec![p, 1.0 - p]
            })
            .collect();
        let covers: Vec<Vec<Vec<usize>>> = (0..n)
            .map(|_| {
                (0..2)
                    .map(|_| (0..g).filter(|_| rng.gen_bool(0.5)).collect())
                    .collect()
            })
            .collect();
        let prior =
            Prior::Independent(IndependentPrior::new(factors, &items).expect("valid factors"));
        let objective =
            CoverageObjective::new(ground, Some(weights), covers, &items).expect("valid coverage");
        let instance = Instance::new(
            format!("self-certifying-{seed}"),
            items,
            prior,
            Objective::Coverage(objective),
        );
        let quota = instance
            .f_max(&Default::default())
            .map(|max| {
                // The quota must be attainable in EVERY realization, so take
                // the minimum full-selection value over the support.
                let ev = crate::objectives::Evaluator::exact(&instance.objective, &instance.prior)
                    .expect("evaluator");
                let rows = ev.support_rows().expect("support");
                let dom: Vec<usize> = (0..instance.items.len()).collect();
                rows.iter()
                    .map(|(phi, _)| {
                        instance
                            .objective
                            .value_with_realization(&dom, phi)
                            .expect("value")
                    })
                    .fold(max, f64::min)
            })
            .expect("enumeration");
        if quota > 0.1 {
            return (instance, quota);
        }
    }
    unreachable!("sixty-four consecutive uncoverable draws");
}

/// Random monotone coverage set function as an explicit table, for the
/// classic-greedy reduction tests.
pub fn random_monotone_table(seed: u64) -> SetFunctionTable {
    let mut rng = stream(seed, Purpose::Corpus, 2);
    let n = rng.gen_range(3..=6usize);
    let g = rng.gen_range(3..=8usize);
    let weights: Vec<f64> = (0..g).map(|_| rng.gen_range(0.5..2.0)).collect();
    let covers: Vec<Vec<usize>> = (0..n)
        .map(|_| (0..g).filter(|_| rng.gen_bool(0.4)).collect())
        .collect();
    SetFunctionTable::from_covers(&covers, &weights).expect("coverage tables are monotone")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_seed_deterministic() {
        let a = random_coverage_small(7);
        let b = random_coverage_small(7);
        assert_eq!(a.items.len(), b.items.len());
        assert_eq!(a.to_json_string().unwrap(), b.to_json_string().unwrap());
        let c = random_coverage_small(8);
        assert!(
            a.items.len() != c.items.len()
                || a.to_json_string().unwrap() != c.to_json_string().unwrap()
        );
    }

    #[test]
    fn self_certifying_quota_is_attainable_everywhere() {
        for seed in [1, 2, 3] {
            let (inst, quota) = random_self_certifying(seed);
            assert!(quota > 0.0);
            let ev = crate::objectives::Evaluator::exact(&inst.objective, &inst.prior).unwrap();
            assert!(ev.validate_quota(quota).is_ok());
        }
    }

    #[test]
    fn large_instances_hit_the_requested_range() {
        let inst = random_coverage_large(11);
        assert!((20..=50).contains(&inst.items.len()));
    }
}
