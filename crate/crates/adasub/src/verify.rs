//! Ground-truth machinery: exhaustive property checkers and brute-force
//! optimal-policy oracles.
//!
//! The checkers enumerate every positive-mass partial realization and verify
//! the two properties the greedy guarantees rest on: benefits are never
//! negative, and benefits never grow as observations accumulate. The oracles
//! compute exact optima by memoized recursion over canonical observation
//! sets, and anchor every approximation-ratio test in the suite.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::{PolicyNode, PolicyTree};
use crate::model::{Caps, Item, ItemId, PartialRealization, Prior, Realization, StateId};
use crate::objectives::{stable_sum, Evaluator, Objective, SetFunctionTable};
use crate::{TOL_EXACT, TOL_SUM};

/// Which definition a check verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// Every conditional expected benefit is non-negative.
    Monotone,
    /// Benefits never increase as the observation set grows.
    Submodular,
}

/// One violation found by a checker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// The smaller observation set.
    pub partial: Vec<(ItemId, StateId)>,
    /// The larger observation set, for submodularity violations.
    pub extended: Option<Vec<(ItemId, StateId)>>,
    pub item: ItemId,
    pub benefit_at_partial: f64,
    pub benefit_at_extended: Option<f64>,
}

/// Result of an exhaustive property check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub property: Property,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
    pub pairs_checked: u64,
}

/// Result of a brute-force oracle.
#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Best expected value (maximization) or least expected cost (coverage).
    pub optimum: f64,
    pub policy: PolicyTree,
    /// Distinct memoized states visited.
    pub states_explored: u64,
}

/// All distinct positive-mass observation sets, canonically sorted.
fn positive_mass_partials(prior: &Prior, caps: &Caps) -> Result<Vec<Vec<(ItemId, StateId)>>> {
    let rows = crate::model::enumerate_support(prior, caps)?;
    let n = prior.item_count();
    if n >= 32 || (rows.len() as u128) << n > 1 << 26 {
        return Err(Error::TooLarge(format!(
            "{} items with {} support rows exceed the exhaustive-check range",
            n,
            rows.len()
        )));
    }
    let mut set: BTreeSet<Vec<(ItemId, StateId)>> = BTreeSet::new();
    for (phi, _) in &rows {
        for mask in 0u64..(1 << n) {
            let pairs: Vec<(ItemId, StateId)> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| (i, phi.state_of(i).expect("validated support")))
                .collect();
            set.insert(pairs);
            if set.len() as u64 > caps.psi_cap {
                return Err(Error::TooLarge(format!(
                    "more than {} positive-mass partial realizations",
                    caps.psi_cap
                )));
            }
        }
    }
    Ok(set.into_iter().collect())
}

type BenefitCache = HashMap<(Vec<(ItemId, StateId)>, ItemId), f64>;

fn benefit_at(
    evaluator: &Evaluator,
    cache: &mut BenefitCache,
    pairs: &[(ItemId, StateId)],
    item: ItemId,
) -> Result<f64> {
    let key = (pairs.to_vec(), item);
    if let Some(&v) = cache.get(&key) {
        return Ok(v);
    }
    let partial = PartialRealization::from_observations(pairs.to_vec())?;
    let value = evaluator.marginal(item, &partial)?.value;
    cache.insert(key, value);
    Ok(value)
}

/// Verifies that every benefit over every positive-mass observation set is
/// at least `-1e-12`.
pub fn check_adaptive_monotone(
    objective: &Objective,
    prior: &Prior,
    caps: &Caps,
) -> Result<CheckReport> {
    let evaluator = Evaluator::new(objective, prior, Default::default(), *caps)?;
    let partials = positive_mass_partials(prior, caps)?;
    let n = prior.item_count();
    let mut witnesses = Vec::new();
    let mut pairs_checked = 0u64;
    let mut cache = HashMap::new();
    for pairs in &partials {
        for item in 0..n {
            if pairs.iter().any(|&(i, _)| i == item) {
                continue;
            }
            let value = benefit_at(&evaluator, &mut cache, pairs, item)?;
            pairs_checked += 1;
            if value < -TOL_EXACT {
                witnesses.push(Witness {
                    partial: pairs.clone(),
                    extended: None,
                    item,
                    benefit_at_partial: value,
                    benefit_at_extended: None,
                });
            }
        }
    }
    Ok(CheckReport {
        property: Property::Monotone,
        passed: witnesses.is_empty(),
        witnesses,
        pairs_checked,
    })
}

/// Verifies that growing the observation set never increases a benefit by
/// more than `1e-12`.
pub fn check_adaptive_submodular(
    objective: &Objective,
    prior: &Prior,
    caps: &Caps,
) -> Result<CheckReport> {
    let evaluator = Evaluator::new(objective, prior, Default::default(), *caps)?;
    let partials = positive_mass_partials(prior, caps)?;
    let n = prior.item_count();
    let mut witnesses = Vec::new();
    let mut pairs_checked = 0u64;
    let mut cache = HashMap::new();
    for extended in &partials {
        let d = extended.len();
        // Every strict observation-subset of the larger set.
        for mask in 0u64..(1 << d) {
            if mask == (1 << d) - 1 {
                continue;
            }
            let smaller: Vec<(ItemId, StateId)> = (0..d)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| extended[i])
                .collect();
            for item in 0..n {
                if extended.iter().any(|&(i, _)| i == item) {
                    continue;
                }
                let at_extended = benefit_at(&evaluator, &mut cache, extended, item)?;
                let at_smaller = benefit_at(&evaluator, &mut cache, &smaller, item)?;
                pairs_checked += 1;
                if at_extended > at_smaller + TOL_EXACT {
                    witnesses.push(Witness {
                        partial: smaller.clone(),
                        extended: Some(extended.clone()),
                        item,
                        benefit_at_partial: at_smaller,
                        benefit_at_extended: Some(at_extended),
                    });
                }
            }
        }
    }
    Ok(CheckReport {
        property: Property::Submodular,
        passed: witnesses.is_empty(),
        witnesses,
        pairs_checked,
    })
}

fn row_consistent(phi: &Realization, pairs: &[(ItemId, StateId)]) -> bool {
    pairs
        .iter()
        .all(|&(i, s)| phi.state_of(i).map(|actual| actual == s).unwrap_or(false))
}

fn insert_sorted(
    pairs: &[(ItemId, StateId)],
    item: ItemId,
    state: StateId,
) -> Vec<(ItemId, StateId)> {
    let mut next = pairs.to_vec();
    let pos = next.partition_point(|&(i, _)| i < item);
    next.insert(pos, (item, state));
    next
}

struct OracleContext<'a> {
    objective: &'a Objective,
    rows: Vec<(Realization, f64)>,
    n: usize,
    costs: Vec<f64>,
    states_explored: u64,
}

impl<'a> OracleContext<'a> {
    fn new(objective: &'a Objective, prior: &Prior, caps: &Caps, costs: Vec<f64>) -> Result<Self> {
        let n = prior.item_count();
        if n > caps.oracle_items {
            return Err(Error::TooLarge(format!(
                "{} items exceed the oracle cap of {} (exponential policy space)",
                n, caps.oracle_items
            )));
        }
        let rows = crate::model::enumerate_support(prior, caps)?;
        if rows.len() > caps.oracle_support {
            return Err(Error::TooLarge(format!(
                "{} support realizations exceed the oracle cap of {}",
                rows.len(),
                caps.oracle_support
            )));
        }
        Ok(OracleContext {
            objective,
            rows,
            n,
            costs,
            states_explored: 0,
        })
    }

    fn consistent_indices(&self, pairs: &[(ItemId, StateId)]) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&r| row_consistent(&self.rows[r].0, pairs))
            .collect()
    }

    fn expected_value(&self, pairs: &[(ItemId, StateId)], rows: &[usize]) -> Result<f64> {
        let dom: Vec<ItemId> = pairs.iter().map(|&(i, _)| i).collect();
        let total = stable_sum(rows.iter().map(|&r| self.rows[r].1));
        let acc = stable_sum(
            rows.iter()
                .map(|&r| {
                    self.objective
                        .value_with_realization(&dom, &self.rows[r].0)
                        .map(|v| v * self.rows[r].1)
                })
                .collect::<Result<Vec<f64>>>()?,
        );
        Ok(acc / total)
    }

    /// Positive-posterior branch probabilities of `item` given `rows`.
    fn branches(&self, item: ItemId, rows: &[usize]) -> Vec<(StateId, f64)> {
        let mut by_state: std::collections::BTreeMap<StateId, Vec<f64>> = Default::default();
        for &r in rows {
            let state = self.rows[r].0.state_of(item).expect("validated support");
            by_state.entry(state).or_default().push(self.rows[r].1);
        }
        let total = stable_sum(rows.iter().map(|&r| self.rows[r].1));
        by_state
            .into_iter()
            .map(|(s, ws)| (s, stable_sum(ws) / total))
            .collect()
    }
}

type MaxMemo = HashMap<(Vec<(ItemId, StateId)>, usize), (f64, Option<ItemId>)>;

fn oracle_max_value(
    ctx: &mut OracleContext,
    memo: &mut MaxMemo,
    pairs: &[(ItemId, StateId)],
    remaining: usize,
) -> Result<(f64, Option<ItemId>)> {
    if let Some(hit) = memo.get(&(pairs.to_vec(), remaining)) {
        return Ok(*hit);
    }
    let rows = ctx.consistent_indices(pairs);
    let stop_value = ctx.expected_value(pairs, &rows)?;
    let mut best = (stop_value, None);
    if remaining > 0 {
        for item in 0..ctx.n {
            if pairs.iter().any(|&(i, _)| i == item) {
                continue;
            }
            let mut continuation = 0.0;
            for (state, p) in ctx.branches(item, &rows) {
                let next = insert_sorted(pairs, item, state);
                let (v, _) = oracle_max_value(ctx, memo, &next, remaining - 1)?;
                continuation += p * v;
            }
            if continuation > best.0 {
                best = (continuation, Some(item));
            }
        }
    }
    ctx.states_explored += 1;
    memo.insert((pairs.to_vec(), remaining), best);
    Ok(best)
}

fn rebuild_max_policy(
    ctx: &OracleContext,
    memo: &MaxMemo,
    pairs: &[(ItemId, StateId)],
    remaining: usize,
) -> PolicyNode {
    match memo.get(&(pairs.to_vec(), remaining)) {
        Some((_, Some(item))) => {
            let rows = ctx.consistent_indices(pairs);
            let children = ctx
                .branches(*item, &rows)
                .into_iter()
                .map(|(state, _)| {
                    let next = insert_sorted(pairs, *item, state);
                    (state, rebuild_max_policy(ctx, memo, &next, remaining - 1))
                })
                .collect();
            PolicyNode::Decision {
                item: *item,
                children,
            }
        }
        _ => PolicyNode::Leaf,
    }
}

/// Exact maximum expected value over all adaptive policies making at most
/// `k` selections. Exponential; capped at 8 items and 64 support rows.
pub fn oracle_max(
    objective: &Objective,
    prior: &Prior,
    k: usize,
    caps: &Caps,
) -> Result<OracleResult> {
    oracle_max_from(objective, prior, &PartialRealization::empty(), k, caps)
}

/// [`oracle_max`] starting from an existing observation set: the best
/// expected value over continuations making at most `k` further selections.
pub fn oracle_max_from(
    objective: &Objective,
    prior: &Prior,
    partial: &PartialRealization,
    k: usize,
    caps: &Caps,
) -> Result<OracleResult> {
    let mut ctx = OracleContext::new(objective, prior, caps, Vec::new())?;
    let start = partial.canonical();
    if ctx.consistent_indices(&start).is_empty() {
        return Err(Error::InconsistentObservation);
    }
    let mut memo = MaxMemo::new();
    let (optimum, _) = oracle_max_value(&mut ctx, &mut memo, &start, k)?;
    let policy = PolicyTree {
        root: rebuild_max_policy(&ctx, &memo, &start, k),
    };
    Ok(OracleResult {
        optimum,
        policy,
        states_explored: ctx.states_explored,
    })
}

type CoverMemo = HashMap<Vec<(ItemId, StateId)>, (f64, Option<ItemId>)>;

fn covered(
    ctx: &OracleContext,
    pairs: &[(ItemId, StateId)],
    rows: &[usize],
    quota: f64,
) -> Result<bool> {
    let dom: Vec<ItemId> = pairs.iter().map(|&(i, _)| i).collect();
    for &r in rows {
        if ctx.objective.value_with_realization(&dom, &ctx.rows[r].0)? < quota - TOL_SUM {
            return Ok(false);
        }
    }
    Ok(true)
}

fn oracle_cover_cost(
    ctx: &mut OracleContext,
    memo: &mut CoverMemo,
    pairs: &[(ItemId, StateId)],
    quota: f64,
) -> Result<(f64, Option<ItemId>)> {
    if let Some(hit) = memo.get(pairs) {
        return Ok(*hit);
    }
    let rows = ctx.consistent_indices(pairs);
    let result = if covered(ctx, pairs, &rows, quota)? {
        (0.0, None)
    } else {
        let mut best: Option<(f64, ItemId)> = None;
        for item in 0..ctx.n {
            if pairs.iter().any(|&(i, _)| i == item) {
                continue;
            }
            let mut cost = ctx.costs[item];
            for (state, p) in ctx.branches(item, &rows) {
                let next = insert_sorted(pairs, item, state);
                let (c, _) = oracle_cover_cost(ctx, memo, &next, quota)?;
                cost += p * c;
            }
            let better = match best {
                None => true,
                Some((b, _)) => cost < b,
            };
            if better {
                best = Some((cost, item));
            }
        }
        match best {
            Some((cost, item)) => (cost, Some(item)),
            None => {
                return Err(Error::InfeasibleQuota {
                    quota,
                    realization: format!("{:?}", pairs),
                })
            }
        }
    };
    ctx.states_explored += 1;
    memo.insert(pairs.to_vec(), result);
    Ok(result)
}

fn rebuild_cover_policy(
    ctx: &OracleContext,
    memo: &CoverMemo,
    pairs: &[(ItemId, StateId)],
) -> PolicyNode {
    match memo.get(pairs) {
        Some((_, Some(item))) => {
            let rows = ctx.consistent_indices(pairs);
            let children = ctx
                .branches(*item, &rows)
                .into_iter()
                .map(|(state, _)| {
                    let next = insert_sorted(pairs, *item, state);
                    (state, rebuild_cover_policy(ctx, memo, &next))
                })
                .collect();
            PolicyNode::Decision {
                item: *item,
                children,
            }
        }
        _ => PolicyNode::Leaf,
    }
}

/// Exact minimum expected cost over adaptive policies that certifiably reach
/// `quota` on every branch. Caps as [`oracle_max`].
pub fn oracle_cover(
    items: &[Item],
    objective: &Objective,
    prior: &Prior,
    quota: f64,
    caps: &Caps,
) -> Result<OracleResult> {
    let evaluator = Evaluator::new(objective, prior, Default::default(), *caps)?;
    evaluator.validate_quota(quota)?;
    let costs: Vec<f64> = items.iter().map(|it| it.cost).collect();
    let mut ctx = OracleContext::new(objective, prior, caps, costs)?;
    let mut memo = CoverMemo::new();
    let start = Vec::new();
    let (optimum, _) = oracle_cover_cost(&mut ctx, &mut memo, &start, quota)?;
    let policy = PolicyTree {
        root: rebuild_cover_policy(&ctx, &memo, &start),
    };
    Ok(OracleResult {
        optimum,
        policy,
        states_explored: ctx.states_explored,
    })
}

/// Standard non-adaptive greedy on an explicit set function. Ties break
/// toward the lowest item id.
pub fn classic_greedy(table: &SetFunctionTable, k: usize) -> Vec<ItemId> {
    let n = table.item_count();
    let mut chosen = Vec::new();
    let mut mask: usize = 0;
    for _ in 0..k.min(n) {
        let current = table.value_of_mask(mask);
        let mut best: Option<(f64, usize)> = None;
        for item in 0..n {
            if mask & (1 << item) != 0 {
                continue;
            }
            let gain = table.value_of_mask(mask | (1 << item)) - current;
            let better = match best {
                None => true,
                Some((g, _)) => gain > g,
            };
            if better {
                best = Some((gain, item));
            }
        }
        let Some((_, item)) = best else { break };
        chosen.push(item);
        mask |= 1 << item;
    }
    chosen
}

/// The smallest strictly positive one-item value increase anywhere on the
/// instance: the minimum over realizations, selection sets, and items of
/// `f(S + e) - f(S)` among increases larger than [`crate::TOL_EXACT`]. This
/// granularity constant sets the allowance in the coverage-ratio check.
/// Exponential; capped like the oracles.
pub fn min_positive_increment(objective: &Objective, prior: &Prior, caps: &Caps) -> Result<f64> {
    let n = prior.item_count();
    if n > caps.oracle_items {
        return Err(Error::TooLarge(format!(
            "{} items exceed the oracle cap of {}",
            n, caps.oracle_items
        )));
    }
    let rows = crate::model::enumerate_support(prior, caps)?;
    let mut smallest = f64::INFINITY;
    for (phi, _) in &rows {
        for mask in 0u64..(1 << n) {
            let dom: Vec<ItemId> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let base = objective.value_with_realization(&dom, phi)?;
            for item in 0..n {
                if mask & (1 << item) != 0 {
                    continue;
                }
                let mut extended = dom.clone();
                extended.push(item);
                let step = objective.value_with_realization(&extended, phi)? - base;
                if step > TOL_EXACT && step < smallest {
                    smallest = step;
                }
            }
        }
    }
    if smallest.is_finite() {
        Ok(smallest)
    } else {
        Err(Error::InvalidInstance(
            "no item ever increases the objective".into(),
        ))
    }
}

/// The exact quota gap: the distance from `quota` down to the largest value
/// any selection can reach without being counted as covered. This is the
/// resolution constant used when certifying coverage.
pub fn quota_gap(objective: &Objective, prior: &Prior, quota: f64, caps: &Caps) -> Result<f64> {
    let n = prior.item_count();
    if n > caps.oracle_items {
        return Err(Error::TooLarge(format!(
            "{} items exceed the oracle cap of {}",
            n, caps.oracle_items
        )));
    }
    let rows = crate::model::enumerate_support(prior, caps)?;
    let mut best_below = f64::NEG_INFINITY;
    for (phi, _) in &rows {
        for mask in 0u64..(1 << n) {
            let dom: Vec<ItemId> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let v = objective.value_with_realization(&dom, phi)?;
            if v < quota - TOL_SUM && v > best_below {
                best_below = v;
            }
        }
    }
    Ok(if best_below.is_finite() {
        quota - best_below
    } else {
        quota
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::objectives::make_deterministic;

    #[test]
    fn coverage_pair_passes_both_checks() {
        let inst = corpus::two_item_coverage();
        let caps = Caps::default();
        let mono = check_adaptive_monotone(&inst.objective, &inst.prior, &caps).unwrap();
        assert!(mono.passed);
        assert!(mono.pairs_checked > 0);
        let sub = check_adaptive_submodular(&inst.objective, &inst.prior, &caps).unwrap();
        assert!(sub.passed, "{:?}", sub.witnesses);
    }

    #[test]
    fn decreasing_function_fails_monotonicity() {
        let inst = corpus::decreasing_pair();
        let report =
            check_adaptive_monotone(&inst.objective, &inst.prior, &Caps::default()).unwrap();
        assert!(!report.passed);
        assert!(!report.witnesses.is_empty());
        assert!(report.witnesses[0].benefit_at_partial < -TOL_EXACT);
    }

    #[test]
    fn complementary_items_fail_submodularity() {
        let inst = corpus::complementary_pair();
        let report =
            check_adaptive_submodular(&inst.objective, &inst.prior, &Caps::default()).unwrap();
        assert!(!report.passed);
        let w = &report.witnesses[0];
        assert!(w.partial.is_empty());
        assert_eq!(w.extended.as_ref().map(|e| e.len()), Some(1));
        assert!(w.benefit_at_extended.unwrap() > w.benefit_at_partial);
    }

    #[test]
    fn modular_function_passes_both_checks() {
        let table =
            SetFunctionTable::new(3, (0u32..8).map(|m| m.count_ones() as f64).collect()).unwrap();
        let (_items, prior, objective) = make_deterministic(table).unwrap();
        let caps = Caps::default();
        assert!(
            check_adaptive_monotone(&objective, &prior, &caps)
                .unwrap()
                .passed
        );
        assert!(
            check_adaptive_submodular(&objective, &prior, &caps)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn oracle_max_matches_hand_computation() {
        let inst = corpus::two_item_coverage();
        let caps = Caps::default();
        let r0 = oracle_max(&inst.objective, &inst.prior, 0, &caps).unwrap();
        assert_eq!(r0.optimum, 0.0);
        assert!(r0.policy.is_empty());
        let r1 = oracle_max(&inst.objective, &inst.prior, 1, &caps).unwrap();
        assert!((r1.optimum - 1.0).abs() < TOL_EXACT);
        let r2 = oracle_max(&inst.objective, &inst.prior, 2, &caps).unwrap();
        assert!((r2.optimum - 1.5).abs() < TOL_EXACT);
        assert!(r2.states_explored > 0);
    }

    #[test]
    fn oracle_cover_matches_hand_computation() {
        let inst = corpus::three_hypotheses();
        let caps = Caps::default();
        let r = oracle_cover(&inst.items, &inst.objective, &inst.prior, 1.0, &caps).unwrap();
        assert!((r.optimum - 5.0 / 3.0).abs() < TOL_EXACT);

        let pair = corpus::two_item_coverage();
        let r = oracle_cover(&pair.items, &pair.objective, &pair.prior, 1.0, &caps).unwrap();
        assert!((r.optimum - 1.0).abs() < TOL_EXACT);
    }

    #[test]
    fn oracle_cover_rejects_nonpositive_quota() {
        let inst = corpus::two_item_coverage();
        let err = oracle_cover(
            &inst.items,
            &inst.objective,
            &inst.prior,
            0.0,
            &Caps::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn oracle_caps_reject_large_instances() {
        let inst = corpus::random_coverage_large(11);
        let err = oracle_max(&inst.objective, &inst.prior, 2, &Caps::default()).unwrap_err();
        assert!(matches!(err, Error::TooLarge(_)));
    }

    #[test]
    fn classic_greedy_reference_cases() {
        let modular =
            SetFunctionTable::new(3, (0u32..8).map(|m| m.count_ones() as f64).collect()).unwrap();
        assert_eq!(classic_greedy(&modular, 2), vec![0, 1]);
        assert_eq!(classic_greedy(&modular, 0), Vec::<usize>::new());

        // Covers {a,b}, {b}, {c}: gains 2, then 1 from the third item.
        let table =
            SetFunctionTable::from_covers(&[vec![0, 1], vec![1], vec![2]], &[1.0, 1.0, 1.0])
                .unwrap();
        assert_eq!(classic_greedy(&table, 2), vec![0, 2]);
    }

    #[test]
    fn quota_gap_is_exact_on_the_identification_instance() {
        let inst = corpus::three_hypotheses();
        let gap = quota_gap(&inst.objective, &inst.prior, 1.0, &Caps::default()).unwrap();
        assert!((gap - 1.0 / 3.0).abs() < TOL_SUM, "gap {gap}");
    }

    #[test]
    fn smallest_increment_is_the_final_identification_step() {
        let inst = corpus::three_hypotheses();
        let step = min_positive_increment(&inst.objective, &inst.prior, &Caps::default()).unwrap();
        // Jumps are 1 (isolating in one query), 2/3 (halving the rivals),
        // and 1/3 (the second query after an uninformative first answer).
        assert!((step - 1.0 / 3.0).abs() < TOL_SUM, "step {step}");

        let pair = corpus::two_item_coverage();
        let step = min_positive_increment(&pair.objective, &pair.prior, &Caps::default()).unwrap();
        assert_eq!(step, 1.0);
    }
}
