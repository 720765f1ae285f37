//! Adaptive greedy policy construction and evaluation.
//!
//! A policy is a decision tree: each internal node names the item selected
//! there and branches on the observed state. [`build_policy`] grows the tree
//! by repeatedly selecting the item with the largest conditional expected
//! benefit (optionally per unit cost), with two engines that provably agree
//! on adaptive submodular objectives:
//!
//! - `Naive` recomputes every candidate's benefit at every node.
//! - `Lazy` keeps a priority queue of previously computed benefits and
//!   recomputes only entries that surface, exploiting the fact that benefits
//!   never grow as observations accumulate.
//!
//! Ties always break toward the lowest item id, in both engines, so equal
//! inputs yield bit-identical trees.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    enumerate_support, Caps, Item, ItemId, PartialRealization, Prior, Realization, StateId,
};
use crate::objectives::{stable_sum, Backend, Evaluator, MarginalBenefit, Objective};
use crate::TOL_SUM;

/// One node of a policy tree.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyNode {
    /// Stop: no further selection on this branch.
    Leaf,
    /// Select `item`, then continue in the child matching its observed state.
    Decision {
        item: ItemId,
        children: BTreeMap<StateId, PolicyNode>,
    },
}

/// An adaptive policy as an explicit decision tree.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTree {
    pub root: PolicyNode,
}

impl PolicyTree {
    pub fn leaf() -> Self {
        PolicyTree {
            root: PolicyNode::Leaf,
        }
    }

    /// Number of decision nodes.
    pub fn node_count(&self) -> usize {
        fn count(node: &PolicyNode) -> usize {
            match node {
                PolicyNode::Leaf => 0,
                PolicyNode::Decision { children, .. } => {
                    1 + children.values().map(count).sum::<usize>()
                }
            }
        }
        count(&self.root)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.root, PolicyNode::Leaf)
    }
}

/// When a branch stops selecting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StoppingRule {
    /// Stop after exactly `k` selections (earlier if items run out).
    Cardinality(usize),
    /// Stop when no remaining item fits in the leftover budget.
    Budget(f64),
    /// Stop when the value is at least `Q` under every realization still
    /// consistent with the observations (a certifiable stop). Selection
    /// ranks items by the capped benefit `min(Q, value)`, since surplus
    /// beyond the quota cannot help reach it.
    Quota(f64),
    /// Same stop and capped selection as `Quota`; evaluation additionally
    /// reports the expected accumulated shortfall before coverage.
    MinSum(f64),
}

impl StoppingRule {
    /// The quota for quota-style rules.
    pub fn quota(&self) -> Option<f64> {
        match self {
            StoppingRule::Quota(q) | StoppingRule::MinSum(q) => Some(*q),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StoppingRule::Cardinality(0) => Err(Error::InvalidConfig(
                "cardinality limit must be at least 1".into(),
            )),
            StoppingRule::Budget(b) if b <= 0.0 || !b.is_finite() => Err(Error::InvalidConfig(
                format!("budget must be positive and finite, found {b}"),
            )),
            StoppingRule::Quota(q) | StoppingRule::MinSum(q) if q <= 0.0 || !q.is_finite() => Err(
                Error::InvalidConfig(format!("quota must be positive and finite, found {q}")),
            ),
            _ => Ok(()),
        }
    }
}

/// What the greedy step maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionRule {
    /// Expected benefit.
    Benefit,
    /// Expected benefit divided by item cost.
    BenefitPerCost,
}

impl SelectionRule {
    fn score(&self, value: f64, cost: f64) -> f64 {
        match self {
            SelectionRule::Benefit => value,
            SelectionRule::BenefitPerCost => value / cost,
        }
    }
}

/// Which selection engine to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    Naive,
    Lazy,
}

/// Exact metrics of a policy under the instance prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyMetrics {
    /// Expected terminal value.
    pub avg_value: f64,
    /// Expected total cost of the selections made.
    pub avg_cost: f64,
    /// Largest path cost over positive-probability realizations.
    pub worst_case_cost: f64,
    /// Expected accumulated quota shortfall, summed over selection prefixes.
    /// Zero unless evaluated under a min-sum rule.
    pub min_sum: f64,
    /// Number of marginal-benefit computations during construction.
    pub evaluation_count: u64,
}

/// Selects the unselected item with the best score at `partial`.
///
/// Computes a marginal for every unselected item. Ties break toward the
/// lowest item id.
pub fn greedy_step(
    items: &[Item],
    objective: &Objective,
    partial: &PartialRealization,
    prior: &Prior,
    rule: SelectionRule,
) -> Result<(ItemId, MarginalBenefit)> {
    let evaluator = Evaluator::exact(objective, prior)?;
    let mut evals = 0u64;
    naive_select(&evaluator, items, partial, rule, None, None, &mut evals)?.ok_or(Error::Exhausted)
}

/// The benefit a selection step ranks by. Quota-style rules cap the value at
/// the quota first: surplus beyond the quota cannot shorten the remaining
/// work, and ranking by raw gain would let a long-shot item with a large but
/// useless upside displace one that certifies coverage outright, voiding the
/// greedy cost guarantee.
fn scored_marginal(
    evaluator: &Evaluator,
    item: ItemId,
    partial: &PartialRealization,
    cap: Option<f64>,
    evals: &mut u64,
) -> Result<MarginalBenefit> {
    *evals += 1;
    match cap {
        Some(q) => evaluator.marginal_capped(item, partial, q),
        None => evaluator.marginal(item, partial),
    }
}

fn naive_select(
    evaluator: &Evaluator,
    items: &[Item],
    partial: &PartialRealization,
    rule: SelectionRule,
    remaining_budget: Option<f64>,
    cap: Option<f64>,
    evals: &mut u64,
) -> Result<Option<(ItemId, MarginalBenefit)>> {
    let mut best: Option<(f64, ItemId, MarginalBenefit)> = None;
    for item in items {
        if partial.contains(item.id) {
            continue;
        }
        if let Some(limit) = remaining_budget {
            if item.cost > limit {
                continue;
            }
        }
        let mb = scored_marginal(evaluator, item.id, partial, cap, evals)?;
        let score = rule.score(mb.value, item.cost);
        let better = match &best {
            None => true,
            Some((s, _, _)) => score.total_cmp(s) == Ordering::Greater,
        };
        if better {
            best = Some((score, item.id, mb));
        }
    }
    Ok(best.map(|(_, id, mb)| (id, mb)))
}

/// Queue entry for the lazy engine: larger score first, then lower item id.
#[derive(Debug, Clone)]
struct LazyEntry {
    score: f64,
    item: ItemId,
    benefit: MarginalBenefit,
}

impl PartialEq for LazyEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for LazyEntry {}
impl PartialOrd for LazyEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for LazyEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.item.cmp(&self.item))
    }
}

type LazyQueue = BinaryHeap<LazyEntry>;

/// Stale scores within this distance of a fresh winner are refreshed before
/// the winner is accepted. Recomputing a benefit at a different observation
/// set can move it by a few ulps in either direction, so an exact tie can
/// hide behind a stale score that reads marginally lower; without the
/// refresh the lazy engine would resolve such ties differently than the
/// naive engine.
const TIE_REFRESH: f64 = 1e-9;

/// Pops until the top entry is fresh at this node, recomputing stale ones.
#[allow(clippy::too_many_arguments)]
fn lazy_select(
    evaluator: &Evaluator,
    items: &[Item],
    partial: &PartialRealization,
    rule: SelectionRule,
    remaining_budget: Option<f64>,
    cap: Option<f64>,
    queue: &mut LazyQueue,
    evals: &mut u64,
) -> Result<Option<(ItemId, MarginalBenefit)>> {
    let selectable = |item: ItemId| {
        !partial.contains(item) && remaining_budget.is_none_or(|limit| items[item].cost <= limit)
    };
    while let Some(entry) = queue.pop() {
        // Costs never change and the leftover budget only shrinks along a
        // path, so an unselectable entry can be dropped outright.
        if !selectable(entry.item) {
            continue;
        }
        if entry.benefit.stamp == partial.len() {
            if let Some(rival) = queue.peek() {
                if rival.benefit.stamp != partial.len() && rival.score >= entry.score - TIE_REFRESH
                {
                    let rival = queue.pop().expect("peeked entry");
                    queue.push(entry);
                    if selectable(rival.item) {
                        let benefit = scored_marginal(evaluator, rival.item, partial, cap, evals)?;
                        queue.push(LazyEntry {
                            score: rule.score(benefit.value, items[rival.item].cost),
                            item: rival.item,
                            benefit,
                        });
                    }
                    continue;
                }
            }
            return Ok(Some((entry.item, entry.benefit)));
        }
        let benefit = scored_marginal(evaluator, entry.item, partial, cap, evals)?;
        queue.push(LazyEntry {
            score: rule.score(benefit.value, items[entry.item].cost),
            item: entry.item,
            benefit,
        });
    }
    Ok(None)
}

struct Builder<'a> {
    evaluator: Evaluator<'a>,
    items: &'a [Item],
    stop: StoppingRule,
    rule: SelectionRule,
    engine: Engine,
    depth_limit: Option<usize>,
    evals: u64,
}

impl<'a> Builder<'a> {
    fn should_stop(&self, partial: &PartialRealization, spent: f64) -> Result<bool> {
        if let Some(limit) = self.depth_limit {
            if partial.len() >= limit {
                return Ok(true);
            }
        }
        match self.stop {
            StoppingRule::Cardinality(k) => Ok(partial.len() >= k),
            StoppingRule::Budget(b) => {
                let remaining = b - spent;
                Ok(!self
                    .items
                    .iter()
                    .any(|it| !partial.contains(it.id) && it.cost <= remaining))
            }
            StoppingRule::Quota(q) | StoppingRule::MinSum(q) => {
                Ok(self.evaluator.min_consistent_value(partial)? >= q - TOL_SUM)
            }
        }
    }

    fn expand(
        &mut self,
        partial: &PartialRealization,
        spent: f64,
        queue: Option<LazyQueue>,
    ) -> Result<PolicyNode> {
        if self.should_stop(partial, spent)? {
            return Ok(PolicyNode::Leaf);
        }
        let remaining_budget = match self.stop {
            StoppingRule::Budget(b) => Some(b - spent),
            _ => None,
        };
        let cap = self.stop.quota();
        let (selected, queue) = match self.engine {
            Engine::Naive => (
                naive_select(
                    &self.evaluator,
                    self.items,
                    partial,
                    self.rule,
                    remaining_budget,
                    cap,
                    &mut self.evals,
                )?,
                None,
            ),
            Engine::Lazy => {
                let mut queue = match queue {
                    Some(q) => q,
                    None => self.init_queue(partial)?,
                };
                let picked = lazy_select(
                    &self.evaluator,
                    self.items,
                    partial,
                    self.rule,
                    remaining_budget,
                    cap,
                    &mut queue,
                    &mut self.evals,
                )?;
                (picked, Some(queue))
            }
        };
        let Some((item, _)) = selected else {
            return Ok(PolicyNode::Leaf);
        };
        let spent = spent + self.items[item].cost;
        let mut children = BTreeMap::new();
        for (state, _prob) in self.evaluator.state_distribution(item, partial)? {
            let child_partial = partial.extended(item, state)?;
            // Each branch continues from the queue as it stood after the
            // selection pop at this node.
            let node = self.expand(&child_partial, spent, queue.clone())?;
            children.insert(state, node);
        }
        Ok(PolicyNode::Decision { item, children })
    }

    fn init_queue(&mut self, partial: &PartialRealization) -> Result<LazyQueue> {
        let mut queue = BinaryHeap::new();
        let cap = self.stop.quota();
        for item in self.items {
            if partial.contains(item.id) {
                continue;
            }
            let benefit = scored_marginal(&self.evaluator, item.id, partial, cap, &mut self.evals)?;
            queue.push(LazyEntry {
                score: self.rule.score(benefit.value, item.cost),
                item: item.id,
                benefit,
            });
        }
        Ok(queue)
    }
}

/// Builds the greedy policy tree and evaluates it exactly.
///
/// Quota rules are validated up front: if some positive-probability
/// realization cannot reach the quota even with every item selected, the
/// build fails naming that realization. With a sampled backend, expansion is
/// depth-limited by `caps.depth_limit`.
#[allow(clippy::too_many_arguments)]
pub fn build_policy(
    items: &[Item],
    objective: &Objective,
    prior: &Prior,
    stop: StoppingRule,
    rule: SelectionRule,
    engine: Engine,
    backend: Backend,
    caps: &Caps,
) -> Result<(PolicyTree, PolicyMetrics)> {
    stop.validate()?;
    let evaluator = Evaluator::new(objective, prior, backend, *caps)?;
    if let Some(q) = stop.quota() {
        evaluator.validate_quota(q)?;
    }
    if let StoppingRule::Budget(b) = stop {
        let cheapest = items.iter().map(|it| it.cost).fold(f64::INFINITY, f64::min);
        if b < cheapest {
            return Err(Error::InvalidConfig(format!(
                "budget {b} is below the cheapest item cost {cheapest}"
            )));
        }
    }
    let depth_limit = match backend {
        Backend::Sample { .. } => Some(caps.depth_limit),
        Backend::Enumerate => None,
    };
    let mut builder = Builder {
        evaluator,
        items,
        stop,
        rule,
        engine,
        depth_limit,
        evals: 0,
    };
    let root = builder.expand(&PartialRealization::empty(), 0.0, None)?;
    let tree = PolicyTree { root };
    let mut metrics = evaluate_policy(&tree, items, objective, prior, stop.quota(), caps)?;
    metrics.evaluation_count = builder.evals;
    Ok((tree, metrics))
}

/// Exact expected metrics of an arbitrary policy tree.
///
/// `min_sum_quota` switches on shortfall accounting; pass the quota of a
/// min-sum rule, or `None` to report zero.
pub fn evaluate_policy(
    policy: &PolicyTree,
    items: &[Item],
    objective: &Objective,
    prior: &Prior,
    min_sum_quota: Option<f64>,
    caps: &Caps,
) -> Result<PolicyMetrics> {
    match prior {
        Prior::Independent(_) if objective.is_state_local() => {
            let mut acc = MetricsAccumulator::new(min_sum_quota);
            walk_factored(
                policy,
                items,
                objective,
                prior,
                &PartialRealization::empty(),
                1.0,
                0.0,
                &mut Vec::new(),
                &mut acc,
            )?;
            Ok(acc.finish())
        }
        _ => {
            let rows = match prior {
                Prior::Tabular(tab) => {
                    let total: f64 = stable_sum(tab.support().iter().map(|&(_, w)| w));
                    tab.support()
                        .iter()
                        .map(|(phi, w)| (phi.clone(), w / total))
                        .collect::<Vec<_>>()
                }
                Prior::Independent(_) => enumerate_support(prior, caps)?,
            };
            let mut acc = MetricsAccumulator::new(min_sum_quota);
            for (phi, p) in &rows {
                let trace = trace_policy(policy, phi)?;
                let cost = stable_sum(trace.path.iter().map(|&(i, _)| items[i].cost));
                let mut dom: Vec<ItemId> = Vec::with_capacity(trace.path.len());
                let mut prefix_values = Vec::with_capacity(trace.path.len() + 1);
                prefix_values.push(objective.value_with_realization(&dom, phi)?);
                for &(i, _) in &trace.path {
                    dom.push(i);
                    prefix_values.push(objective.value_with_realization(&dom, phi)?);
                }
                let value = *prefix_values.last().expect("at least the empty prefix");
                acc.leaf(*p, value, cost, &prefix_values);
            }
            Ok(acc.finish())
        }
    }
}

struct MetricsAccumulator {
    quota: Option<f64>,
    values: Vec<f64>,
    costs: Vec<f64>,
    shortfalls: Vec<f64>,
    worst_cost: f64,
}

impl MetricsAccumulator {
    fn new(quota: Option<f64>) -> Self {
        MetricsAccumulator {
            quota,
            values: Vec::new(),
            costs: Vec::new(),
            shortfalls: Vec::new(),
            worst_cost: 0.0,
        }
    }

    /// Record one leaf reached with probability `p`. `prefix_values[t]` is
    /// the value after the first `t` selections on the path.
    fn leaf(&mut self, p: f64, value: f64, cost: f64, prefix_values: &[f64]) {
        self.values.push(p * value);
        self.costs.push(p * cost);
        if cost > self.worst_cost {
            self.worst_cost = cost;
        }
        if let Some(q) = self.quota {
            // Shortfall accumulates over the prefixes strictly before the
            // final selection; a covered leaf contributes nothing there.
            let len = prefix_values.len().saturating_sub(1);
            let total = stable_sum(
                prefix_values[..len]
                    .iter()
                    .map(|&v| (q - v.min(q)).max(0.0)),
            );
            self.shortfalls.push(p * total);
        }
    }

    fn finish(self) -> PolicyMetrics {
        PolicyMetrics {
            avg_value: stable_sum(self.values),
            avg_cost: stable_sum(self.costs),
            worst_case_cost: self.worst_cost,
            min_sum: stable_sum(self.shortfalls),
            evaluation_count: 0,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn walk_factored(
    node_holder: &PolicyTree,
    items: &[Item],
    objective: &Objective,
    prior: &Prior,
    partial: &PartialRealization,
    prob: f64,
    cost: f64,
    prefix_values: &mut Vec<f64>,
    acc: &mut MetricsAccumulator,
) -> Result<()> {
    fn rec(
        node: &PolicyNode,
        items: &[Item],
        objective: &Objective,
        prior: &Prior,
        partial: &PartialRealization,
        prob: f64,
        cost: f64,
        prefix_values: &mut Vec<f64>,
        acc: &mut MetricsAccumulator,
    ) -> Result<()> {
        let value_here = objective.value_from_pairs(&partial.canonical())?;
        prefix_values.push(value_here);
        match node {
            PolicyNode::Leaf => {
                acc.leaf(prob, value_here, cost, prefix_values);
            }
            PolicyNode::Decision { item, children } => {
                let it = items.get(*item).ok_or(Error::UnknownItem(*item))?;
                if partial.contains(*item) {
                    return Err(Error::MalformedPolicy(format!(
                        "item {item} repeats along a path"
                    )));
                }
                let factor = match prior {
                    Prior::Independent(ind) => ind.factor(*item)?,
                    Prior::Tabular(_) => unreachable!("factored walk needs independent prior"),
                };
                for (state, &p) in factor.iter().enumerate() {
                    if p <= 0.0 {
                        continue;
                    }
                    let child = children.get(&state).ok_or_else(|| {
                        Error::MalformedPolicy(format!(
                            "missing child for item {item} state {state}"
                        ))
                    })?;
                    let child_partial = partial.extended(*item, state)?;
                    rec(
                        child,
                        items,
                        objective,
                        prior,
                        &child_partial,
                        prob * p,
                        cost + it.cost,
                        prefix_values,
                        acc,
                    )?;
                }
            }
        }
        prefix_values.pop();
        Ok(())
    }
    rec(
        &node_holder.root,
        items,
        objective,
        prior,
        partial,
        prob,
        cost,
        prefix_values,
        acc,
    )
}

struct Trace {
    path: Vec<(ItemId, StateId)>,
}

fn trace_policy(policy: &PolicyTree, phi: &Realization) -> Result<Trace> {
    let mut node = &policy.root;
    let mut path = Vec::new();
    loop {
        match node {
            PolicyNode::Leaf => return Ok(Trace { path }),
            PolicyNode::Decision { item, children } => {
                if path.iter().any(|&(i, _)| i == *item) {
                    return Err(Error::MalformedPolicy(format!(
                        "item {item} repeats along a path"
                    )));
                }
                let state = phi.state_of(*item)?;
                path.push((*item, state));
                node = children.get(&state).ok_or_else(|| {
                    Error::MalformedPolicy(format!("missing child for item {item} state {state}"))
                })?;
            }
        }
    }
}

/// Runs the policy in the world `phi` and returns the observations made.
pub fn execute_policy(policy: &PolicyTree, phi: &Realization) -> Result<PartialRealization> {
    let trace = trace_policy(policy, phi)?;
    PartialRealization::from_observations(trace.path)
        .map_err(|e| Error::MalformedPolicy(e.to_string()))
}

/// Serializes a policy with human-readable state names. Leaves appear as
/// the string `"leaf"`.
pub fn policy_to_json(policy: &PolicyTree, items: &[Item]) -> Result<serde_json::Value> {
    fn node_to_json(node: &PolicyNode, items: &[Item]) -> Result<serde_json::Value> {
        match node {
            PolicyNode::Leaf => Ok(serde_json::Value::String("leaf".into())),
            PolicyNode::Decision { item, children } => {
                let it = items.get(*item).ok_or(Error::UnknownItem(*item))?;
                let mut child_map = serde_json::Map::new();
                for (state, child) in children {
                    let name = it.states.get(*state).ok_or(Error::InvalidState {
                        item: *item,
                        state: *state,
                    })?;
                    child_map.insert(name.clone(), node_to_json(child, items)?);
                }
                Ok(serde_json::json!({
                    "item": item,
                    "children": serde_json::Value::Object(child_map),
                }))
            }
        }
    }
    node_to_json(&policy.root, items)
}

/// Parses the [`policy_to_json`] format back into a tree.
pub fn policy_from_json(value: &serde_json::Value, items: &[Item]) -> Result<PolicyTree> {
    fn node_from_json(value: &serde_json::Value, items: &[Item]) -> Result<PolicyNode> {
        match value {
            serde_json::Value::String(s) if s == "leaf" => Ok(PolicyNode::Leaf),
            serde_json::Value::Object(map) => {
                let item = map
                    .get("item")
                    .and_then(|v| v.as_u64())
                    .ok_or_else(|| Error::MalformedPolicy("node missing item id".into()))?
                    as usize;
                let it = items
                    .get(item)
                    .ok_or_else(|| Error::MalformedPolicy(format!("unknown item {item}")))?;
                let children_value = map
                    .get("children")
                    .and_then(|v| v.as_object())
                    .ok_or_else(|| Error::MalformedPolicy("node missing children".into()))?;
                let mut children = BTreeMap::new();
                for (name, child) in children_value {
                    let state = it.states.iter().position(|s| s == name).ok_or_else(|| {
                        Error::MalformedPolicy(format!("unknown state '{name}' for item {item}"))
                    })?;
                    children.insert(state, node_from_json(child, items)?);
                }
                Ok(PolicyNode::Decision { item, children })
            }
            other => Err(Error::MalformedPolicy(format!(
                "expected node object or \"leaf\", found {other}"
            ))),
        }
    }
    Ok(PolicyTree {
        root: node_from_json(value, items)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn build(
        inst: &crate::instance::Instance,
        stop: StoppingRule,
        rule: SelectionRule,
        engine: Engine,
    ) -> (PolicyTree, PolicyMetrics) {
        build_policy(
            &inst.items,
            &inst.objective,
            &inst.prior,
            stop,
            rule,
            engine,
            Backend::Enumerate,
            &Caps::default(),
        )
        .unwrap()
    }

    #[test]
    fn pair_cardinality_one_selects_the_sure_item() {
        let inst = corpus::two_item_coverage();
        let (tree, metrics) = build(
            &inst,
            StoppingRule::Cardinality(1),
            SelectionRule::Benefit,
            Engine::Naive,
        );
        match &tree.root {
            PolicyNode::Decision { item, children } => {
                assert_eq!(*item, 0);
                assert!(children.values().all(|c| matches!(c, PolicyNode::Leaf)));
            }
            PolicyNode::Leaf => panic!("expected a selection"),
        }
        assert_eq!(metrics.avg_value, 1.0);
        assert_eq!(metrics.avg_cost, 1.0);
    }

    #[test]
    fn pair_cardinality_two_metrics_and_counts() {
        let inst = corpus::two_item_coverage();
        for engine in [Engine::Naive, Engine::Lazy] {
            let (tree, metrics) = build(
                &inst,
                StoppingRule::Cardinality(2),
                SelectionRule::Benefit,
                engine,
            );
            assert_eq!(tree.node_count(), 2);
            assert!((metrics.avg_value - 1.5).abs() < crate::TOL_EXACT);
            assert_eq!(metrics.avg_cost, 2.0);
            assert_eq!(metrics.worst_case_cost, 2.0);
            assert_eq!(metrics.evaluation_count, 3);
        }
    }

    #[test]
    fn per_cost_rule_prefers_the_cheap_item() {
        let inst = corpus::two_item_coverage_with_costs(4.0, 1.0);
        let (tree, _) = build(
            &inst,
            StoppingRule::Cardinality(1),
            SelectionRule::BenefitPerCost,
            Engine::Naive,
        );
        match &tree.root {
            PolicyNode::Decision { item, .. } => assert_eq!(*item, 1),
            PolicyNode::Leaf => panic!("expected a selection"),
        }
    }

    #[test]
    fn budget_paths_respect_the_limit() {
        let inst = corpus::two_item_coverage_with_costs(4.0, 1.0);
        // Benefit rule selects the cost-4 item first; only 0.5 remains, so
        // every branch stops there.
        let (tree, metrics) = build(
            &inst,
            StoppingRule::Budget(4.5),
            SelectionRule::Benefit,
            Engine::Naive,
        );
        assert_eq!(tree.node_count(), 1);
        assert_eq!(metrics.worst_case_cost, 4.0);
        let (tree5, metrics5) = build(
            &inst,
            StoppingRule::Budget(5.0),
            SelectionRule::Benefit,
            Engine::Naive,
        );
        assert_eq!(tree5.node_count(), 2);
        assert_eq!(metrics5.worst_case_cost, 5.0);
    }

    #[test]
    fn budget_below_cheapest_item_is_rejected() {
        let inst = corpus::two_item_coverage();
        let err = build_policy(
            &inst.items,
            &inst.objective,
            &inst.prior,
            StoppingRule::Budget(0.25),
            SelectionRule::Benefit,
            Engine::Naive,
            Backend::Enumerate,
            &Caps::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn quota_stops_as_soon_as_certified() {
        let inst = corpus::two_item_coverage();
        let (tree, metrics) = build(
            &inst,
            StoppingRule::MinSum(1.0),
            SelectionRule::Benefit,
            Engine::Naive,
        );
        // The sure item alone certifies value 1 in every consistent world.
        assert_eq!(tree.node_count(), 1);
        assert_eq!(metrics.avg_cost, 1.0);
        assert_eq!(metrics.min_sum, 1.0);
    }

    #[test]
    fn quota_selection_ignores_surplus_beyond_the_quota() {
        use crate::instance::Instance;
        use crate::model::IndependentPrior;
        use crate::objectives::CoverageObjective;

        // Item 0 certifies the quota outright; item 1 has the larger raw
        // expected gain (0.9 * 2.0 = 1.8) but leaves a costly uncovered
        // branch one run in ten.
        let items = vec![
            Item::new(0, 1.0, vec!["on".into()]),
            Item::new(1, 1.0, vec!["good".into(), "bad".into()]),
        ];
        let prior = Prior::Independent(
            IndependentPrior::new(vec![vec![1.0], vec![0.9, 0.1]], &items).expect("valid factors"),
        );
        let objective = Objective::Coverage(
            CoverageObjective::new(
                vec!["a".into(), "b".into()],
                Some(vec![1.0, 2.0]),
                vec![vec![vec![0]], vec![vec![1], vec![]]],
                &items,
            )
            .expect("valid coverage"),
        );
        let inst = Instance::new("surplus", items, prior, objective);

        // An uncapped step chases the long shot.
        let (raw_pick, raw_mb) = greedy_step(
            &inst.items,
            &inst.objective,
            &PartialRealization::empty(),
            &inst.prior,
            SelectionRule::Benefit,
        )
        .unwrap();
        assert_eq!(raw_pick, 1);
        assert!((raw_mb.value - 1.8).abs() < crate::TOL_EXACT);

        // Under a quota stop both engines rank by the capped benefit and
        // take the certain cover, matching the optimal expected cost.
        for engine in [Engine::Naive, Engine::Lazy] {
            let (tree, metrics) = build(
                &inst,
                StoppingRule::Quota(1.0),
                SelectionRule::Benefit,
                engine,
            );
            match &tree.root {
                PolicyNode::Decision { item, .. } => assert_eq!(*item, 0),
                PolicyNode::Leaf => panic!("expected a selection"),
            }
            assert_eq!(tree.node_count(), 1);
            assert_eq!(metrics.avg_cost, 1.0);
        }
    }

    #[test]
    fn infeasible_quota_names_a_realization() {
        let inst = corpus::two_item_coverage();
        let err = build_policy(
            &inst.items,
            &inst.objective,
            &inst.prior,
            StoppingRule::Quota(2.0),
            SelectionRule::Benefit,
            Engine::Naive,
            Backend::Enumerate,
            &Caps::default(),
        )
        .unwrap_err();
        match err {
            Error::InfeasibleQuota { quota, realization } => {
                assert_eq!(quota, 2.0);
                assert!(realization.contains("1"), "{realization}");
            }
            other => panic!("expected InfeasibleQuota, found {other}"),
        }
    }

    #[test]
    fn identification_tree_costs_match_hand_computation() {
        let inst = corpus::three_hypotheses();
        for engine in [Engine::Naive, Engine::Lazy] {
            let (tree, metrics) = build(
                &inst,
                StoppingRule::Quota(1.0),
                SelectionRule::Benefit,
                engine,
            );
            match &tree.root {
                PolicyNode::Decision { item, .. } => assert_eq!(*item, 0, "tie breaks low"),
                PolicyNode::Leaf => panic!("expected a selection"),
            }
            assert!((metrics.avg_cost - 5.0 / 3.0).abs() < crate::TOL_EXACT);
            assert_eq!(metrics.worst_case_cost, 2.0);
        }
    }

    #[test]
    fn lazy_and_naive_agree_on_submodular_instances() {
        for seed in 0..10u64 {
            let inst = corpus::random_coverage_small(seed);
            let (naive_tree, naive_metrics) = build(
                &inst,
                StoppingRule::Cardinality(3),
                SelectionRule::Benefit,
                Engine::Naive,
            );
            let (lazy_tree, lazy_metrics) = build(
                &inst,
                StoppingRule::Cardinality(3),
                SelectionRule::Benefit,
                Engine::Lazy,
            );
            assert_eq!(naive_tree, lazy_tree, "seed {seed}");
            assert!(lazy_metrics.evaluation_count <= naive_metrics.evaluation_count);
            assert_eq!(naive_metrics.avg_value, lazy_metrics.avg_value);
        }
    }

    #[test]
    fn lazy_diverges_when_benefits_surge() {
        let inst = corpus::correlated_surge();
        let (naive_tree, naive_metrics) = build(
            &inst,
            StoppingRule::Cardinality(2),
            SelectionRule::Benefit,
            Engine::Naive,
        );
        let (lazy_tree, lazy_metrics) = build(
            &inst,
            StoppingRule::Cardinality(2),
            SelectionRule::Benefit,
            Engine::Lazy,
        );
        assert_ne!(naive_tree, lazy_tree);
        assert!((naive_metrics.avg_value - 1.81).abs() < crate::TOL_EXACT);
        assert!((lazy_metrics.avg_value - 1.52).abs() < crate::TOL_EXACT);
    }

    #[test]
    fn execute_policy_walks_to_the_matching_leaf() {
        let inst = corpus::two_item_coverage();
        let (tree, _) = build(
            &inst,
            StoppingRule::Cardinality(2),
            SelectionRule::Benefit,
            Engine::Naive,
        );
        let phi_bad = Realization::from_states(vec![0, 1]);
        let run = execute_policy(&tree, &phi_bad).unwrap();
        assert_eq!(run.observations(), &[(0, 0), (1, 1)]);
    }

    #[test]
    fn policy_json_round_trips_with_state_names() {
        let inst = corpus::two_item_coverage();
        let (tree, _) = build(
            &inst,
            StoppingRule::Cardinality(2),
            SelectionRule::Benefit,
            Engine::Naive,
        );
        let json = policy_to_json(&tree, &inst.items).unwrap();
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.contains("\"good\""), "{text}");
        assert!(text.contains("\"leaf\""), "{text}");
        let back = policy_from_json(&json, &inst.items).unwrap();
        assert_eq!(back, tree);
        let root_leaf = policy_from_json(&serde_json::json!("leaf"), &inst.items).unwrap();
        assert!(root_leaf.is_empty());
    }

    #[test]
    fn malformed_policies_are_rejected() {
        let inst = corpus::two_item_coverage();
        let repeat = PolicyTree {
            root: PolicyNode::Decision {
                item: 0,
                children: [(
                    0usize,
                    PolicyNode::Decision {
                        item: 0,
                        children: [(0usize, PolicyNode::Leaf)].into(),
                    },
                )]
                .into(),
            },
        };
        let err = evaluate_policy(
            &repeat,
            &inst.items,
            &inst.objective,
            &inst.prior,
            None,
            &Caps::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::MalformedPolicy(_)));

        let missing_child = PolicyTree {
            root: PolicyNode::Decision {
                item: 1,
                children: [(0usize, PolicyNode::Leaf)].into(),
            },
        };
        let err = evaluate_policy(
            &missing_child,
            &inst.items,
            &inst.objective,
            &inst.prior,
            None,
            &Caps::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::MalformedPolicy(_)));
    }

    #[test]
    fn empty_policy_has_zero_metrics() {
        let inst = corpus::two_item_coverage();
        let metrics = evaluate_policy(
            &PolicyTree::leaf(),
            &inst.items,
            &inst.objective,
            &inst.prior,
            Some(1.0),
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(metrics.avg_value, 0.0);
        assert_eq!(metrics.avg_cost, 0.0);
        assert_eq!(metrics.worst_case_cost, 0.0);
        assert_eq!(metrics.min_sum, 0.0);
    }
}
