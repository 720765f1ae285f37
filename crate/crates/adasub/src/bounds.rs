//! Data-dependent upper bounds on the optimal policy value.
//!
//! At any observation set, the expected value already banked plus the sum of
//! the `k` largest remaining benefits upper-bounds what any policy could
//! still achieve with `k` more selections, provided the objective has
//! non-negative, non-increasing benefits. The budget variant relaxes to a
//! fractional knapsack over (benefit, cost) pairs. Certificates carry the
//! formula name so downstream reports can label what they plot.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::greedy::{PolicyNode, PolicyTree};
use crate::model::{Caps, Item, ItemId, PartialRealization, Prior, StateId};
use crate::objectives::{stable_sum, Evaluator, Objective};

/// A claimed upper bound on the optimal continuation from an observation set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    /// Canonical observation set the bound is anchored at.
    pub observations: Vec<(ItemId, StateId)>,
    /// Selections the bounded policies may still make. Absent for budget
    /// bounds, where the allowance is the leftover budget rather than a
    /// count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_remaining: Option<usize>,
    /// Expected value of the observations themselves.
    pub current: f64,
    /// Optimistic headroom added on top of `current`; never negative.
    pub slack: f64,
    /// `current + slack`.
    pub bound: f64,
    /// Name of the slack formula used.
    pub formula: String,
}

/// Upper bound from the `k` largest positive benefits at `partial`.
pub fn opt_upper_bound(
    objective: &Objective,
    prior: &Prior,
    partial: &PartialRealization,
    k: usize,
    caps: &Caps,
) -> Result<BoundCertificate> {
    let evaluator = Evaluator::new(objective, prior, Default::default(), *caps)?;
    let current = evaluator.expected_value(partial)?;
    let mut gains = positive_gains(&evaluator, prior.item_count(), partial)?;
    gains.sort_by(|a, b| b.0.total_cmp(&a.0));
    let slack = stable_sum(gains.iter().take(k).map(|&(g, _)| g));
    Ok(BoundCertificate {
        observations: partial.canonical(),
        k_remaining: Some(k),
        current,
        slack,
        bound: current + slack,
        formula: "current-plus-top-k-benefits".into(),
    })
}

/// Upper bound from the fractional knapsack relaxation over (benefit, cost)
/// pairs, truncated at the remaining budget.
pub fn opt_upper_bound_budget(
    items: &[Item],
    objective: &Objective,
    prior: &Prior,
    partial: &PartialRealization,
    remaining_budget: f64,
    caps: &Caps,
) -> Result<BoundCertificate> {
    let evaluator = Evaluator::new(objective, prior, Default::default(), *caps)?;
    let current = evaluator.expected_value(partial)?;
    let mut gains = positive_gains(&evaluator, prior.item_count(), partial)?;
    // Best benefit-per-cost first; the final pick may be fractional.
    gains.sort_by(|a, b| {
        let ra = a.0 / items[a.1].cost;
        let rb = b.0 / items[b.1].cost;
        rb.total_cmp(&ra)
    });
    let mut budget = remaining_budget.max(0.0);
    let mut terms = Vec::new();
    for (gain, item) in gains {
        if budget <= 0.0 {
            break;
        }
        let cost = items[item].cost;
        if cost <= budget {
            terms.push(gain);
            budget -= cost;
        } else {
            terms.push(gain * (budget / cost));
            break;
        }
    }
    let slack = stable_sum(terms);
    Ok(BoundCertificate {
        observations: partial.canonical(),
        k_remaining: None,
        current,
        slack,
        bound: current + slack,
        formula: "current-plus-fractional-knapsack".into(),
    })
}

fn positive_gains(
    evaluator: &Evaluator,
    item_count: usize,
    partial: &PartialRealization,
) -> Result<Vec<(f64, ItemId)>> {
    let mut gains = Vec::new();
    for item in 0..item_count {
        if partial.contains(item) {
            continue;
        }
        let value = evaluator.marginal(item, partial)?.value;
        if value > 0.0 {
            gains.push((value, item));
        }
    }
    Ok(gains)
}

/// One certificate per decision node of `policy`, in pre-order, each bounding
/// the optimal continuation with the selections the `k`-limit still allows.
pub fn bound_trace(
    policy: &PolicyTree,
    objective: &Objective,
    prior: &Prior,
    k: usize,
    caps: &Caps,
) -> Result<Vec<BoundCertificate>> {
    fn walk(
        node: &PolicyNode,
        objective: &Objective,
        prior: &Prior,
        partial: &PartialRealization,
        k: usize,
        caps: &Caps,
        out: &mut Vec<BoundCertificate>,
    ) -> Result<()> {
        let PolicyNode::Decision { item, children } = node else {
            return Ok(());
        };
        let remaining = k.saturating_sub(partial.len());
        out.push(opt_upper_bound(objective, prior, partial, remaining, caps)?);
        for (state, child) in children {
            let next = partial.extended(*item, *state)?;
            walk(child, objective, prior, &next, k, caps, out)?;
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(
        &policy.root,
        objective,
        prior,
        &PartialRealization::empty(),
        k,
        caps,
        &mut out,
    )?;
    Ok(out)
}

/// Budget analog of [`bound_trace`]: each decision node gets a fractional
/// knapsack certificate over the budget left when the node is reached.
pub fn bound_trace_budget(
    policy: &PolicyTree,
    items: &[Item],
    objective: &Objective,
    prior: &Prior,
    budget: f64,
    caps: &Caps,
) -> Result<Vec<BoundCertificate>> {
    #[allow(clippy::too_many_arguments)]
    fn walk(
        node: &PolicyNode,
        items: &[Item],
        objective: &Objective,
        prior: &Prior,
        partial: &PartialRealization,
        remaining: f64,
        caps: &Caps,
        out: &mut Vec<BoundCertificate>,
    ) -> Result<()> {
        let PolicyNode::Decision { item, children } = node else {
            return Ok(());
        };
        out.push(opt_upper_bound_budget(
            items, objective, prior, partial, remaining, caps,
        )?);
        let next_remaining = remaining - items[*item].cost;
        for (state, child) in children {
            let next = partial.extended(*item, *state)?;
            walk(
                child,
                items,
                objective,
                prior,
                &next,
                next_remaining,
                caps,
                out,
            )?;
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(
        &policy.root,
        items,
        objective,
        prior,
        &PartialRealization::empty(),
        budget,
        caps,
        &mut out,
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::greedy::{build_policy, Engine, SelectionRule, StoppingRule};
    use crate::verify::oracle_max;

    fn empty() -> PartialRealization {
        PartialRealization::empty()
    }

    #[test]
    fn root_bound_is_tight_on_the_pair_instance() {
        let inst = corpus::two_item_coverage();
        let cert =
            opt_upper_bound(&inst.objective, &inst.prior, &empty(), 2, &Caps::default()).unwrap();
        assert_eq!(cert.current, 0.0);
        assert_eq!(cert.bound, 1.5);
        assert_eq!(cert.k_remaining, Some(2));
    }

    #[test]
    fn mid_run_bound_uses_the_posterior() {
        let inst = corpus::two_item_coverage();
        let partial = PartialRealization::from_observations(vec![(0, 0)]).unwrap();
        let cert =
            opt_upper_bound(&inst.objective, &inst.prior, &partial, 1, &Caps::default()).unwrap();
        assert_eq!(cert.current, 1.0);
        assert_eq!(cert.slack, 0.5);
        assert_eq!(cert.bound, 1.5);
    }

    #[test]
    fn zero_selections_leave_no_slack() {
        let inst = corpus::two_item_coverage();
        let cert =
            opt_upper_bound(&inst.objective, &inst.prior, &empty(), 0, &Caps::default()).unwrap();
        assert_eq!(cert.slack, 0.0);
        assert_eq!(cert.bound, cert.current);
    }

    #[test]
    fn exhausted_marginals_leave_no_slack() {
        let inst = corpus::two_item_coverage();
        let partial = PartialRealization::from_observations(vec![(0, 0), (1, 0)]).unwrap();
        let cert =
            opt_upper_bound(&inst.objective, &inst.prior, &partial, 5, &Caps::default()).unwrap();
        assert_eq!(cert.slack, 0.0);
        assert_eq!(cert.bound, cert.current);
        assert_eq!(cert.current, 2.0);
    }

    #[test]
    fn budget_bound_takes_a_fractional_tail() {
        let inst = corpus::two_item_coverage_with_costs(4.0, 1.0);
        let cert = opt_upper_bound_budget(
            &inst.items,
            &inst.objective,
            &inst.prior,
            &empty(),
            4.0,
            &Caps::default(),
        )
        .unwrap();
        // Benefit per cost ranks the cheap item first (0.5), then 3 of the
        // 4 cost units of the sure item fit: slack 0.5 + 0.75.
        assert!((cert.slack - 1.25).abs() < crate::TOL_EXACT);
        let full = opt_upper_bound_budget(
            &inst.items,
            &inst.objective,
            &inst.prior,
            &empty(),
            5.0,
            &Caps::default(),
        )
        .unwrap();
        assert!((full.slack - 1.5).abs() < crate::TOL_EXACT);
    }

    #[test]
    fn trace_emits_one_certificate_per_decision_node() {
        let inst = corpus::two_item_coverage();
        let (tree, _) = build_policy(
            &inst.items,
            &inst.objective,
            &inst.prior,
            StoppingRule::Cardinality(2),
            SelectionRule::Benefit,
            Engine::Naive,
            Default::default(),
            &Caps::default(),
        )
        .unwrap();
        let trace = bound_trace(&tree, &inst.objective, &inst.prior, 2, &Caps::default()).unwrap();
        assert_eq!(trace.len(), tree.node_count());
        assert_eq!(trace[0].k_remaining, Some(2));
        assert_eq!(trace[0].bound, 1.5);
        assert_eq!(trace[1].k_remaining, Some(1));
        assert_eq!(trace[1].observations, vec![(0, 0)]);
    }

    #[test]
    fn budget_trace_shrinks_the_remaining_budget() {
        let inst = corpus::two_item_coverage_with_costs(4.0, 1.0);
        let (tree, _) = build_policy(
            &inst.items,
            &inst.objective,
            &inst.prior,
            StoppingRule::Budget(5.0),
            SelectionRule::BenefitPerCost,
            Engine::Naive,
            Default::default(),
            &Caps::default(),
        )
        .unwrap();
        let trace = bound_trace_budget(
            &tree,
            &inst.items,
            &inst.objective,
            &inst.prior,
            5.0,
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(trace.len(), tree.node_count());
        assert!((trace[0].slack - 1.5).abs() < crate::TOL_EXACT);
        assert_eq!(trace[0].formula, "current-plus-fractional-knapsack");
        for cert in &trace {
            assert!(cert.slack >= 0.0);
            assert_eq!(cert.bound, cert.current + cert.slack);
        }
        // After the cheap probe is bought, only 4 budget units remain and
        // the sure item exactly fits, so slack on either branch is 1.0.
        assert!((trace[1].slack - 1.0).abs() < crate::TOL_EXACT);
    }

    #[test]
    fn root_bounds_dominate_the_oracle() {
        let caps = Caps::default();
        for inst in [
            corpus::two_item_coverage(),
            corpus::three_hypotheses(),
            corpus::cascade_path(),
        ] {
            for k in 1..=2usize {
                let cert =
                    opt_upper_bound(&inst.objective, &inst.prior, &empty(), k, &caps).unwrap();
                let oracle = oracle_max(&inst.objective, &inst.prior, k, &caps).unwrap();
                assert!(
                    cert.bound >= oracle.optimum - crate::TOL_SUM,
                    "{} k={k}: bound {} < oracle {}",
                    inst.name,
                    cert.bound,
                    oracle.optimum
                );
            }
        }
    }
}
