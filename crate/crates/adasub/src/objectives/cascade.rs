//! Cascade seeding over a directed graph with independent edge activation.
//!
//! Seeding a node activates every node reachable from it through live edges,
//! and reveals the live/blocked status of every edge leaving an activated
//! node. The objective value is the number of distinct activated nodes.
//!
//! The graph form is compiled into the generic item/state machinery: items
//! are nodes, and a node's state is the index of the distinct revealed
//! outcome (which edges were seen and which of those were live). All
//! `2^edges` edge patterns are enumerated into a tabular prior; patterns
//! always induce distinct state vectors because every node observes its own
//! outgoing edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Caps, Item, ItemId, Prior, Realization, StateId, TabularPrior};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeEdge {
    pub from: usize,
    pub to: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeObjective {
    nodes: Vec<String>,
    edges: Vec<CascadeEdge>,
    /// `reach[node][state]` lists the nodes activated by that outcome.
    reach: Vec<Vec<Vec<usize>>>,
    /// Synthesized state names, `o0`, `o1`, ... per node.
    state_labels: Vec<Vec<String>>,
}

impl CascadeObjective {
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[CascadeEdge] {
        &self.edges
    }

    pub fn reach(&self, node: ItemId, state: StateId) -> &[usize] {
        &self.reach[node][state]
    }

    /// Count of distinct nodes activated by the observed outcomes.
    pub fn activated_count(
        &self,
        pairs: impl IntoIterator<Item = (ItemId, StateId)>,
    ) -> Result<f64> {
        let mut active = vec![false; self.nodes.len()];
        for (item, state) in pairs {
            let per_state = self.reach.get(item).ok_or(Error::UnknownItem(item))?;
            let reached = per_state
                .get(state)
                .ok_or(Error::InvalidState { item, state })?;
            for &v in reached {
                active[v] = true;
            }
        }
        Ok(active.iter().filter(|&&a| a).count() as f64)
    }
}

/// Nodes reachable from `start` through edges marked live in `mask`.
fn activated_set(
    start: usize,
    mask: u64,
    out_edges: &[Vec<usize>],
    edges: &[CascadeEdge],
) -> Vec<usize> {
    let mut seen = vec![false; out_edges.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &e in &out_edges[u] {
            if mask & (1 << e) != 0 && !seen[edges[e].to] {
                seen[edges[e].to] = true;
                stack.push(edges[e].to);
            }
        }
    }
    (0..out_edges.len()).filter(|&v| seen[v]).collect()
}

/// Compiles a cascade graph into items, an induced tabular prior, and the
/// objective. Nodes get unit cost; state names are synthesized.
pub fn compile_cascade(
    nodes: Vec<String>,
    edges: Vec<CascadeEdge>,
    caps: &Caps,
) -> Result<(Vec<Item>, Prior, CascadeObjective)> {
    let m = nodes.len();
    if m == 0 {
        return Err(Error::InvalidInstance(
            "objective.nodes: must be non-empty".into(),
        ));
    }
    for (pos, edge) in edges.iter().enumerate() {
        if edge.from >= m || edge.to >= m {
            return Err(Error::InvalidInstance(format!(
                "objective.edges[{pos}]: endpoint outside 0..{m}"
            )));
        }
        if !(0.0..=1.0).contains(&edge.p) || !edge.p.is_finite() {
            return Err(Error::InvalidInstance(format!(
                "objective.edges[{pos}].p: must lie in [0, 1], found {}",
                edge.p
            )));
        }
    }
    let patterns: u128 = 1u128 << edges.len().min(127);
    if edges.len() >= 64 || patterns > caps.support_cap as u128 {
        return Err(Error::SupportTooLarge {
            size: patterns,
            cap: caps.support_cap,
        });
    }

    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (e, edge) in edges.iter().enumerate() {
        out_edges[edge.from].push(e);
    }

    // Distinct observed outcome per node: (edges revealed, live subset).
    let mut outcome_ids: Vec<std::collections::HashMap<(u64, u64), StateId>> =
        vec![std::collections::HashMap::new(); m];
    let mut reach: Vec<Vec<Vec<usize>>> = vec![Vec::new(); m];
    let mut rows: Vec<(Realization, f64)> = Vec::new();

    for mask in 0..(patterns as u64) {
        let mut prob = 1.0;
        for (e, edge) in edges.iter().enumerate() {
            prob *= if mask & (1 << e) != 0 {
                edge.p
            } else {
                1.0 - edge.p
            };
        }
        let mut states = Vec::with_capacity(m);
        for v in 0..m {
            let activated = activated_set(v, mask, &out_edges, &edges);
            let mut revealed: u64 = 0;
            for &u in &activated {
                for &e in &out_edges[u] {
                    revealed |= 1 << e;
                }
            }
            let key = (revealed, mask & revealed);
            let next_id = outcome_ids[v].len();
            let state = *outcome_ids[v].entry(key).or_insert(next_id);
            if state == reach[v].len() {
                reach[v].push(activated);
            }
            states.push(state);
        }
        if prob > 0.0 {
            rows.push((Realization::from_states(states), prob));
        }
    }

    let state_labels: Vec<Vec<String>> = reach
        .iter()
        .map(|per_state| (0..per_state.len()).map(|s| format!("o{s}")).collect())
        .collect();
    let items: Vec<Item> = nodes
        .iter()
        .enumerate()
        .map(|(v, name)| Item::new(v, 1.0, state_labels[v].clone()).with_label(name.clone()))
        .collect();
    // Weights are exact by construction; skip the unit-sum check so wide
    // graphs do not trip it through accumulated rounding.
    let prior = Prior::Tabular(TabularPrior::new(rows, &items, false)?);
    let objective = CascadeObjective {
        nodes,
        edges,
        reach,
        state_labels,
    };
    Ok((items, prior, objective))
}
