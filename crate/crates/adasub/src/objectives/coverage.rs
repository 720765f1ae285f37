//! Stochastic weighted coverage.
//!
//! Each `(item, state)` pair covers a subset of a weighted ground set; the
//! objective value is the total weight of the union covered by the observed
//! pairs. Which subset an item contributes is only known once its state is
//! revealed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Item, ItemId, StateId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageObjective {
    ground: Vec<String>,
    weights: Vec<f64>,
    /// `covers[item][state]` lists covered ground element indices.
    covers: Vec<Vec<Vec<usize>>>,
}

impl CoverageObjective {
    /// Builds and validates a coverage objective. `weights` defaults to one
    /// per ground element.
    pub fn new(
        ground: Vec<String>,
        weights: Option<Vec<f64>>,
        covers: Vec<Vec<Vec<usize>>>,
        items: &[Item],
    ) -> Result<Self> {
        let weights = weights.unwrap_or_else(|| vec![1.0; ground.len()]);
        if weights.len() != ground.len() {
            return Err(Error::InvalidInstance(format!(
                "objective.weights: {} weights for {} ground elements",
                weights.len(),
                ground.len()
            )));
        }
        for (x, &w) in weights.iter().enumerate() {
            if w < 0.0 || !w.is_finite() {
                return Err(Error::InvalidInstance(format!(
                    "objective.weights.{}: must be a non-negative finite number, found {w}",
                    ground[x]
                )));
            }
        }
        if covers.len() != items.len() {
            return Err(Error::InvalidInstance(format!(
                "objective.covers: table has {} items, instance has {}",
                covers.len(),
                items.len()
            )));
        }
        for (item, per_state) in covers.iter().enumerate() {
            if per_state.len() != items[item].state_count() {
                return Err(Error::InvalidInstance(format!(
                    "objective.covers: item {item} has {} state rows for {} states",
                    per_state.len(),
                    items[item].state_count()
                )));
            }
            for subset in per_state {
                for &x in subset {
                    if x >= ground.len() {
                        return Err(Error::InvalidInstance(format!(
                            "objective.covers: item {item} covers unknown ground element index {x}"
                        )));
                    }
                }
            }
        }
        Ok(CoverageObjective {
            ground,
            weights,
            covers,
        })
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn covers(&self, item: ItemId, state: StateId) -> &[usize] {
        &self.covers[item][state]
    }

    pub fn covers_table(&self) -> &[Vec<Vec<usize>>] {
        &self.covers
    }

    /// Weight of the union covered by the given pairs. Summation runs in
    /// ground element order, so any permutation of the pairs gives the same
    /// bits.
    pub fn union_weight(&self, pairs: impl IntoIterator<Item = (ItemId, StateId)>) -> Result<f64> {
        let mut covered = vec![false; self.ground.len()];
        for (item, state) in pairs {
            let per_state = self.covers.get(item).ok_or(Error::UnknownItem(item))?;
            let subset = per_state
                .get(state)
                .ok_or(Error::InvalidState { item, state })?;
            for &x in subset {
                covered[x] = true;
            }
        }
        let mut total = 0.0;
        for (x, hit) in covered.iter().enumerate() {
            if *hit {
                total += self.weights[x];
            }
        }
        Ok(total)
    }
}
