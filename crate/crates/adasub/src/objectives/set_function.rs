//! Deterministic set functions as a degenerate adaptive instance.
//!
//! A table over all subsets of the items defines a classic set function.
//! Wrapping it with single-state items and a point-mass prior reduces the
//! adaptive machinery to ordinary greedy maximization, which is how the
//! adaptive/classic equivalence is exercised.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Item, ItemId, Prior, Realization, TabularPrior};
use crate::objectives::Objective;

/// Dense table `subset bitmask -> value` over `n` items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetFunctionTable {
    n: usize,
    values: Vec<f64>,
}

impl SetFunctionTable {
    /// Builds a table; requires `values.len() == 2^n` and `values[0] == 0`.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > 24 {
            return Err(Error::TooLarge(format!(
                "set function table over {n} items"
            )));
        }
        if values.len() != 1usize << n {
            return Err(Error::InvalidInstance(format!(
                "set function table has {} entries, expected {}",
                values.len(),
                1usize << n
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidInstance(format!(
                "set function table not normalized: value of the empty set is {}",
                values[0]
            )));
        }
        for (mask, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidInstance(format!(
                    "set function table entry {mask} is not finite"
                )));
            }
        }
        Ok(SetFunctionTable { n, values })
    }

    /// Table for a coverage function: `f(S) = weight of the union of covers`.
    pub fn from_covers(covers: &[Vec<usize>], weights: &[f64]) -> Result<Self> {
        let n = covers.len();
        if n > 24 {
            return Err(Error::TooLarge(format!(
                "set function table over {n} items"
            )));
        }
        let mut values = Vec::with_capacity(1 << n);
        for mask in 0u32..(1u32 << n) {
            let mut hit = vec![false; weights.len()];
            for (i, subset) in covers.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for &x in subset {
                        hit[x] = true;
                    }
                }
            }
            let mut total = 0.0;
            for (x, &h) in hit.iter().enumerate() {
                if h {
                    total += weights[x];
                }
            }
            values.push(total);
        }
        SetFunctionTable::new(n, values)
    }

    pub fn item_count(&self) -> usize {
        self.n
    }

    pub fn value_of_mask(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    /// Value of an arbitrary item set.
    pub fn value_of(&self, set: impl IntoIterator<Item = ItemId>) -> Result<f64> {
        let mut mask = 0usize;
        for i in set {
            if i >= self.n {
                return Err(Error::UnknownItem(i));
            }
            mask |= 1 << i;
        }
        Ok(self.values[mask])
    }

    /// True when adding any item never decreases the value.
    pub fn is_monotone(&self) -> bool {
        for mask in 0..self.values.len() {
            for i in 0..self.n {
                if mask & (1 << i) == 0 && self.values[mask | (1 << i)] < self.values[mask] {
                    return false;
                }
            }
        }
        true
    }
}

/// Objective wrapper around a set function table; states are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetFunctionObjective {
    table: SetFunctionTable,
}

impl SetFunctionObjective {
    pub fn table(&self) -> &SetFunctionTable {
        &self.table
    }

    pub fn value_of(&self, dom: impl IntoIterator<Item = ItemId>) -> Result<f64> {
        self.table.value_of(dom)
    }
}

/// Single-state items and the point-mass prior matching `table`.
pub fn deterministic_items_and_prior(n: usize) -> Result<(Vec<Item>, Prior)> {
    let items: Vec<Item> = (0..n)
        .map(|i| Item::new(i, 1.0, vec!["s".into()]))
        .collect();
    let row = (Realization::from_states(vec![0; n]), 1.0);
    let prior = Prior::Tabular(TabularPrior::new(vec![row], &items, true)?);
    Ok((items, prior))
}

/// Wraps a monotone normalized set function table for the adaptive machinery.
///
/// Returns the synthesized items, the point-mass prior, and the objective.
/// The adaptive marginal benefit of an item then equals the classic marginal
/// gain `f(S + e) - f(S)` exactly.
pub fn make_deterministic(table: SetFunctionTable) -> Result<(Vec<Item>, Prior, Objective)> {
    if !table.is_monotone() {
        return Err(Error::InvalidInstance(
            "set function table is not monotone".into(),
        ));
    }
    let (items, prior) = deterministic_items_and_prior(table.item_count())?;
    Ok((
        items,
        prior,
        Objective::SetFunction(SetFunctionObjective { table }),
    ))
}

/// Wraps a table without the monotonicity requirement.
///
/// Exists so the property checkers can be pointed at objectives that are
/// deliberately not adaptive monotone or not adaptive submodular.
pub fn wrap_table_unchecked(table: SetFunctionTable) -> Result<(Vec<Item>, Prior, Objective)> {
    let (items, prior) = deterministic_items_and_prior(table.item_count())?;
    Ok((
        items,
        prior,
        Objective::SetFunction(SetFunctionObjective { table }),
    ))
}
