//! Items, outcome states, realizations, observation sequences, and priors.
//!
//! An instance has `n` items with dense ids `0..n`. Each item declares a
//! finite list of outcome states; selecting the item reveals exactly one of
//! them. A [`Realization`] fixes the state of every item at once, a
//! [`PartialRealization`] records the ordered observations made so far, and a
//! [`Prior`] is a distribution over realizations, stored either as an
//! explicit weighted table or as independent per-item factors.
//!
//! Tabular priors keep raw positive weights and normalize on access. That
//! makes conditioning a pure filter, so conditioning twice on the same
//! observations returns bit-identical probabilities.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense item identifier, `0..n` within one instance.
pub type ItemId = usize;

/// Index into an item's declared state list.
pub type StateId = usize;

/// A selectable item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: ItemId,
    /// Selection cost, strictly positive.
    pub cost: f64,
    /// Optional display name.
    pub label: Option<String>,
    /// Names of the item's outcome states; `StateId` indexes this list.
    pub states: Vec<String>,
}

impl Item {
    pub fn new(id: ItemId, cost: f64, states: Vec<String>) -> Self {
        Item {
            id,
            cost,
            label: None,
            states,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }
}

/// Checks that `items` is a well-formed dense list: ids `0..n` in order,
/// positive costs, at least one state each.
pub fn validate_items(items: &[Item]) -> Result<()> {
    if items.is_empty() {
        return Err(Error::InvalidInstance("items: must be non-empty".into()));
    }
    for (pos, item) in items.iter().enumerate() {
        if item.id != pos {
            return Err(Error::InvalidInstance(format!(
                "items[{pos}].id: expected dense id {pos}, found {}",
                item.id
            )));
        }
        if item.cost <= 0.0 || !item.cost.is_finite() {
            return Err(Error::InvalidInstance(format!(
                "items[{pos}].cost: must be a positive finite number, found {}",
                item.cost
            )));
        }
        if item.states.is_empty() {
            return Err(Error::InvalidInstance(format!(
                "items[{pos}].states: each item declares at least one state"
            )));
        }
    }
    Ok(())
}

/// One full assignment of an outcome state to every item.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Realization {
    states: Vec<StateId>,
}

impl Realization {
    /// Builds a realization and checks every state against the item list.
    pub fn new(states: Vec<StateId>, items: &[Item]) -> Result<Self> {
        if states.len() != items.len() {
            return Err(Error::InvalidInstance(format!(
                "realization assigns {} states but the instance has {} items",
                states.len(),
                items.len()
            )));
        }
        for (id, (&s, item)) in states.iter().zip(items).enumerate() {
            if s >= item.state_count() {
                return Err(Error::InvalidState { item: id, state: s });
            }
        }
        Ok(Realization { states })
    }

    /// Builds a realization without validating against an item list.
    pub fn from_states(states: Vec<StateId>) -> Self {
        Realization { states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// State of `item`, or an error if the id is outside this realization.
    pub fn state_of(&self, item: ItemId) -> Result<StateId> {
        self.states
            .get(item)
            .copied()
            .ok_or(Error::UnknownItem(item))
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.states.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}:{s}")?;
        }
        write!(f, "}}")
    }
}

/// Ordered record of `(item, observed state)` pairs with no repeated item.
///
/// The order is the selection order; consistency and conditioning treat the
/// record as a set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialRealization {
    observations: Vec<(ItemId, StateId)>,
    #[serde(skip)]
    index: BTreeMap<ItemId, StateId>,
}

impl PartialRealization {
    pub fn empty() -> Self {
        PartialRealization::default()
    }

    /// Builds from an observation sequence, rejecting duplicate items.
    pub fn from_observations(observations: Vec<(ItemId, StateId)>) -> Result<Self> {
        let mut out = PartialRealization::empty();
        for (item, state) in observations {
            out.push(item, state)?;
        }
        Ok(out)
    }

    /// Appends one observation in place.
    pub fn push(&mut self, item: ItemId, state: StateId) -> Result<()> {
        if self.index.contains_key(&item) {
            return Err(Error::DuplicateObservation(item));
        }
        self.observations.push((item, state));
        self.index.insert(item, state);
        Ok(())
    }

    /// Returns a copy extended by one observation.
    pub fn extended(&self, item: ItemId, state: StateId) -> Result<Self> {
        let mut next = self.clone();
        next.push(item, state)?;
        Ok(next)
    }

    /// Number of observations.
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Observations in selection order.
    pub fn observations(&self) -> &[(ItemId, StateId)] {
        &self.observations
    }

    /// Items observed so far, ascending.
    pub fn domain(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.index.keys().copied()
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.index.contains_key(&item)
    }

    pub fn state_of(&self, item: ItemId) -> Option<StateId> {
        self.index.get(&item).copied()
    }

    /// Observations sorted by item id; canonical set form.
    pub fn canonical(&self) -> Vec<(ItemId, StateId)> {
        self.index.iter().map(|(&i, &s)| (i, s)).collect()
    }

    /// True when every observation here also appears in `other`.
    pub fn is_subset_of(&self, other: &PartialRealization) -> bool {
        self.index
            .iter()
            .all(|(i, s)| other.index.get(i) == Some(s))
    }

    /// Stable fingerprint of the canonical form, for stream derivation.
    pub fn fingerprint(&self) -> u64 {
        let bytes = self.canonical().into_iter().flat_map(|(i, s)| {
            (i as u64)
                .to_le_bytes()
                .into_iter()
                .chain((s as u64).to_le_bytes())
        });
        crate::seed::fingerprint(bytes)
    }

    /// Restores the lookup index after deserialization and rejects duplicates.
    pub fn rebuild_index(self) -> Result<Self> {
        PartialRealization::from_observations(self.observations)
    }
}

impl fmt::Display for PartialRealization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (item, state)) in self.observations.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({item}, {state})")?;
        }
        write!(f, "]")
    }
}

/// True when `realization` agrees with every observation in `partial`.
///
/// Order of observations is irrelevant. An observation of an item the
/// realization does not cover is an error, not a mismatch.
pub fn consistent(realization: &Realization, partial: &PartialRealization) -> Result<bool> {
    for &(item, state) in partial.observations() {
        if realization.state_of(item)? != state {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Size caps for exhaustive computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest joint support that `enumerate_support` will expand.
    pub support_cap: u64,
    /// Largest number of distinct observation sets a checker will visit.
    pub psi_cap: u64,
    /// Largest item count accepted by the exact oracles.
    pub oracle_items: usize,
    /// Largest support accepted by the exact oracles.
    pub oracle_support: usize,
    /// Tree depth at which Monte Carlo construction stops expanding.
    pub depth_limit: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            support_cap: 1 << 20,
            psi_cap: 1_000_000,
            oracle_items: 8,
            oracle_support: 64,
            depth_limit: 12,
        }
    }
}

impl Caps {
    pub fn with_support_cap(mut self, cap: u64) -> Self {
        self.support_cap = cap;
        self
    }
}

/// Explicit weighted support over realizations.
///
/// Weights are kept as given (positive, summing to roughly one for a prior
/// fresh from an instance file) and normalized on access.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabularPrior {
    support: Vec<(Realization, f64)>,
    total: f64,
}

impl TabularPrior {
    /// Builds a prior from weighted realizations, dropping zero-weight rows.
    ///
    /// `expect_normalized` additionally requires the kept weights to sum to
    /// one within `TOL_EXACT`; instance files are loaded with this check on,
    /// conditioned posteriors are built with it off.
    pub fn new(
        rows: Vec<(Realization, f64)>,
        items: &[Item],
        expect_normalized: bool,
    ) -> Result<Self> {
        let mut support = Vec::with_capacity(rows.len());
        for (pos, (realization, w)) in rows.into_iter().enumerate() {
            if w < 0.0 || !w.is_finite() {
                return Err(Error::InvalidInstance(format!(
                    "prior.support[{pos}].p: must be a non-negative finite number, found {w}"
                )));
            }
            Realization::new(realization.states().to_vec(), items)?;
            if w > 0.0 {
                support.push((realization, w));
            }
        }
        if support.is_empty() {
            return Err(Error::InvalidInstance(
                "prior.support: no realization has positive probability".into(),
            ));
        }
        let total: f64 = crate::objectives::stable_sum(support.iter().map(|(_, w)| *w));
        if expect_normalized && (total - 1.0).abs() > crate::TOL_EXACT {
            return Err(Error::InvalidInstance(format!(
                "prior.support: probabilities sum to {total}, expected 1"
            )));
        }
        Ok(TabularPrior { support, total })
    }

    /// Weighted rows with positive weight, in construction order.
    pub fn support(&self) -> &[(Realization, f64)] {
        &self.support
    }

    /// Sum of raw weights.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    /// Normalized probability of row `idx`.
    pub fn probability(&self, idx: usize) -> f64 {
        self.support[idx].1 / self.total
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// Product prior: an independent state distribution per item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependentPrior {
    /// `factors[item][state]` is the probability of that state.
    factors: Vec<Vec<f64>>,
}

impl IndependentPrior {
    /// Builds from per-item distributions; each must match the item's state
    /// count and sum to one within `TOL_EXACT`.
    pub fn new(factors: Vec<Vec<f64>>, items: &[Item]) -> Result<Self> {
        if factors.len() != items.len() {
            return Err(Error::InvalidInstance(format!(
                "prior.factors: {} factors for {} items",
                factors.len(),
                items.len()
            )));
        }
        for (id, (factor, item)) in factors.iter().zip(items).enumerate() {
            if factor.len() != item.state_count() {
                return Err(Error::InvalidInstance(format!(
                    "prior.factors.{id}: {} probabilities for {} states",
                    factor.len(),
                    item.state_count()
                )));
            }
            for (s, &p) in factor.iter().enumerate() {
                if p < 0.0 || !p.is_finite() {
                    return Err(Error::InvalidInstance(format!(
                        "prior.factors.{id}.{}: must be a non-negative finite number, found {p}",
                        item.states[s]
                    )));
                }
            }
            let sum: f64 = crate::objectives::stable_sum(factor.iter().copied());
            if (sum - 1.0).abs() > crate::TOL_EXACT {
                return Err(Error::InvalidInstance(format!(
                    "prior.factors.{id}: probabilities sum to {sum}, expected 1"
                )));
            }
        }
        Ok(IndependentPrior { factors })
    }

    pub fn factors(&self) -> &[Vec<f64>] {
        &self.factors
    }

    pub fn factor(&self, item: ItemId) -> Result<&[f64]> {
        self.factors
            .get(item)
            .map(|f| f.as_slice())
            .ok_or(Error::UnknownItem(item))
    }

    /// Number of positive-probability joint realizations.
    pub fn support_size(&self) -> u128 {
        self.factors
            .iter()
            .map(|f| f.iter().filter(|&&p| p > 0.0).count() as u128)
            .product()
    }
}

/// Distribution over realizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Prior {
    Tabular(TabularPrior),
    Independent(IndependentPrior),
}

impl Prior {
    pub fn item_count(&self) -> usize {
        match self {
            Prior::Tabular(t) => t.support.first().map_or(0, |(r, _)| r.len()),
            Prior::Independent(i) => i.factors.len(),
        }
    }
}

/// Restricts `prior` to realizations consistent with `partial` and
/// renormalizes.
///
/// Tabular priors stay tabular (rows filtered, weights untouched, so
/// conditioning twice on the same observations is exact). Independent priors
/// stay independent: each observed item's factor collapses to a point mass.
/// Zero posterior mass is an error.
pub fn condition(prior: &Prior, partial: &PartialRealization) -> Result<Prior> {
    match prior {
        Prior::Tabular(tab) => {
            let mut rows = Vec::new();
            for (realization, w) in &tab.support {
                if consistent(realization, partial)? {
                    rows.push((realization.clone(), *w));
                }
            }
            if rows.is_empty() {
                return Err(Error::InconsistentObservation);
            }
            let total = crate::objectives::stable_sum(rows.iter().map(|(_, w)| *w));
            Ok(Prior::Tabular(TabularPrior {
                support: rows,
                total,
            }))
        }
        Prior::Independent(ind) => {
            let mut factors = ind.factors.clone();
            for &(item, state) in partial.observations() {
                let factor = factors.get_mut(item).ok_or(Error::UnknownItem(item))?;
                if state >= factor.len() {
                    return Err(Error::InvalidState { item, state });
                }
                if factor[state] <= 0.0 {
                    return Err(Error::InconsistentObservation);
                }
                for (s, p) in factor.iter_mut().enumerate() {
                    *p = if s == state { 1.0 } else { 0.0 };
                }
            }
            Ok(Prior::Independent(IndependentPrior { factors }))
        }
    }
}

/// Lists every positive-probability realization with its probability.
///
/// Tabular priors return their support normalized. Independent priors are
/// expanded as a product, refusing with [`Error::SupportTooLarge`] when the
/// expansion would exceed `caps.support_cap`.
pub fn enumerate_support(prior: &Prior, caps: &Caps) -> Result<Vec<(Realization, f64)>> {
    match prior {
        Prior::Tabular(tab) => Ok(tab
            .support
            .iter()
            .map(|(r, w)| (r.clone(), w / tab.total))
            .collect()),
        Prior::Independent(ind) => {
            let size = ind.support_size();
            if size > caps.support_cap as u128 {
                return Err(Error::SupportTooLarge {
                    size,
                    cap: caps.support_cap,
                });
            }
            let positive: Vec<Vec<(StateId, f64)>> = ind
                .factors
                .iter()
                .map(|f| {
                    f.iter()
                        .enumerate()
                        .filter(|(_, &p)| p > 0.0)
                        .map(|(s, &p)| (s, p))
                        .collect()
                })
                .collect();
            let mut out = Vec::with_capacity(size as usize);
            let mut odometer = vec![0usize; positive.len()];
            loop {
                let mut states = Vec::with_capacity(positive.len());
                let mut prob = 1.0;
                for (item, &digit) in odometer.iter().enumerate() {
                    let (s, p) = positive[item][digit];
                    states.push(s);
                    prob *= p;
                }
                out.push((Realization::from_states(states), prob));
                // Advance the mixed-radix odometer; finish after the last combination.
                let mut pos = positive.len();
                loop {
                    if pos == 0 {
                        return Ok(out);
                    }
                    pos -= 1;
                    odometer[pos] += 1;
                    if odometer[pos] < positive[pos].len() {
                        break;
                    }
                    odometer[pos] = 0;
                }
            }
        }
    }
}

/// Draws one realization from the prior.
pub fn sample(prior: &Prior, rng: &mut impl Rng) -> Realization {
    match prior {
        Prior::Tabular(tab) => {
            let u: f64 = rng.gen::<f64>() * tab.total;
            let mut acc = 0.0;
            for (realization, w) in &tab.support {
                acc += w;
                if u < acc {
                    return realization.clone();
                }
            }
            // Rounding can push the cursor past the last row.
            tab.support.last().expect("non-empty support").0.clone()
        }
        Prior::Independent(ind) => {
            let states = ind
                .factors
                .iter()
                .map(|factor| {
                    let u: f64 = rng.gen();
                    let mut acc = 0.0;
                    for (s, &p) in factor.iter().enumerate() {
                        acc += p;
                        if u < acc {
                            return s;
                        }
                    }
                    factor.len() - 1
                })
                .collect();
            Realization::from_states(states)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn pair_tabular() -> (Vec<Item>, Prior) {
        let inst = corpus::two_item_coverage();
        let support = enumerate_support(&inst.prior, &Caps::default()).unwrap();
        let items = inst.items.clone();
        let tab = TabularPrior::new(support, &items, true).unwrap();
        (items, Prior::Tabular(tab))
    }

    #[test]
    fn consistency_ignores_observation_order() {
        let phi = Realization::from_states(vec![0, 1]);
        let fwd = PartialRealization::from_observations(vec![(0, 0), (1, 1)]).unwrap();
        let rev = PartialRealization::from_observations(vec![(1, 1), (0, 0)]).unwrap();
        assert!(consistent(&phi, &fwd).unwrap());
        assert!(consistent(&phi, &rev).unwrap());
    }

    #[test]
    fn consistency_detects_mismatch_and_unknown_item() {
        // Realization with item1 in state "bad" is inconsistent with observing "good".
        let phi2 = Realization::from_states(vec![0, 1]);
        let psi = PartialRealization::from_observations(vec![(1, 0)]).unwrap();
        assert!(!consistent(&phi2, &psi).unwrap());

        let stray = PartialRealization::from_observations(vec![(7, 0)]).unwrap();
        assert!(matches!(
            consistent(&phi2, &stray),
            Err(Error::UnknownItem(7))
        ));
    }

    #[test]
    fn duplicate_observation_rejected() {
        let err = PartialRealization::from_observations(vec![(0, 0), (0, 1)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateObservation(0)));
    }

    #[test]
    fn conditioning_restricts_and_renormalizes() {
        let (_items, prior) = pair_tabular();
        // Observing item1 = "bad" leaves only the second realization, mass 1.
        let psi = PartialRealization::from_observations(vec![(1, 1)]).unwrap();
        let posterior = condition(&prior, &psi).unwrap();
        match &posterior {
            Prior::Tabular(t) => {
                assert_eq!(t.len(), 1);
                assert_eq!(t.probability(0), 1.0);
                assert_eq!(t.support()[0].0.state_of(1).unwrap(), 1);
            }
            _ => panic!("expected tabular posterior"),
        }
    }

    #[test]
    fn conditioning_zero_mass_errors() {
        let (_items, prior) = pair_tabular();
        // Item 0 has only state 0; observing state 1 has zero mass under the
        // support even though the id is in range for the partial record.
        let psi = PartialRealization::from_observations(vec![(0, 1)]).unwrap();
        assert!(matches!(
            condition(&prior, &psi),
            Err(Error::InconsistentObservation)
        ));
    }

    #[test]
    fn conditioning_is_idempotent_exactly() {
        let (_items, prior) = pair_tabular();
        let psi = PartialRealization::from_observations(vec![(1, 0)]).unwrap();
        let once = condition(&prior, &psi).unwrap();
        let twice = condition(&once, &psi).unwrap();
        match (&once, &twice) {
            (Prior::Tabular(a), Prior::Tabular(b)) => {
                assert_eq!(a.len(), b.len());
                for i in 0..a.len() {
                    assert_eq!(a.probability(i).to_bits(), b.probability(i).to_bits());
                }
            }
            _ => panic!("expected tabular posteriors"),
        }
    }

    #[test]
    fn independent_conditioning_collapses_observed_factor() {
        let inst = corpus::two_item_coverage();
        let psi = PartialRealization::from_observations(vec![(1, 0)]).unwrap();
        let posterior = condition(&inst.prior, &psi).unwrap();
        match posterior {
            Prior::Independent(ind) => {
                assert_eq!(ind.factor(0).unwrap(), &[1.0]);
                assert_eq!(ind.factor(1).unwrap(), &[1.0, 0.0]);
            }
            _ => panic!("independent prior must stay independent"),
        }
    }

    #[test]
    fn enumerate_support_expands_product() {
        let inst = corpus::two_item_coverage();
        let support = enumerate_support(&inst.prior, &Caps::default()).unwrap();
        assert_eq!(support.len(), 2);
        assert_eq!(support[0].0.states(), &[0, 0]);
        assert_eq!(support[0].1, 0.5);
        assert_eq!(support[1].0.states(), &[0, 1]);
        assert_eq!(support[1].1, 0.5);
    }

    #[test]
    fn enumerate_support_respects_cap() {
        let items: Vec<Item> = (0..10)
            .map(|i| Item::new(i, 1.0, vec!["a".into(), "b".into()]))
            .collect();
        let factors = vec![vec![0.5, 0.5]; 10];
        let prior = Prior::Independent(IndependentPrior::new(factors, &items).unwrap());
        let caps = Caps::default().with_support_cap(512);
        match enumerate_support(&prior, &caps) {
            Err(Error::SupportTooLarge { size, cap }) => {
                assert_eq!(size, 1024);
                assert_eq!(cap, 512);
            }
            other => panic!("expected SupportTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn zero_probability_rows_dropped_at_construction() {
        let items = vec![Item::new(0, 1.0, vec!["x".into(), "y".into()])];
        let rows = vec![
            (Realization::from_states(vec![0]), 1.0),
            (Realization::from_states(vec![1]), 0.0),
        ];
        let tab = TabularPrior::new(rows, &items, true).unwrap();
        assert_eq!(tab.len(), 1);
    }

    #[test]
    fn tabular_rejects_negative_and_unnormalized() {
        let items = vec![Item::new(0, 1.0, vec!["x".into(), "y".into()])];
        let neg = TabularPrior::new(
            vec![(Realization::from_states(vec![0]), -0.2)],
            &items,
            true,
        );
        assert!(neg.is_err());
        let unnorm =
            TabularPrior::new(vec![(Realization::from_states(vec![0]), 0.7)], &items, true);
        assert!(unnorm.is_err());
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let inst = corpus::two_item_coverage();
        let mut r1 = crate::seed::stream(42, crate::seed::Purpose::Rollout, 0);
        let mut r2 = crate::seed::stream(42, crate::seed::Purpose::Rollout, 0);
        for _ in 0..32 {
            assert_eq!(sample(&inst.prior, &mut r1), sample(&inst.prior, &mut r2));
        }
    }

    #[test]
    fn sampling_matches_enumeration_frequencies() {
        let inst = corpus::two_item_coverage();
        let mut rng = crate::seed::stream(7, crate::seed::Purpose::Rollout, 1);
        let n = 100_000;
        let mut bad = 0usize;
        for _ in 0..n {
            if sample(&inst.prior, &mut rng).state_of(1).unwrap() == 1 {
                bad += 1;
            }
        }
        // Three standard errors around p = 0.5.
        let se = (0.25_f64 / n as f64).sqrt();
        assert!((bad as f64 / n as f64 - 0.5).abs() < 3.0 * se);
    }
}
