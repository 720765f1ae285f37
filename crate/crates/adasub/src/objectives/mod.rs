//! Objective functions and expectation machinery.
//!
//! An [`Objective`] maps a set of observed `(item, state)` selections and a
//! realization to a non-negative utility, normalized so that selecting
//! nothing is worth nothing (the hypothesis identification objective is
//! offset by design; see its module docs). The [`Evaluator`] computes
//! posterior expectations and marginal benefits over a prior, exactly where
//! the structure allows and by seeded Monte Carlo otherwise.

mod cascade;
mod coverage;
mod set_function;
mod version_space;

pub use cascade::{compile_cascade, CascadeEdge, CascadeObjective};
pub use coverage::CoverageObjective;
pub use set_function::{
    deterministic_items_and_prior, make_deterministic, wrap_table_unchecked, SetFunctionObjective,
    SetFunctionTable,
};
pub use version_space::VersionSpaceObjective;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    condition, consistent, enumerate_support, sample, Caps, ItemId, PartialRealization, Prior,
    Realization, StateId,
};
use crate::seed::{stream, Purpose};

/// Sums floating point terms in a permutation-independent order.
///
/// Terms are sorted ascending before accumulation, so two call sites handing
/// in the same multiset of terms get bit-identical results. Symmetric
/// instances then produce exact marginal ties, which the lowest-id tie-break
/// relies on.
pub fn stable_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = terms.into_iter().collect();
    v.sort_by(f64::total_cmp);
    // Fold from positive zero: `Iterator::sum` would return -0.0 for an
    // empty list, which then leaks into serialized reports.
    v.into_iter().fold(0.0, |acc, x| acc + x)
}

/// A marginal benefit computed at a particular observation depth.
///
/// `stamp` records how many observations existed when the value was
/// computed; the lazy queue uses it to detect stale entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalBenefit {
    pub item: ItemId,
    pub value: f64,
    pub stamp: usize,
}

/// How expectations are computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub enum Backend {
    /// Exact arithmetic over the prior structure.
    #[default]
    Enumerate,
    /// Seeded Monte Carlo with a fixed sample count.
    Sample { samples: usize, seed: u64 },
}

/// Default Monte Carlo sample count.
pub const DEFAULT_SAMPLES: usize = 10_000;

/// An expectation together with its standard error when estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: Option<f64>,
}

/// The supported objective kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Objective {
    Coverage(CoverageObjective),
    Cascade(CascadeObjective),
    VersionSpace(VersionSpaceObjective),
    SetFunction(SetFunctionObjective),
}

impl Objective {
    pub fn kind(&self) -> &'static str {
        match self {
            Objective::Coverage(_) => "coverage",
            Objective::Cascade(_) => "cascade",
            Objective::VersionSpace(_) => "version_space",
            Objective::SetFunction(_) => "set_function",
        }
    }

    /// True when the value is a function of the observed `(item, state)`
    /// pairs alone. Hypothesis identification also depends on which
    /// realization is the truth, so it is the one kind that is not.
    pub fn is_state_local(&self) -> bool {
        !matches!(self, Objective::VersionSpace(_))
    }

    /// Value from observed pairs alone; only valid when
    /// [`Objective::is_state_local`] holds.
    pub fn value_from_pairs(&self, pairs: &[(ItemId, StateId)]) -> Result<f64> {
        match self {
            Objective::Coverage(o) => o.union_weight(pairs.iter().copied()),
            Objective::Cascade(o) => o.activated_count(pairs.iter().copied()),
            Objective::SetFunction(o) => o.value_of(pairs.iter().map(|&(i, _)| i)),
            Objective::VersionSpace(_) => Err(Error::InvalidConfig(
                "hypothesis identification value needs the full realization".into(),
            )),
        }
    }

    /// Value of selecting `dom` when the world is `phi`.
    pub fn value_with_realization(&self, dom: &[ItemId], phi: &Realization) -> Result<f64> {
        match self {
            Objective::VersionSpace(o) => o.identification_value(dom, phi),
            _ => {
                let pairs: Vec<(ItemId, StateId)> = dom
                    .iter()
                    .map(|&i| phi.state_of(i).map(|s| (i, s)))
                    .collect::<Result<_>>()?;
                self.value_from_pairs(&pairs)
            }
        }
    }
}

/// Realized utility of the selections recorded in `partial` under `phi`.
///
/// The pair must be consistent; the value depends on `partial` only through
/// the set of selected items.
pub fn value(
    objective: &Objective,
    partial: &PartialRealization,
    phi: &Realization,
) -> Result<f64> {
    if !consistent(phi, partial)? {
        return Err(Error::InconsistentObservation);
    }
    let dom: Vec<ItemId> = partial.domain().collect();
    objective.value_with_realization(&dom, phi)
}

/// Posterior expected utility of the current selections. Exact backend.
pub fn expected_value(
    objective: &Objective,
    partial: &PartialRealization,
    prior: &Prior,
) -> Result<f64> {
    Evaluator::exact(objective, prior)?.expected_value(partial)
}

/// Expected gain of adding `item` to the current selections. Exact backend.
pub fn marginal(
    objective: &Objective,
    item: ItemId,
    partial: &PartialRealization,
    prior: &Prior,
) -> Result<MarginalBenefit> {
    Evaluator::exact(objective, prior)?.marginal(item, partial)
}

/// Expectation engine binding an objective to a prior.
///
/// Three strategies, chosen at construction:
/// - tabular priors: iterate the explicit support;
/// - independent priors with state-local objectives: closed form over the
///   selected items' factors, no support expansion at any size;
/// - independent priors otherwise: expand to a table, subject to the cap.
///
/// The `Sample` backend replaces marginal and expected-value queries with
/// seeded Monte Carlo over the conditioned prior. Candidates evaluated at
/// the same observation set share one sample stream (common random numbers),
/// and the stream is keyed by the observation fingerprint, so evaluating
/// extra candidates never shifts anyone else's draws.
pub struct Evaluator<'a> {
    objective: &'a Objective,
    prior: &'a Prior,
    backend: Backend,
    caps: Caps,
    /// Materialized support for the tabular/expanded strategies.
    rows: Option<Vec<(Realization, f64)>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        objective: &'a Objective,
        prior: &'a Prior,
        backend: Backend,
        caps: Caps,
    ) -> Result<Self> {
        let rows = match prior {
            Prior::Tabular(tab) => Some(tab.support().to_vec()),
            Prior::Independent(_) if objective.is_state_local() => None,
            Prior::Independent(_) => Some(enumerate_support(prior, &caps)?),
        };
        Ok(Evaluator {
            objective,
            prior,
            backend,
            caps,
            rows,
        })
    }

    /// Exact backend with default caps.
    pub fn exact(objective: &'a Objective, prior: &'a Prior) -> Result<Self> {
        Evaluator::new(objective, prior, Backend::Enumerate, Caps::default())
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub fn objective(&self) -> &Objective {
        self.objective
    }

    pub fn prior(&self) -> &Prior {
        self.prior
    }

    /// Weighted support rows consistent with `partial`, with their total.
    fn consistent_rows(
        &self,
        partial: &PartialRealization,
    ) -> Result<(Vec<(&Realization, f64)>, f64)> {
        let rows = self.rows.as_ref().expect("tabular strategy");
        let mut keep = Vec::new();
        for (phi, w) in rows {
            if consistent(phi, partial)? {
                keep.push((phi, *w));
            }
        }
        if keep.is_empty() {
            return Err(Error::InconsistentObservation);
        }
        let total = stable_sum(keep.iter().map(|&(_, w)| w));
        Ok((keep, total))
    }

    /// The full weighted support, expanding independent priors on demand
    /// (used by quota feasibility validation and the oracles).
    pub fn support_rows(&self) -> Result<Vec<(Realization, f64)>> {
        match &self.rows {
            Some(rows) => Ok(rows.clone()),
            None => enumerate_support(self.prior, &self.caps),
        }
    }

    /// Posterior expected utility of the selections in `partial`.
    pub fn expected_value(&self, partial: &PartialRealization) -> Result<f64> {
        self.expected_value_estimate(partial).map(|e| e.value)
    }

    /// Expected utility with a standard error when sampled.
    pub fn expected_value_estimate(&self, partial: &PartialRealization) -> Result<Estimate> {
        if let Backend::Sample { samples, seed } = self.backend {
            let dom: Vec<ItemId> = partial.domain().collect();
            let posterior = condition(self.prior, partial)?;
            let mut rng = stream(seed, Purpose::Expectation, partial.fingerprint());
            let mut vals = Vec::with_capacity(samples);
            for _ in 0..samples {
                let phi = sample(&posterior, &mut rng);
                vals.push(self.objective.value_with_realization(&dom, &phi)?);
            }
            return Ok(mean_and_se(&vals));
        }
        let value = match &self.rows {
            None => {
                // State-local objective over an independent prior: the value
                // is fully determined by the observations themselves.
                self.objective.value_from_pairs(&partial.canonical())?
            }
            Some(_) => {
                let dom: Vec<ItemId> = partial.domain().collect();
                let (rows, total) = self.consistent_rows(partial)?;
                let acc = stable_sum(
                    rows.iter()
                        .map(|(phi, w)| {
                            self.objective
                                .value_with_realization(&dom, phi)
                                .map(|v| v * w)
                        })
                        .collect::<Result<Vec<f64>>>()?,
                );
                acc / total
            }
        };
        Ok(Estimate {
            value,
            std_err: None,
        })
    }

    /// Expected gain of adding `item` given the observations so far.
    pub fn marginal(&self, item: ItemId, partial: &PartialRealization) -> Result<MarginalBenefit> {
        self.marginal_impl(item, partial, None).map(|(mb, _)| mb)
    }

    /// Expected gain when value above `cap` is worthless: the expected change
    /// in the capped value `min(cap, f)`, realization by realization.
    ///
    /// This is what a minimum-cost coverage step should maximize. Surplus
    /// beyond the quota never shortens the remaining work, and ranking items
    /// by their raw gain lets a long-shot item with a large but useless
    /// upside outrank one that certifies the quota outright.
    pub fn marginal_capped(
        &self,
        item: ItemId,
        partial: &PartialRealization,
        cap: f64,
    ) -> Result<MarginalBenefit> {
        self.marginal_impl(item, partial, Some(cap))
            .map(|(mb, _)| mb)
    }

    /// Marginal benefit with a standard error when sampled.
    pub fn marginal_estimate(
        &self,
        item: ItemId,
        partial: &PartialRealization,
    ) -> Result<(MarginalBenefit, Option<f64>)> {
        self.marginal_impl(item, partial, None)
    }

    fn marginal_impl(
        &self,
        item: ItemId,
        partial: &PartialRealization,
        cap: Option<f64>,
    ) -> Result<(MarginalBenefit, Option<f64>)> {
        if partial.contains(item) {
            return Err(Error::AlreadySelected(item));
        }
        // The cap has to clip each realization's value before the difference
        // is taken: the expectation of a clipped value is not the clip of the
        // expectation.
        let clip = |v: f64| cap.map_or(v, |q| v.min(q));
        let stamp = partial.len();
        if let Backend::Sample { samples, seed } = self.backend {
            let dom: Vec<ItemId> = partial.domain().collect();
            let mut dom_plus = dom.clone();
            dom_plus.push(item);
            let posterior = condition(self.prior, partial)?;
            let mut rng = stream(seed, Purpose::Marginal, partial.fingerprint());
            let mut gains = Vec::with_capacity(samples);
            for _ in 0..samples {
                let phi = sample(&posterior, &mut rng);
                let with = self.objective.value_with_realization(&dom_plus, &phi)?;
                let without = self.objective.value_with_realization(&dom, &phi)?;
                gains.push(clip(with) - clip(without));
            }
            let est = mean_and_se(&gains);
            return Ok((
                MarginalBenefit {
                    item,
                    value: est.value,
                    stamp,
                },
                est.std_err,
            ));
        }
        let value = match &self.rows {
            None => {
                let ind = match self.prior {
                    Prior::Independent(ind) => ind,
                    Prior::Tabular(_) => unreachable!("factored strategy implies independent"),
                };
                let factor = ind.factor(item)?;
                let pairs = partial.canonical();
                let base = clip(self.objective.value_from_pairs(&pairs)?);
                let mut terms = Vec::new();
                for (s, &p) in factor.iter().enumerate() {
                    if p > 0.0 {
                        let mut with = pairs.clone();
                        with.push((item, s));
                        terms.push(p * (clip(self.objective.value_from_pairs(&with)?) - base));
                    }
                }
                stable_sum(terms)
            }
            Some(_) => {
                let dom: Vec<ItemId> = partial.domain().collect();
                let mut dom_plus = dom.clone();
                dom_plus.push(item);
                // Validate the item id against the realization width.
                let (rows, total) = self.consistent_rows(partial)?;
                let mut terms = Vec::with_capacity(rows.len());
                for (phi, w) in &rows {
                    phi.state_of(item)?;
                    let with = self.objective.value_with_realization(&dom_plus, phi)?;
                    let without = self.objective.value_with_realization(&dom, phi)?;
                    terms.push(w * (clip(with) - clip(without)));
                }
                stable_sum(terms) / total
            }
        };
        Ok((MarginalBenefit { item, value, stamp }, None))
    }

    /// Posterior distribution of `item`'s state, positive entries only.
    pub fn state_distribution(
        &self,
        item: ItemId,
        partial: &PartialRealization,
    ) -> Result<Vec<(StateId, f64)>> {
        match self.prior {
            Prior::Independent(ind) => {
                // Unselected items are independent of everything observed.
                let factor = ind.factor(item)?;
                Ok(factor
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(s, &p)| (s, p))
                    .collect())
            }
            Prior::Tabular(_) => {
                let (rows, total) = self.consistent_rows(partial)?;
                let mut mass: std::collections::BTreeMap<StateId, Vec<f64>> = Default::default();
                for (phi, w) in rows {
                    mass.entry(phi.state_of(item)?).or_default().push(w);
                }
                Ok(mass
                    .into_iter()
                    .map(|(s, ws)| (s, stable_sum(ws) / total))
                    .filter(|&(_, p)| p > 0.0)
                    .collect())
            }
        }
    }

    /// Smallest utility over realizations still consistent with `partial`.
    ///
    /// This is what a quota stop certifies: the target is reached no matter
    /// which consistent realization is the truth. Always exact.
    pub fn min_consistent_value(&self, partial: &PartialRealization) -> Result<f64> {
        match &self.rows {
            None => self.objective.value_from_pairs(&partial.canonical()),
            Some(_) => {
                let dom: Vec<ItemId> = partial.domain().collect();
                let (rows, _) = self.consistent_rows(partial)?;
                let mut min = f64::INFINITY;
                for (phi, _) in rows {
                    let v = self.objective.value_with_realization(&dom, phi)?;
                    if v < min {
                        min = v;
                    }
                }
                Ok(min)
            }
        }
    }

    /// Largest utility the instance can ever produce: the best value of
    /// selecting every item over the whole support.
    pub fn max_attainable(&self) -> Result<f64> {
        let rows = self.support_rows()?;
        let dom: Vec<ItemId> = (0..self.prior.item_count()).collect();
        let mut max = f64::NEG_INFINITY;
        for (phi, _) in &rows {
            let v = self.objective.value_with_realization(&dom, phi)?;
            if v > max {
                max = v;
            }
        }
        Ok(max)
    }

    /// Errors with the offending realization if some positive-probability
    /// realization cannot reach `quota` even after selecting every item.
    pub fn validate_quota(&self, quota: f64) -> Result<()> {
        if quota <= 0.0 || !quota.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "quota must be positive, found {quota}"
            )));
        }
        let rows = self.support_rows()?;
        let dom: Vec<ItemId> = (0..self.prior.item_count()).collect();
        for (phi, _) in &rows {
            let v = self.objective.value_with_realization(&dom, phi)?;
            if v < quota - crate::TOL_SUM {
                return Err(Error::InfeasibleQuota {
                    quota,
                    realization: phi.to_string(),
                });
            }
        }
        Ok(())
    }
}

fn mean_and_se(values: &[f64]) -> Estimate {
    let n = values.len() as f64;
    let mean = stable_sum(values.iter().copied()) / n;
    let var = stable_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n * (n - 1.0).max(1.0));
    Estimate {
        value: mean,
        std_err: Some(var.max(0.0).sqrt()),
    }
}
