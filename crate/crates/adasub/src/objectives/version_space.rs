//! Hypothesis identification by querying.
//!
//! A finite set of hypotheses carries prior masses. Items are queries; the
//! hypothesis determines every query's answer through a fixed answer table.
//! After some answers have been observed, the version space is the set of
//! hypotheses that agree with all of them. The objective value under the true
//! hypothesis `h` is
//!
//! `1 - (mass of hypotheses other than h still in the version space)`,
//!
//! i.e. the mass eliminated so far plus the mass of the truth itself. It
//! reaches 1 exactly when the version space is the singleton `{h}`, so a
//! quota of 1 expresses "identify the hypothesis". The value at no
//! observations is `mass(h)`, not 0: the offset is what makes the quota
//! realizable, and it cancels out of every marginal benefit.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Item, ItemId, Prior, Realization, StateId, TabularPrior};
use crate::objectives::stable_sum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VersionSpaceObjective {
    hypotheses: Vec<String>,
    masses: Vec<f64>,
    /// `answers[query][hypothesis]` is the state the query reveals.
    answers: Vec<Vec<StateId>>,
    /// Full answer column -> hypothesis index.
    #[serde(skip)]
    columns: HashMap<Vec<StateId>, usize>,
}

impl VersionSpaceObjective {
    /// Builds and validates the objective. Masses must be positive and sum
    /// to one; answer columns must be pairwise distinct so observing every
    /// query pins down the hypothesis.
    pub fn new(
        hypotheses: Vec<(String, f64)>,
        answers: Vec<Vec<StateId>>,
        items: &[Item],
    ) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::InvalidInstance(
                "objective.hypotheses: must be non-empty".into(),
            ));
        }
        let (names, masses): (Vec<String>, Vec<f64>) = hypotheses.into_iter().unzip();
        for (h, &p) in masses.iter().enumerate() {
            if p <= 0.0 || !p.is_finite() {
                return Err(Error::InvalidInstance(format!(
                    "objective.hypotheses.{}: mass must be positive, found {p}",
                    names[h]
                )));
            }
        }
        let total = stable_sum(masses.iter().copied());
        if (total - 1.0).abs() > crate::TOL_EXACT {
            return Err(Error::InvalidInstance(format!(
                "objective.hypotheses: masses sum to {total}, expected 1"
            )));
        }
        if answers.len() != items.len() {
            return Err(Error::InvalidInstance(format!(
                "objective.answers: table has {} queries, instance has {} items",
                answers.len(),
                items.len()
            )));
        }
        for (q, row) in answers.iter().enumerate() {
            if row.len() != names.len() {
                return Err(Error::InvalidInstance(format!(
                    "objective.answers.{q}: {} answers for {} hypotheses",
                    row.len(),
                    names.len()
                )));
            }
            for (h, &s) in row.iter().enumerate() {
                if s >= items[q].state_count() {
                    return Err(Error::InvalidInstance(format!(
                        "objective.answers.{q}.{}: unknown state index {s}",
                        names[h]
                    )));
                }
            }
        }
        let mut columns = HashMap::new();
        for h in 0..names.len() {
            let column: Vec<StateId> = answers.iter().map(|row| row[h]).collect();
            if let Some(prev) = columns.insert(column, h) {
                return Err(Error::InvalidInstance(format!(
                    "objective.hypotheses: {} and {} answer every query identically \
                     and can never be told apart",
                    names[prev], names[h]
                )));
            }
        }
        Ok(VersionSpaceObjective {
            hypotheses: names,
            masses,
            answers,
            columns,
        })
    }

    pub fn hypotheses(&self) -> &[String] {
        &self.hypotheses
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn answers(&self) -> &[Vec<StateId>] {
        &self.answers
    }

    /// Rebuilds the column lookup after deserialization.
    pub fn rebuild_columns(self) -> Result<Self> {
        let hypotheses = self.hypotheses.into_iter().zip(self.masses).collect();
        VersionSpaceObjective::new(hypotheses, self.answers, &[])
            .map_err(|_| Error::InvalidInstance("version space table corrupt".into()))
    }

    /// The realization induced by hypothesis `h`: its answer to every query.
    pub fn column(&self, h: usize) -> Realization {
        Realization::from_states(self.answers.iter().map(|row| row[h]).collect())
    }

    /// Prior over induced realizations, one row per hypothesis.
    pub fn induced_prior(&self, items: &[Item]) -> Result<Prior> {
        let rows = (0..self.hypotheses.len())
            .map(|h| (self.column(h), self.masses[h]))
            .collect();
        Ok(Prior::Tabular(TabularPrior::new(rows, items, false)?))
    }

    fn hypothesis_of(&self, phi: &Realization) -> Result<usize> {
        self.columns.get(phi.states()).copied().ok_or_else(|| {
            Error::InvalidConfig("realization does not match any hypothesis answer column".into())
        })
    }

    /// Hypotheses consistent with `phi`'s answers on the queried items.
    fn version_space(&self, dom: &[ItemId], phi: &Realization) -> Result<Vec<usize>> {
        let mut alive: Vec<usize> = (0..self.hypotheses.len()).collect();
        for &q in dom {
            let row = self.answers.get(q).ok_or(Error::UnknownItem(q))?;
            let observed = phi.state_of(q)?;
            alive.retain(|&h| row[h] == observed);
        }
        Ok(alive)
    }

    /// Objective value: one minus the mass of surviving rivals of the truth.
    pub fn identification_value(&self, dom: &[ItemId], phi: &Realization) -> Result<f64> {
        let truth = self.hypothesis_of(phi)?;
        let alive = self.version_space(dom, phi)?;
        let rival_mass = stable_sum(
            alive
                .iter()
                .filter(|&&h| h != truth)
                .map(|&h| self.masses[h]),
        );
        Ok(1.0 - rival_mass)
    }
}
