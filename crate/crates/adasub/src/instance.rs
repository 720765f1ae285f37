//! Instance files: a named bundle of items, prior, and objective.
//!
//! The on-disk format is JSON. Coverage instances declare `items` and
//! `prior` explicitly. Cascade instances declare only the graph; items (one
//! per node, unit cost) and the prior over edge outcomes are derived.
//! Hypothesis identification instances declare `items` (the queries and
//! their answer states) and `hypotheses`; the prior is derived from the
//! hypothesis masses. State names map to state ids by declaration order.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Caps, Item, Prior, Realization, TabularPrior};
use crate::objectives::{
    compile_cascade, CascadeEdge, CoverageObjective, Evaluator, Objective, VersionSpaceObjective,
};

/// A fully constructed problem instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub items: Vec<Item>,
    pub prior: Prior,
    pub objective: Objective,
    /// Largest attainable value, when supplied by the file. Computed on
    /// demand otherwise.
    pub declared_f_max: Option<f64>,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        items: Vec<Item>,
        prior: Prior,
        objective: Objective,
    ) -> Self {
        Instance {
            name: name.into(),
            items,
            prior,
            objective,
            declared_f_max: None,
        }
    }

    /// Largest value any realization can reach with every item selected.
    ///
    /// Uses the declared value when present (sampled instances), otherwise
    /// enumerates the support under `caps`.
    pub fn f_max(&self, caps: &Caps) -> Result<f64> {
        if let Some(v) = self.declared_f_max {
            return Ok(v);
        }
        Evaluator::new(&self.objective, &self.prior, Default::default(), *caps)?.max_attainable()
    }

    pub fn from_json_str(name: &str, text: &str, caps: &Caps) -> Result<Instance> {
        let raw: RawInstance = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInstance(format!("parse error: {e}")))?;
        raw.into_instance(name, caps)
    }

    pub fn load(path: impl AsRef<Path>, caps: &Caps) -> Result<Instance> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInstance(format!("{}: {e}", path.display())))?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "instance".into());
        Instance::from_json_str(&stem, &text, caps)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let raw = self.to_raw()?;
        serde_json::to_string_pretty(&raw)
            .map_err(|e| Error::InvalidInstance(format!("serialize error: {e}")))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = self.to_json_string()?;
        std::fs::write(path.as_ref(), text + "\n")
            .map_err(|e| Error::InvalidInstance(format!("{}: {e}", path.as_ref().display())))
    }

    fn to_raw(&self) -> Result<RawInstance> {
        let objective = match &self.objective {
            Objective::Coverage(o) => RawObjective::Coverage {
                ground: o.ground().to_vec(),
                covers: {
                    let mut map = BTreeMap::new();
                    for (item, per_state) in o.covers_table().iter().enumerate() {
                        for (state, elems) in per_state.iter().enumerate() {
                            if !elems.is_empty() {
                                let key = format!("{item}:{}", self.items[item].states[state]);
                                let names: Vec<String> =
                                    elems.iter().map(|&e| o.ground()[e].clone()).collect();
                                map.insert(key, names);
                            }
                        }
                    }
                    map
                },
                weights: {
                    if o.weights().iter().all(|&w| w == 1.0) {
                        None
                    } else {
                        Some(
                            o.ground()
                                .iter()
                                .cloned()
                                .zip(o.weights().iter().copied())
                                .collect(),
                        )
                    }
                },
            },
            Objective::Cascade(o) => RawObjective::Cascade {
                nodes: o.nodes().to_vec(),
                edges: o.edges().to_vec(),
            },
            Objective::VersionSpace(o) => RawObjective::VersionSpace {
                hypotheses: o
                    .hypotheses()
                    .iter()
                    .cloned()
                    .zip(o.masses().iter().copied())
                    .collect(),
                answers: {
                    let mut map: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
                    for (q, row) in o.answers().iter().enumerate() {
                        let mut per_hyp = BTreeMap::new();
                        for (h, &s) in row.iter().enumerate() {
                            per_hyp
                                .insert(o.hypotheses()[h].clone(), self.items[q].states[s].clone());
                        }
                        map.insert(q.to_string(), per_hyp);
                    }
                    map
                },
            },
            Objective::SetFunction(_) => {
                return Err(Error::InvalidInstance(
                    "set-function instances are constructed in code, not from files".into(),
                ))
            }
        };
        let (items, prior) = match &self.objective {
            // Derived for cascade; queries only (no prior) for identification.
            Objective::Cascade(_) => (None, None),
            Objective::VersionSpace(_) => (Some(raw_items(&self.items)), None),
            _ => (
                Some(raw_items(&self.items)),
                Some(raw_prior(&self.prior, &self.items)?),
            ),
        };
        Ok(RawInstance {
            name: Some(self.name.clone()),
            items,
            prior,
            objective,
            f_max: self.declared_f_max,
        })
    }
}

fn raw_items(items: &[Item]) -> Vec<RawItem> {
    items
        .iter()
        .map(|it| RawItem {
            id: it.id,
            cost: Some(it.cost),
            label: it.label.clone(),
            states: it.states.clone(),
        })
        .collect()
}

fn raw_prior(prior: &Prior, items: &[Item]) -> Result<RawPrior> {
    Ok(match prior {
        Prior::Independent(ind) => RawPrior::Independent {
            factors: items
                .iter()
                .map(|it| {
                    let probs = ind.factor(it.id)?;
                    Ok((
                        it.id.to_string(),
                        it.states
                            .iter()
                            .cloned()
                            .zip(probs.iter().copied())
                            .collect(),
                    ))
                })
                .collect::<Result<_>>()?,
        },
        Prior::Tabular(tab) => RawPrior::Tabular {
            support: (0..tab.len())
                .map(|i| {
                    let (phi, _) = &tab.support()[i];
                    RawRow {
                        states: items
                            .iter()
                            .map(|it| {
                                let s = phi.state_of(it.id).expect("validated");
                                (it.id.to_string(), it.states[s].clone())
                            })
                            .collect(),
                        p: tab.probability(i),
                    }
                })
                .collect(),
        },
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    items: Option<Vec<RawItem>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prior: Option<RawPrior>,
    objective: RawObjective,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_max: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawItem {
    id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    states: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum RawPrior {
    #[serde(rename = "tabular")]
    Tabular { support: Vec<RawRow> },
    #[serde(rename = "independent")]
    Independent {
        factors: BTreeMap<String, BTreeMap<String, f64>>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRow {
    states: BTreeMap<String, String>,
    p: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum RawObjective {
    #[serde(rename = "coverage")]
    Coverage {
        ground: Vec<String>,
        covers: BTreeMap<String, Vec<String>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        weights: Option<BTreeMap<String, f64>>,
    },
    #[serde(rename = "cascade")]
    Cascade {
        nodes: Vec<String>,
        edges: Vec<CascadeEdge>,
    },
    #[serde(rename = "version_space")]
    VersionSpace {
        hypotheses: BTreeMap<String, f64>,
        answers: BTreeMap<String, BTreeMap<String, String>>,
    },
}

impl RawInstance {
    fn into_instance(self, fallback_name: &str, caps: &Caps) -> Result<Instance> {
        let name = self.name.unwrap_or_else(|| fallback_name.to_string());
        match self.objective {
            RawObjective::Cascade { nodes, edges } => {
                if self.items.is_some() {
                    return Err(Error::InvalidInstance(
                        "items: cascade instances derive items from the graph; remove this field"
                            .into(),
                    ));
                }
                if self.prior.is_some() {
                    return Err(Error::InvalidInstance(
                        "prior: cascade instances derive the prior from edge probabilities; \
                         remove this field"
                            .into(),
                    ));
                }
                let (items, prior, objective) = compile_cascade(nodes, edges, caps)?;
                Ok(Instance {
                    name,
                    items,
                    prior,
                    objective: Objective::Cascade(objective),
                    declared_f_max: self.f_max,
                })
            }
            RawObjective::VersionSpace {
                hypotheses,
                answers,
            } => {
                if self.prior.is_some() {
                    return Err(Error::InvalidInstance(
                        "prior: identification instances derive the prior from hypothesis \
                         masses; remove this field"
                            .into(),
                    ));
                }
                let items = parse_items(self.items.ok_or_else(|| {
                    Error::InvalidInstance("items: required for version_space instances".into())
                })?)?;
                let hyp_names: Vec<String> = hypotheses.keys().cloned().collect();
                let mut table = vec![vec![0usize; hyp_names.len()]; items.len()];
                for (q, item) in items.iter().enumerate() {
                    let per_hyp = answers.get(&q.to_string()).ok_or_else(|| {
                        Error::InvalidInstance(format!("answers.{q}: missing query entry"))
                    })?;
                    for (h, hyp) in hyp_names.iter().enumerate() {
                        let state_name = per_hyp.get(hyp).ok_or_else(|| {
                            Error::InvalidInstance(format!("answers.{q}.{hyp}: missing answer"))
                        })?;
                        table[q][h] = state_index(item, state_name).map_err(|m| {
                            Error::InvalidInstance(format!("answers.{q}.{hyp}: {m}"))
                        })?;
                    }
                }
                for q in answers.keys() {
                    let idx: std::result::Result<usize, _> = q.parse();
                    if !matches!(idx, Ok(i) if i < items.len()) {
                        return Err(Error::InvalidInstance(format!(
                            "answers.{q}: no such query item"
                        )));
                    }
                }
                let objective =
                    VersionSpaceObjective::new(hypotheses.into_iter().collect(), table, &items)?;
                let prior = objective.induced_prior(&items)?;
                Ok(Instance {
                    name,
                    items,
                    prior,
                    objective: Objective::VersionSpace(objective),
                    declared_f_max: self.f_max,
                })
            }
            RawObjective::Coverage {
                ground,
                covers,
                weights,
            } => {
                let items = parse_items(self.items.ok_or_else(|| {
                    Error::InvalidInstance("items: required for coverage instances".into())
                })?)?;
                let prior = parse_prior(
                    self.prior.ok_or_else(|| {
                        Error::InvalidInstance("prior: required for coverage instances".into())
                    })?,
                    &items,
                )?;
                let elem_index: BTreeMap<&str, usize> = ground
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (e.as_str(), i))
                    .collect();
                if elem_index.len() != ground.len() {
                    return Err(Error::InvalidInstance(
                        "objective.ground: duplicate element".into(),
                    ));
                }
                let weight_vec = match weights {
                    None => None,
                    Some(map) => {
                        let mut w = vec![1.0; ground.len()];
                        for (elem, value) in map {
                            let idx = *elem_index.get(elem.as_str()).ok_or_else(|| {
                                Error::InvalidInstance(format!(
                                    "objective.weights.{elem}: unknown element"
                                ))
                            })?;
                            w[idx] = value;
                        }
                        Some(w)
                    }
                };
                let mut table: Vec<Vec<Vec<usize>>> = items
                    .iter()
                    .map(|it| vec![Vec::new(); it.states.len()])
                    .collect();
                for (key, elems) in &covers {
                    let (item, state) = parse_cover_key(key, &items)?;
                    let mut subset = Vec::with_capacity(elems.len());
                    for e in elems {
                        let idx = *elem_index.get(e.as_str()).ok_or_else(|| {
                            Error::InvalidInstance(format!(
                                "objective.covers['{key}']: unknown element '{e}'"
                            ))
                        })?;
                        subset.push(idx);
                    }
                    table[item][state] = subset;
                }
                let objective = CoverageObjective::new(ground, weight_vec, table, &items)?;
                Ok(Instance {
                    name,
                    items,
                    prior,
                    objective: Objective::Coverage(objective),
                    declared_f_max: self.f_max,
                })
            }
        }
    }
}

fn parse_items(raw: Vec<RawItem>) -> Result<Vec<Item>> {
    let mut items: Vec<Option<Item>> = vec![None; raw.len()];
    let n = raw.len();
    for r in raw {
        if r.id >= n {
            return Err(Error::InvalidInstance(format!(
                "items[].id: {} out of range for {} items (ids must be 0..{})",
                r.id, n, n
            )));
        }
        if items[r.id].is_some() {
            return Err(Error::InvalidInstance(format!(
                "items[].id: duplicate id {}",
                r.id
            )));
        }
        let mut item = Item::new(r.id, r.cost.unwrap_or(1.0), r.states);
        item.label = r.label;
        items[r.id] = Some(item);
    }
    let items: Vec<Item> = items.into_iter().map(|i| i.expect("dense ids")).collect();
    crate::model::validate_items(&items)?;
    Ok(items)
}

fn state_index(item: &Item, name: &str) -> std::result::Result<usize, String> {
    item.states
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| format!("unknown state '{name}' for item {}", item.id))
}

fn parse_cover_key(key: &str, items: &[Item]) -> Result<(usize, usize)> {
    let (id_part, state_part) = key.split_once(':').ok_or_else(|| {
        Error::InvalidInstance(format!(
            "objective.covers['{key}']: key must look like 'itemId:stateName'"
        ))
    })?;
    let item: usize = id_part.parse().map_err(|_| {
        Error::InvalidInstance(format!(
            "objective.covers['{key}']: bad item id '{id_part}'"
        ))
    })?;
    if item >= items.len() {
        return Err(Error::InvalidInstance(format!(
            "objective.covers['{key}']: no item with id {item}"
        )));
    }
    let state = state_index(&items[item], state_part)
        .map_err(|m| Error::InvalidInstance(format!("objective.covers['{key}']: {m}")))?;
    Ok((item, state))
}

fn parse_prior(raw: RawPrior, items: &[Item]) -> Result<Prior> {
    match raw {
        RawPrior::Independent { factors } => {
            let mut per_item = Vec::with_capacity(items.len());
            for item in items {
                let named = factors.get(&item.id.to_string()).ok_or_else(|| {
                    Error::InvalidInstance(format!("prior.factors.{}: missing item", item.id))
                })?;
                let mut probs = vec![0.0; item.states.len()];
                for (state_name, p) in named {
                    let s = state_index(item, state_name).map_err(|m| {
                        Error::InvalidInstance(format!("prior.factors.{}: {m}", item.id))
                    })?;
                    probs[s] = *p;
                }
                per_item.push(probs);
            }
            for id in factors.keys() {
                let idx: std::result::Result<usize, _> = id.parse();
                if !matches!(idx, Ok(i) if i < items.len()) {
                    return Err(Error::InvalidInstance(format!(
                        "prior.factors.{id}: no such item"
                    )));
                }
            }
            Ok(Prior::Independent(crate::model::IndependentPrior::new(
                per_item, items,
            )?))
        }
        RawPrior::Tabular { support } => {
            let mut rows = Vec::with_capacity(support.len());
            for (i, row) in support.iter().enumerate() {
                let mut states = vec![0usize; items.len()];
                for item in items {
                    let state_name = row.states.get(&item.id.to_string()).ok_or_else(|| {
                        Error::InvalidInstance(format!(
                            "prior.support[{i}].states: missing item {}",
                            item.id
                        ))
                    })?;
                    states[item.id] = state_index(item, state_name).map_err(|m| {
                        Error::InvalidInstance(format!("prior.support[{i}].states: {m}"))
                    })?;
                }
                if row.states.len() != items.len() {
                    return Err(Error::InvalidInstance(format!(
                        "prior.support[{i}].states: extra or unknown item keys"
                    )));
                }
                rows.push((Realization::from_states(states), row.p));
            }
            Ok(Prior::Tabular(TabularPrior::new(rows, items, true)?))
        }
    }
}
