//! The edit catalog. An edit maps one query to the set of its neighbors;
//! the search graph is the union of all edits.

mod equivalence;
mod expression;
mod lists;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::Query;
use crate::meta::{DepthInfo, MetaInfo};
use crate::schema::Schema;
use crate::Cost;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EditCategory {
    /// Adds, removes, sets, unsets or changes a single component.
    Atomic,
    /// Reorders components without changing the query's size.
    Horizontal,
    /// Stands in for a sequence of atomic edits.
    Shortcut,
    /// Connects queries that always give the same result.
    Equivalence,
}

impl EditCategory {
    pub fn label(self) -> &'static str {
        match self {
            Self::Atomic => "atomic",
            Self::Horizontal => "horizontal",
            Self::Shortcut => "shortcut",
            Self::Equivalence => "equivalence",
        }
    }
}

pub type PerformFn = dyn Fn(&Query, &Schema, &MetaInfo) -> Vec<Query> + Send + Sync;

#[derive(Clone)]
pub struct Edit {
    name: Arc<str>,
    description: Arc<str>,
    cost: Cost,
    category: EditCategory,
    perform: Arc<PerformFn>,
}

impl Edit {
    pub fn new<F>(name: &str, description: &str, cost: Cost, category: EditCategory, perform: F) -> Edit
    where
        F: Fn(&Query, &Schema, &MetaInfo) -> Vec<Query> + Send + Sync + 'static,
    {
        Edit {
            name: Arc::from(name),
            description: Arc::from(description),
            cost,
            category,
            perform: Arc::new(perform),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn cost(&self) -> Cost {
        self.cost
    }

    pub fn category(&self) -> EditCategory {
        self.category
    }

    pub fn with_cost(&self, cost: Cost) -> Edit {
        Edit {
            cost,
            ..self.clone()
        }
    }

    /// The raw neighbor list, before deduplication and limit filtering.
    /// Use [`apply_edit`] for the neighbor set.
    pub fn perform(&self, query: &Query, schema: &Schema, meta: &MetaInfo) -> Vec<Query> {
        (self.perform)(query, schema, meta)
    }
}

impl fmt::Debug for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Edit")
            .field("name", &self.name)
            .field("cost", &self.cost)
            .field("category", &self.category)
            .finish_non_exhaustive()
    }
}

/// The neighbors of `query` under `edit`: canonically distinct, never equal
/// to the input, and within the limits of `meta`. Outputs of a zero-cost
/// edit get no slack.
pub fn apply_edit(edit: &Edit, query: &Query, schema: &Schema, meta: &MetaInfo) -> Vec<Query> {
    apply_edit_canonical(edit, query, schema, meta)
        .into_iter()
        .map(|(q, _)| q)
        .collect()
}

/// Like [`apply_edit`], also returning each neighbor's canonical form.
pub fn apply_edit_canonical(
    edit: &Edit,
    query: &Query,
    schema: &Schema,
    meta: &MetaInfo,
) -> Vec<(Query, Query)> {
    let raw = edit.perform(query, schema, meta);
    if raw.is_empty() {
        return Vec::new();
    }
    filter_outputs(edit, raw, &query.canonical(), &DepthInfo::measure(query), meta)
        .into_iter()
        .map(|f| (f.query, f.canonical))
        .collect()
}

/// A neighbor that passed the filters, with its canonical form, measures
/// and the structural hash of the canonical form.
pub(crate) struct Filtered {
    pub query: Query,
    pub canonical: Query,
    pub measure: DepthInfo,
    pub hash: u64,
}

/// The filtering half of [`apply_edit_canonical`], for callers that already
/// know the input's canonical form and measures.
pub(crate) fn filter_outputs(edit: &Edit, raw: Vec<Query>, own: &Query, input: &DepthInfo, meta: &MetaInfo) -> Vec<Filtered> {
    let mut out: Vec<Filtered> = Vec::new();
    for query in raw {
        let canonical = query.canonical();
        if canonical == *own {
            continue;
        }
        let measure = DepthInfo::measure(&query);
        let admitted = if edit.cost() == 0 {
            meta.admits_exact(input, &measure)
        } else {
            meta.admits(input, &measure)
        };
        if !admitted {
            continue;
        }
        let hash = canonical.structural_hash().value();
        if out.iter().any(|f| f.hash == hash && f.canonical == canonical) {
            continue;
        }
        out.push(Filtered {
            query,
            canonical,
            measure,
            hash,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("unknown edit '{0}'")]
    UnknownEditName(String),
    #[error("cost {cost} for edit '{name}' is negative")]
    NegativeCost { name: String, cost: i64 },
    #[error("cost {cost} for edit '{name}' is too large")]
    CostTooLarge { name: String, cost: i64 },
    #[error("an edit named '{0}' already exists")]
    DuplicateName(String),
    #[error("line {line}: {message}")]
    MalformedOverride { line: usize, message: String },
}

/// Edits sorted by ascending cost. Equal costs keep catalog order.
#[derive(Clone, Debug, Default)]
pub struct EditSet {
    edits: Vec<Edit>,
    overrides: BTreeMap<String, Cost>,
}

impl EditSet {
    pub fn new(edits: Vec<Edit>) -> Result<EditSet, EditError> {
        let mut set = EditSet::default();
        for e in edits {
            set = set.register(e)?;
        }
        Ok(set)
    }

    pub fn edits(&self) -> &[Edit] {
        &self.edits
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Edit> {
        self.edits.iter().find(|e| e.name() == name)
    }

    pub fn overrides(&self) -> &BTreeMap<String, Cost> {
        &self.overrides
    }

    /// A copy keeping only the edits for which `keep` holds.
    pub fn filtered(&self, keep: impl Fn(&Edit) -> bool) -> EditSet {
        EditSet {
            edits: self.edits.iter().filter(|e| keep(e)).cloned().collect(),
            overrides: self.overrides.clone(),
        }
    }

    pub fn register(&self, edit: Edit) -> Result<EditSet, EditError> {
        if self.get(edit.name()).is_some() {
            return Err(EditError::DuplicateName(edit.name().to_owned()));
        }
        let mut set = self.clone();
        set.edits.push(edit);
        set.sort();
        Ok(set)
    }

    /// Applies per-edit cost overrides and re-sorts.
    pub fn configure_costs(&self, overrides: &BTreeMap<String, i64>) -> Result<EditSet, EditError> {
        let mut set = self.clone();
        for (name, &cost) in overrides {
            if cost < 0 {
                return Err(EditError::NegativeCost {
                    name: name.clone(),
                    cost,
                });
            }
            let cost = Cost::try_from(cost).map_err(|_| EditError::CostTooLarge {
                name: name.clone(),
                cost,
            })?;
            let edit = set
                .edits
                .iter_mut()
                .find(|e| e.name() == name)
                .ok_or_else(|| EditError::UnknownEditName(name.clone()))?;
            *edit = edit.with_cost(cost);
            set.overrides.insert(name.clone(), cost);
        }
        set.sort();
        Ok(set)
    }

    fn sort(&mut self) {
        self.edits.sort_by_key(Edit::cost);
    }
}

pub fn register_edit(set: &EditSet, edit: Edit) -> Result<EditSet, EditError> {
    set.register(edit)
}

pub fn configure_costs(set: &EditSet, overrides: &BTreeMap<String, i64>) -> Result<EditSet, EditError> {
    set.configure_costs(overrides)
}

/// Parses `editName = integer` lines. Blank lines and `#` comments are
/// skipped.
pub fn parse_cost_overrides(text: &str) -> Result<BTreeMap<String, i64>, EditError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let malformed = |message: String| EditError::MalformedOverride {
            line: i + 1,
            message,
        };
        let (name, value) = line
            .split_once('=')
            .ok_or_else(|| malformed("expected 'editName = integer'".to_owned()))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(malformed("missing edit name".to_owned()));
        }
        let value: i64 = value
            .trim()
            .parse()
            .map_err(|_| malformed(format!("'{}' is not an integer", value.trim())))?;
        if out.insert(name.to_owned(), value).is_some() {
            return Err(malformed(format!("'{name}' is set twice")));
        }
    }
    Ok(out)
}

/// The built-in catalog.
pub fn default_edit_set() -> EditSet {
    let mut edits = Vec::new();
    lists::push_edits(&mut edits);
    expression::push_edits(&mut edits);
    equivalence::push_edits(&mut edits);
    EditSet::new(edits).expect("built-in edit names are unique")
}
