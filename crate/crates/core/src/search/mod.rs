//! Lazy uniform-cost search over the graph spanned by an [`EditSet`].
//!
//! The queue holds `(node, edit)` pairs rather than neighbors. Extracting a
//! pair applies only that edit; the node goes back in the queue with its
//! next edit, whose cost is no lower because the edit set is sorted. Each
//! neighbor gets its final distance when it is first generated.

mod queue;

use std::collections::HashMap;

use num_traits::Float;
use thiserror::Error;

pub use queue::BucketQueue;

use crate::ast::Query;
use crate::edits::{default_edit_set, filter_outputs, EditSet, Filtered};
use crate::meta::{build_meta_info, DepthInfo, MetaInfo, DEFAULT_SLACK};
use crate::schema::{check_executable, deduce_schema, DeductionError, ExecutabilityError, Schema};
use crate::Cost;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("the destination is not executable: {0}")]
    NonExecutableDestination(ExecutabilityError),
    #[error("no schema could be deduced from the destination: {0}")]
    SchemaDeductionFailed(DeductionError),
    #[error("the destination cannot be reached from the start")]
    Unreachable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchStatus {
    Found,
    ExceededMaxDistance,
    Exhausted,
}

impl SearchStatus {
    pub fn label(self) -> &'static str {
        match self {
            Self::Found => "found",
            Self::ExceededMaxDistance => "exceededMaxDistance",
            Self::Exhausted => "exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub from: Query,
    pub edit: String,
    pub description: String,
    pub cost: Cost,
    pub to: Query,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub distance: Option<Cost>,
    /// Edits from start to destination; empty unless found.
    pub path: Vec<PathStep>,
    pub visited_count: usize,
    /// Number of `(node, edit)` pairs taken from the queue.
    pub expanded_count: usize,
}

impl SearchResult {
    pub fn is_found(&self) -> bool {
        self.status == SearchStatus::Found
    }

    pub(crate) fn trivial(visited_count: usize) -> SearchResult {
        SearchResult {
            status: SearchStatus::Found,
            distance: Some(0),
            path: Vec::new(),
            visited_count,
            expanded_count: 0,
        }
    }
}

/// Optional inputs of a search. Anything left unset takes its default:
/// the empty start query, the schema deduced from the destination, the
/// default edit set and no distance bound.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub start: Option<Query>,
    pub schema: Option<Schema>,
    pub edits: Option<EditSet>,
    pub max_distance: Option<Cost>,
    pub slack: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            start: None,
            schema: None,
            edits: None,
            max_distance: None,
            slack: DEFAULT_SLACK,
        }
    }
}

impl SearchOptions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn start(mut self, start: Query) -> Self {
        self.start = Some(start);
        self
    }

    pub fn schema(mut self, schema: Schema) -> Self {
        self.schema = Some(schema);
        self
    }

    pub fn edits(mut self, edits: EditSet) -> Self {
        self.edits = Some(edits);
        self
    }

    pub fn max_distance(mut self, max_distance: Cost) -> Self {
        self.max_distance = Some(max_distance);
        self
    }

    pub fn slack(mut self, slack: usize) -> Self {
        self.slack = slack;
        self
    }
}

/// Everything a search needs, with defaults filled in and the destination
/// validated.
#[derive(Clone, Debug)]
pub struct Problem {
    pub start: Query,
    pub destination: Query,
    pub schema: Schema,
    pub edits: EditSet,
    pub meta: MetaInfo,
    pub max_distance: Option<Cost>,
}

impl Problem {
    pub fn new(destination: &Query, options: &SearchOptions) -> Result<Problem, SearchError> {
        let schema = match &options.schema {
            Some(s) => {
                check_executable(destination, s).map_err(SearchError::NonExecutableDestination)?;
                s.clone()
            }
            None => deduce_schema(destination).map_err(SearchError::SchemaDeductionFailed)?,
        };
        let meta = build_meta_info(destination, &schema, options.slack);
        Ok(Problem {
            start: options.start.clone().unwrap_or_default(),
            destination: destination.clone(),
            schema,
            edits: options.edits.clone().unwrap_or_else(default_edit_set),
            meta,
            max_distance: options.max_distance,
        })
    }
}

/// Hooks into a running search. All methods default to doing nothing.
pub trait SearchObserver {
    /// Called whenever the extracted priority rises.
    fn on_progress(&mut self, _current_distance: Cost, _fraction: f64, _visited: usize) {}
    /// Called for every `(node, edit)` pair taken from the queue.
    fn on_extract(&mut self, _priority: Cost, _node: usize, _edit_index: usize) {}
    /// Called when a node is first reached.
    fn on_visit(&mut self, _node: usize, _query: &Query, _dist: Cost) {}
}

impl SearchObserver for () {}

struct Node {
    query: Query,
    canonical: Query,
    measure: DepthInfo,
    dist: Cost,
    prev: Option<(usize, usize)>,
}

struct Visited {
    nodes: Vec<Node>,
    index: HashMap<u64, Vec<usize>>,
}

impl Visited {
    fn find(&self, hash: u64, canonical: &Query) -> Option<usize> {
        self.index
            .get(&hash)?
            .iter()
            .copied()
            .find(|&i| self.nodes[i].canonical == *canonical)
    }

    fn insert(&mut self, hash: u64, node: Node) -> usize {
        let id = self.nodes.len();
        self.nodes.push(node);
        self.index.entry(hash).or_default().push(id);
        id
    }
}

pub fn shortest_distance(destination: &Query, options: &SearchOptions) -> Result<SearchResult, SearchError> {
    shortest_distance_observed(destination, options, &mut ())
}

pub fn shortest_distance_observed(
    destination: &Query,
    options: &SearchOptions,
    observer: &mut dyn SearchObserver,
) -> Result<SearchResult, SearchError> {
    let problem = Problem::new(destination, options)?;
    Ok(search(&problem, observer))
}

/// Runs the lazy search on a prepared problem.
pub fn search(problem: &Problem, observer: &mut dyn SearchObserver) -> SearchResult {
    let edits = problem.edits.edits();
    let target = problem.destination.canonical();
    let start_canonical = problem.start.canonical();
    if start_canonical == target {
        return SearchResult::trivial(1);
    }
    let mut visited = Visited {
        nodes: Vec::new(),
        index: HashMap::new(),
    };
    let start = visited.insert(
        start_canonical.structural_hash().value(),
        Node {
            query: problem.start.clone(),
            canonical: start_canonical,
            measure: DepthInfo::measure(&problem.start),
            dist: 0,
            prev: None,
        },
    );
    observer.on_visit(start, &problem.start, 0);
    if edits.is_empty() {
        return exhausted(&visited, 0);
    }

    let mut queue: BucketQueue<(usize, usize)> = BucketQueue::new();
    queue.push(edits[0].cost() as usize, (start, 0));
    let mut expanded = 0;
    let mut last_priority = None;

    while let Some((priority, (node, k))) = queue.pop() {
        let priority = priority as Cost;
        if problem.max_distance.is_some_and(|m| priority > m) {
            return SearchResult {
                status: SearchStatus::ExceededMaxDistance,
                distance: None,
                path: Vec::new(),
                visited_count: visited.nodes.len(),
                expanded_count: expanded,
            };
        }
        if last_priority != Some(priority) {
            last_priority = Some(priority);
            observer.on_progress(
                priority,
                progress(priority, problem.max_distance),
                visited.nodes.len(),
            );
        }
        observer.on_extract(priority, node, k);
        expanded += 1;

        let current = &visited.nodes[node];
        let raw = edits[k].perform(&current.query, &problem.schema, &problem.meta);
        let neighbors = if raw.is_empty() {
            Vec::new()
        } else {
            filter_outputs(&edits[k], raw, &current.canonical, &current.measure, &problem.meta)
        };
        for Filtered {
            query,
            canonical,
            measure,
            hash,
        } in neighbors
        {
            if visited.find(hash, &canonical).is_some() {
                continue;
            }
            let reached = canonical == target;
            let id = visited.insert(
                hash,
                Node {
                    measure,
                    query,
                    canonical,
                    dist: priority,
                    prev: Some((node, k)),
                },
            );
            observer.on_visit(id, &visited.nodes[id].query, priority);
            if reached {
                return SearchResult {
                    status: SearchStatus::Found,
                    distance: Some(priority),
                    path: reconstruct(&visited, problem, id),
                    visited_count: visited.nodes.len(),
                    expanded_count: expanded,
                };
            }
            queue.push(priority as usize + edits[0].cost() as usize, (id, 0));
        }
        if k + 1 < edits.len() {
            let dist = visited.nodes[node].dist;
            queue.push(dist as usize + edits[k + 1].cost() as usize, (node, k + 1));
        }
    }
    exhausted(&visited, expanded)
}

fn exhausted(visited: &Visited, expanded: usize) -> SearchResult {
    SearchResult {
        status: SearchStatus::Exhausted,
        distance: None,
        path: Vec::new(),
        visited_count: visited.nodes.len(),
        expanded_count: expanded,
    }
}

fn reconstruct(visited: &Visited, problem: &Problem, mut id: usize) -> Vec<PathStep> {
    let mut path = Vec::new();
    while let Some((prev, k)) = visited.nodes[id].prev {
        let edit = &problem.edits.edits()[k];
        path.push(PathStep {
            from: visited.nodes[prev].query.clone(),
            edit: edit.name().to_owned(),
            description: edit.description().to_owned(),
            cost: edit.cost(),
            to: visited.nodes[id].query.clone(),
        });
        id = prev;
    }
    path.reverse();
    path
}

/// Fraction of the search done: linear in `current / max` when a bound is
/// known, `1 - exp(-current)` otherwise. Always in `[0, 1]`.
pub fn progress_fraction<F: Float>(current: F, max: Option<F>) -> F {
    match max {
        Some(m) if m > F::zero() => (current / m).max(F::zero()).min(F::one()),
        Some(_) => F::one(),
        None => F::one() - (-current).exp(),
    }
}

pub fn progress(current_distance: Cost, max_distance: Option<Cost>) -> f64 {
    progress_fraction(f64::from(current_distance), max_distance.map(f64::from))
}

/// Distance from the empty query to `destination`.
pub fn difficulty(destination: &Query, schema: &Schema, edits: &EditSet) -> Result<Cost, SearchError> {
    let options = SearchOptions::new().schema(schema.clone()).edits(edits.clone());
    shortest_distance(destination, &options)?
        .distance
        .ok_or(SearchError::Unreachable)
}

#[cfg(test)]
mod tests;
