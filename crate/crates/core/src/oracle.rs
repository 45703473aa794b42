//! Textbook uniform-cost search, kept separate from [`crate::search`] so it
//! can serve as an independent reference in tests.

use std::collections::{BTreeSet, HashMap};
use std::ops::Add;

use num_traits::Zero;

use crate::ast::Query;
use crate::edits::apply_edit_canonical;
use crate::search::{PathStep, Problem, SearchResult, SearchStatus};
use crate::Cost;

/// A graph given as node count and weighted edge list; nodes are `0..nodes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitGraph<C> {
    pub nodes: usize,
    pub edges: Vec<(usize, usize, C)>,
}

impl<C: Copy> ExplicitGraph<C> {
    pub fn new(nodes: usize, edges: Vec<(usize, usize, C)>) -> Self {
        assert!(
            edges.iter().all(|&(a, b, _)| a < nodes && b < nodes),
            "edge endpoint out of range"
        );
        ExplicitGraph { nodes, edges }
    }

    fn outgoing(&self) -> Vec<Vec<(usize, C)>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for &(a, b, c) in &self.edges {
            adj[a].push((b, c));
        }
        adj
    }
}

/// Shortest distance and node path from `start` to `destination`, stopping
/// as soon as the destination is settled.
pub fn ucs_explicit<C>(g: &ExplicitGraph<C>, start: usize, destination: usize) -> Option<(C, Vec<usize>)>
where
    C: Copy + Ord + Zero + Add<Output = C>,
{
    let adj = g.outgoing();
    let mut dist: Vec<Option<C>> = vec![None; g.nodes];
    let mut prev: Vec<Option<usize>> = vec![None; g.nodes];
    let mut settled = vec![false; g.nodes];
    let mut unvisited = BTreeSet::new();
    dist[start] = Some(C::zero());
    unvisited.insert((C::zero(), start));

    while let Some((d, u)) = unvisited.pop_first() {
        settled[u] = true;
        if u == destination {
            let mut path = vec![u];
            let mut at = u;
            while let Some(p) = prev[at] {
                path.push(p);
                at = p;
            }
            path.reverse();
            return Some((d, path));
        }
        for &(v, c) in &adj[u] {
            if settled[v] {
                continue;
            }
            let nd = d + c;
            match dist[v] {
                Some(old) if old <= nd => {}
                old => {
                    if let Some(old) = old {
                        unvisited.remove(&(old, v));
                    }
                    dist[v] = Some(nd);
                    prev[v] = Some(u);
                    unvisited.insert((nd, v));
                }
            }
        }
    }
    None
}

/// Eager uniform-cost search over the edit graph of `problem`: every
/// settled node has all of its neighbors generated at once.
pub fn ucs_implicit(problem: &Problem) -> SearchResult {
    let target = problem.destination.canonical();
    let edits = problem.edits.edits();

    let mut queries: Vec<Query> = vec![problem.start.clone()];
    let mut ids: HashMap<Query, usize> = HashMap::from([(problem.start.canonical(), 0)]);
    let mut dist: Vec<Cost> = vec![0];
    let mut prev: Vec<Option<(usize, usize)>> = vec![None];
    let mut settled = vec![false];
    let mut unvisited: BTreeSet<(Cost, usize)> = BTreeSet::from([(0, 0)]);
    let mut expanded = 0;

    while let Some((d, u)) = unvisited.pop_first() {
        if problem.max_distance.is_some_and(|m| d > m) {
            return finish(SearchStatus::ExceededMaxDistance, None, Vec::new(), queries.len(), expanded);
        }
        settled[u] = true;
        if queries[u].canonical() == target {
            let mut path = Vec::new();
            let mut at = u;
            while let Some((p, k)) = prev[at] {
                let e = &edits[k];
                path.push(PathStep {
                    from: queries[p].clone(),
                    edit: e.name().to_owned(),
                    description: e.description().to_owned(),
                    cost: e.cost(),
                    to: queries[at].clone(),
                });
                at = p;
            }
            path.reverse();
            return finish(SearchStatus::Found, Some(d), path, queries.len(), expanded);
        }
        expanded += 1;
        for (k, e) in edits.iter().enumerate() {
            for (q, c) in apply_edit_canonical(e, &queries[u], &problem.schema, &problem.meta) {
                let nd = d + e.cost();
                match ids.get(&c) {
                    None => {
                        let v = queries.len();
                        ids.insert(c, v);
                        queries.push(q);
                        dist.push(nd);
                        prev.push(Some((u, k)));
                        settled.push(false);
                        unvisited.insert((nd, v));
                    }
                    Some(&v) if !settled[v] && nd < dist[v] => {
                        unvisited.remove(&(dist[v], v));
                        dist[v] = nd;
                        prev[v] = Some((u, k));
                        queries[v] = q;
                        unvisited.insert((nd, v));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    finish(SearchStatus::Exhausted, None, Vec::new(), queries.len(), expanded)
}

fn finish(
    status: SearchStatus,
    distance: Option<Cost>,
    path: Vec<PathStep>,
    visited_count: usize,
    expanded_count: usize,
) -> SearchResult {
    SearchResult {
        status,
        distance,
        path,
        visited_count,
        expanded_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node() {
        let g: ExplicitGraph<u32> = ExplicitGraph::new(1, vec![]);
        assert_eq!(ucs_explicit(&g, 0, 0), Some((0, vec![0])));
    }

    #[test]
    fn one_edge() {
        let g = ExplicitGraph::new(2, vec![(0, 1, 5u32)]);
        assert_eq!(ucs_explicit(&g, 0, 1), Some((5, vec![0, 1])));
        assert_eq!(ucs_explicit(&g, 1, 0), None);
    }

    #[test]
    fn decrease_key() {
        let g = ExplicitGraph::new(3, vec![(0, 2, 10u32), (0, 1, 1), (1, 2, 2)]);
        assert_eq!(ucs_explicit(&g, 0, 2), Some((3, vec![0, 1, 2])));
    }

    #[test]
    fn rational_costs() {
        use num_rational::Rational64;
        let half = Rational64::new(1, 2);
        let g = ExplicitGraph::new(3, vec![(0, 1, half), (1, 2, half), (0, 2, Rational64::from(2))]);
        assert_eq!(ucs_explicit(&g, 0, 2).unwrap().0, Rational64::from(1));
    }
}
