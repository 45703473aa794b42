//! Destination-derived bounds that keep the search space finite.
//!
//! [`DepthInfo`] caps, per clause, how many components of each kind a query
//! may hold and how deep its expression trees may grow; [`ValueSets`] caps
//! which names and constants edits may introduce.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::{AggregateKind, BinaryOp, Clause, ComponentKind, Expr, Ident, Literal, Query};
use crate::schema::{restrict_schema, Schema};

pub const DEFAULT_SLACK: usize = 1;

/// Element-count caps for the query's lists.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ListLimits {
    pub select: usize,
    pub from: usize,
    pub group_by: usize,
    pub order_by: usize,
}

impl ListLimits {
    fn as_array(self) -> [usize; 4] {
        [self.select, self.from, self.group_by, self.order_by]
    }
}

/// Size measures of a query, or limits on them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DepthInfo {
    counts: [[usize; 6]; 6],
    heights: [usize; 6],
    pub lists: ListLimits,
}

impl DepthInfo {
    /// The measures of `query` itself.
    pub fn measure(query: &Query) -> DepthInfo {
        let mut d = DepthInfo::default();
        for clause in Clause::ALL {
            for slot in query.clause_slots(clause).into_iter().flatten() {
                d.heights[clause.index()] = d.heights[clause.index()].max(slot.height());
                slot.walk(&mut |e| d.counts[clause.index()][e.kind().index()] += 1);
            }
        }
        d.lists = ListLimits {
            select: query.select().len(),
            from: query.from().len(),
            group_by: query.group_by().len(),
            order_by: query.order_by().len(),
        };
        d
    }

    fn plus(mut self, slack: usize) -> DepthInfo {
        for row in &mut self.counts {
            for c in row {
                *c += slack;
            }
        }
        for h in &mut self.heights {
            *h += slack;
        }
        self.lists.select += slack;
        self.lists.from += slack;
        self.lists.group_by += slack;
        self.lists.order_by += slack;
        self
    }

    pub fn limit(&self, clause: Clause, kind: ComponentKind) -> usize {
        self.counts[clause.index()][kind.index()]
    }

    /// Maximum expression-tree height in `clause`.
    pub fn height(&self, clause: Clause) -> usize {
        self.heights[clause.index()]
    }

    fn values(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts
            .iter()
            .flatten()
            .copied()
            .chain(self.heights.iter().copied())
            .chain(self.lists.as_array())
    }

    /// Whether every measure of `measures` is within these limits.
    pub fn covers(&self, measures: &DepthInfo) -> bool {
        self.values().zip(measures.values()).all(|(l, m)| m <= l)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValueSets {
    /// Columns per table, in schema order.
    pub columns: BTreeMap<Ident, Vec<Ident>>,
    pub constants: BTreeSet<Literal>,
    pub aggregation_kinds: BTreeSet<AggregateKind>,
    pub operators: BTreeSet<BinaryOp>,
    /// Whether the destination has an aggregation with DISTINCT.
    pub distinct_aggregation: bool,
    pub select_aliases: BTreeSet<Ident>,
    pub from_aliases: BTreeSet<Ident>,
    /// Whether the destination writes table-qualified column references.
    pub qualified_columns: bool,
    /// Whether the destination writes bare column references.
    pub unqualified_columns: bool,
}

impl ValueSets {
    pub fn tables(&self) -> impl Iterator<Item = &Ident> {
        self.columns.keys()
    }

    pub fn table_columns(&self, table: &str) -> &[Ident] {
        self.columns.get(table).map_or(&[], |c| c.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetaInfo {
    pub depth: DepthInfo,
    /// The destination's own measures, without slack.
    pub exact: DepthInfo,
    pub values: ValueSets,
    pub full_schema: Schema,
    pub restricted_schema: Schema,
    pub slack: usize,
}

/// Derives search bounds from an executable destination. Each limit is the
/// destination's own measure plus `slack`.
pub fn build_meta_info(destination: &Query, schema: &Schema, slack: usize) -> MetaInfo {
    let restricted = restrict_schema(schema, destination);
    let mut values = ValueSets::default();
    for t in restricted.tables() {
        values.columns.insert(t.name().clone(), t.columns().to_vec());
    }
    for (_, e) in destination.expressions() {
        match e {
            Expr::Constant(lit) => {
                values.constants.insert(lit.clone());
            }
            Expr::Aggregate { kind, distinct, .. } => {
                values.aggregation_kinds.insert(*kind);
                values.distinct_aggregation |= *distinct;
            }
            Expr::Binary { op, .. } => {
                values.operators.insert(*op);
            }
            Expr::Column { qualifier, .. } => {
                values.qualified_columns |= qualifier.is_some();
                values.unqualified_columns |= qualifier.is_none();
            }
            Expr::Asterisk { qualifier: Some(_) } => values.qualified_columns = true,
            _ => {}
        }
    }
    values.select_aliases = destination
        .select()
        .iter()
        .filter_map(|s| s.alias.clone())
        .collect();
    values.from_aliases = destination
        .from()
        .iter()
        .filter_map(|f| f.alias.clone())
        .collect();

    let exact = DepthInfo::measure(destination);
    MetaInfo {
        depth: exact.clone().plus(slack),
        exact,
        values,
        full_schema: schema.clone(),
        restricted_schema: restricted,
        slack,
    }
}

fn within(limits: &DepthInfo, input: &DepthInfo, output: &DepthInfo) -> bool {
    let all = |l: &[usize], i: &[usize], o: &[usize]| (0..l.len()).all(|k| o[k] <= l[k].max(i[k]));
    all(limits.counts.as_flattened(), input.counts.as_flattened(), output.counts.as_flattened())
        && all(&limits.heights, &input.heights, &output.heights)
        && all(&limits.lists.as_array(), &input.lists.as_array(), &output.lists.as_array())
}

impl MetaInfo {
    /// Limit minus the current count of `kind` in `clause`, floored at 0.
    pub fn remaining_depth(&self, clause: Clause, kind: ComponentKind, query: &Query) -> usize {
        let current = DepthInfo::measure(query).limit(clause, kind);
        self.depth.limit(clause, kind).saturating_sub(current)
    }

    /// Whether an edit from `input` to `output` stays inside the bounds. A
    /// measure may exceed its limit only if the input already did and the
    /// edit does not grow it further.
    pub fn admits(&self, input: &DepthInfo, output: &DepthInfo) -> bool {
        within(&self.depth, input, output)
    }

    /// Like [`MetaInfo::admits`] but without slack. Zero-cost edits are held
    /// to this, so they never grow a query past the destination.
    pub fn admits_exact(&self, input: &DepthInfo, output: &DepthInfo) -> bool {
        within(&self.exact, input, output)
    }

    pub fn is_table_used(&self, table: &str) -> bool {
        self.restricted_schema.table(table).is_some()
    }

    pub fn is_column_used(&self, table: &str, column: &str) -> bool {
        self.restricted_schema
            .table(table)
            .is_some_and(|t| t.has_column(column))
    }
}
