//! Per-clause edits on expression trees. Every edit here rewrites one
//! position of one clause through [`Query::recursively_replace`].

use std::sync::Arc;

use super::{Edit, EditCategory};
use crate::ast::{slot_height, AggregateKind, Clause, ComponentKind, Expr, Ident, Query, Slot};
use crate::meta::MetaInfo;
use crate::schema::Schema;
use crate::Cost;

use EditCategory::{Atomic, Equivalence, Horizontal};

struct Ctx<'a> {
    query: &'a Query,
    meta: &'a MetaInfo,
    clause: Clause,
}

impl Ctx<'_> {
    /// Column references that may fill a hole: every value-set column of
    /// every FROM element, in the qualification styles the destination uses.
    fn column_candidates(&self) -> Vec<Expr> {
        let values = &self.meta.values;
        let mut out = Vec::new();
        for f in self.query.from() {
            for c in values.table_columns(&f.table) {
                if values.qualified_columns {
                    out.push(Expr::Column {
                        qualifier: Some(f.exposed_name().clone()),
                        name: c.clone(),
                    });
                }
                let bare = Expr::Column {
                    qualifier: None,
                    name: c.clone(),
                };
                if values.unqualified_columns && !out.contains(&bare) {
                    out.push(bare);
                }
            }
        }
        if self.clause == Clause::OrderBy {
            for a in &values.select_aliases {
                let bare = Expr::Column {
                    qualifier: None,
                    name: a.clone(),
                };
                if !out.contains(&bare) {
                    out.push(bare);
                }
            }
        }
        out
    }

    /// Value-set columns of the table exposed as `qualifier`, or of all
    /// FROM tables for a bare reference.
    fn columns_for(&self, qualifier: Option<&Ident>) -> Vec<Ident> {
        let mut out: Vec<Ident> = Vec::new();
        for f in self.query.from() {
            if qualifier.is_some_and(|q| q != f.exposed_name()) {
                continue;
            }
            for c in self.meta.values.table_columns(&f.table) {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
        }
        if qualifier.is_none() && self.clause == Clause::OrderBy {
            for a in &self.meta.values.select_aliases {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
        }
        out
    }
}

type Rewrite = dyn Fn(&Ctx<'_>, Option<&Arc<Expr>>, &[&Expr]) -> Vec<Slot> + Send + Sync;

struct Spec {
    name: String,
    description: String,
    cost: Cost,
    category: EditCategory,
    clause: Clause,
    /// Component kind the edit adds; the edit is skipped when none remain.
    adds: Option<ComponentKind>,
    /// Whether the edit wraps a subtree and so deepens the tree.
    deepens: bool,
}

fn build(spec: Spec, rewrite: Box<Rewrite>) -> Edit {
    let Spec {
        name,
        description,
        cost,
        category,
        clause,
        adds,
        deepens,
    } = spec;
    Edit::new(&name, &description, cost, category, move |q: &Query, _: &Schema, m: &MetaInfo| {
        if adds.is_some_and(|k| m.remaining_depth(clause, k, q) == 0) {
            return Vec::new();
        }
        let max_depth = if deepens {
            let current = q.clause_slots(clause).into_iter().map(slot_height).max().unwrap_or(0);
            m.depth.height(clause).max(current)
        } else {
            usize::MAX
        };
        let ctx = Ctx {
            query: q,
            meta: m,
            clause,
        };
        q.recursively_replace(clause, max_depth, |e, stack| rewrite(&ctx, e, stack))
    })
}

struct Catalog<'a> {
    edits: &'a mut Vec<Edit>,
    clause: Clause,
}

impl Catalog<'_> {
    fn push(
        &mut self,
        name: &str,
        description: &str,
        category: EditCategory,
        adds: Option<ComponentKind>,
        deepens: bool,
        rewrite: impl Fn(&Ctx<'_>, Option<&Arc<Expr>>, &[&Expr]) -> Vec<Slot> + Send + Sync + 'static,
    ) {
        let label = self.clause.label();
        let (verb, rest) = name.split_at(name.find(char::is_uppercase).unwrap_or(name.len()));
        let spec = Spec {
            name: format!("{verb}{label}{rest}"),
            description: format!("{description} {}", self.clause.phrase()),
            cost: if category == Equivalence { 0 } else { 1 },
            category,
            clause: self.clause,
            adds,
            deepens,
        };
        self.edits.push(build(spec, Box::new(rewrite)));
    }
}

fn is_count(e: &Expr) -> bool {
    matches!(e, Expr::Aggregate { kind: AggregateKind::Count, .. })
}

fn leaf(e: Expr) -> Slot {
    e.slot()
}

pub(super) fn push_edits(edits: &mut Vec<Edit>) {
    for clause in Clause::ALL {
        let mut cat = Catalog { edits, clause };
        column_references(&mut cat);
        constants(&mut cat);
        if clause.allows_aggregation() {
            asterisks(&mut cat);
        } else {
            remove_asterisk(&mut cat);
        }
        nots(&mut cat);
        aggregations(&mut cat);
        binary_expressions(&mut cat);
    }
}

fn column_references(cat: &mut Catalog<'_>) {
    use ComponentKind::ColumnReference;
    cat.push(
        "addColumnReference",
        "Add (missing) column reference to",
        Atomic,
        Some(ColumnReference),
        false,
        |ctx, e, _| match e {
            None => ctx.column_candidates().into_iter().map(leaf).collect(),
            Some(_) => Vec::new(),
        },
    );
    cat.push(
        "removeColumnReference",
        "Remove (unnecessary) column reference from",
        Atomic,
        None,
        false,
        |_, e, _| match e.map(|e| &**e) {
            Some(Expr::Column { .. }) => vec![None],
            _ => Vec::new(),
        },
    );
    cat.push(
        "changeColumnReferenceColumn",
        "Change the column of a column reference in",
        Horizontal,
        None,
        false,
        |ctx, e, _| {
            let Some(Expr::Column { qualifier, name }) = e.map(|e| &**e) else {
                return Vec::new();
            };
            ctx.columns_for(qualifier.as_ref())
                .into_iter()
                .filter(|c| c != name)
                .map(|c| {
                    leaf(Expr::Column {
                        qualifier: qualifier.clone(),
                        name: c,
                    })
                })
                .collect()
        },
    );
    cat.push(
        "setColumnReferenceQualifier",
        "Qualify a column reference with a table name in",
        Atomic,
        None,
        false,
        |ctx, e, _| {
            let Some(Expr::Column { qualifier: None, name }) = e.map(|e| &**e) else {
                return Vec::new();
            };
            if !ctx.meta.values.qualified_columns {
                return Vec::new();
            }
            ctx.query
                .from()
                .iter()
                .filter(|f| ctx.meta.values.table_columns(&f.table).contains(name))
                .map(|f| {
                    leaf(Expr::Column {
                        qualifier: Some(f.exposed_name().clone()),
                        name: name.clone(),
                    })
                })
                .collect()
        },
    );
    cat.push(
        "unsetColumnReferenceQualifier",
        "Remove the table name of a column reference in",
        Atomic,
        None,
        false,
        |_, e, _| match e.map(|e| &**e) {
            Some(Expr::Column {
                qualifier: Some(_),
                name,
            }) => vec![leaf(Expr::Column {
                qualifier: None,
                name: name.clone(),
            })],
            _ => Vec::new(),
        },
    );
}

fn constants(cat: &mut Catalog<'_>) {
    cat.push(
        "addConstant",
        "Add (missing) constant to",
        Atomic,
        Some(ComponentKind::Constant),
        false,
        |ctx, e, _| match e {
            None => ctx
                .meta
                .values
                .constants
                .iter()
                .map(|c| leaf(Expr::Constant(c.clone())))
                .collect(),
            Some(_) => Vec::new(),
        },
    );
    cat.push(
        "removeConstant",
        "Remove (unnecessary) constant from",
        Atomic,
        None,
        false,
        |_, e, _| match e.map(|e| &**e) {
            Some(Expr::Constant(_)) => vec![None],
            _ => Vec::new(),
        },
    );
    cat.push(
        "changeConstant",
        "Change the value of a constant in",
        Horizontal,
        None,
        false,
        |ctx, e, _| {
            let Some(Expr::Constant(current)) = e.map(|e| &**e) else {
                return Vec::new();
            };
            ctx.meta
                .values
                .constants
                .iter()
                .filter(|c| *c != current)
                .map(|c| leaf(Expr::Constant(c.clone())))
                .collect()
        },
    );
}

fn asterisks(cat: &mut Catalog<'_>) {
    cat.push(
        "addAsterisk",
        "Add (missing) asterisk to",
        Atomic,
        Some(ComponentKind::Asterisk),
        false,
        |ctx, e, stack| {
            let top = ctx.clause == Clause::Select && stack.is_empty();
            if e.is_some() || !(top || stack.last().is_some_and(|p| is_count(p))) {
                return Vec::new();
            }
            let mut out = vec![leaf(Expr::Asterisk { qualifier: None })];
            if top && ctx.meta.values.qualified_columns {
                for f in ctx.query.from() {
                    out.push(leaf(Expr::Asterisk {
                        qualifier: Some(f.exposed_name().clone()),
                    }));
                }
            }
            out
        },
    );
    remove_asterisk(cat);
    if cat.clause != Clause::Select {
        return;
    }
    cat.push(
        "setAsteriskQualifier",
        "Restrict an asterisk to one table in",
        Atomic,
        None,
        false,
        |ctx, e, _| {
            let Some(Expr::Asterisk { qualifier: None }) = e.map(|e| &**e) else {
                return Vec::new();
            };
            if !ctx.meta.values.qualified_columns {
                return Vec::new();
            }
            ctx.query
                .from()
                .iter()
                .map(|f| {
                    leaf(Expr::Asterisk {
                        qualifier: Some(f.exposed_name().clone()),
                    })
                })
                .collect()
        },
    );
    cat.push(
        "unsetAsteriskQualifier",
        "Extend an asterisk to all tables in",
        Atomic,
        None,
        false,
        |_, e, _| match e.map(|e| &**e) {
            Some(Expr::Asterisk { qualifier: Some(_) }) => {
                vec![leaf(Expr::Asterisk { qualifier: None })]
            }
            _ => Vec::new(),
        },
    );
}

fn remove_asterisk(cat: &mut Catalog<'_>) {
    cat.push(
        "removeAsterisk",
        "Remove (unnecessary) asterisk from",
        Atomic,
        None,
        false,
        |_, e, _| match e.map(|e| &**e) {
            Some(Expr::Asterisk { .. }) => vec![None],
            _ => Vec::new(),
        },
    );
}

fn nots(cat: &mut Catalog<'_>) {
    cat.push(
        "addNot",
        "Add (missing) negation to",
        Atomic,
        Some(ComponentKind::Not),
        true,
        |_, e, _| vec![Expr::not(e.cloned()).slot()],
    );
    cat.push(
        "removeNot",
        "Remove (unnecessary) negation from",
        Atomic,
        None,
        false,
        |_, e, _| match e.map(|e| &**e) {
            Some(Expr::Not(inner)) => vec![inner.clone()],
            _ => Vec::new(),
        },
    );
}

fn aggregations(cat: &mut Catalog<'_>) {
    if cat.clause.allows_aggregation() {
        cat.push(
            "addAggregationFunction",
            "Add (missing) aggregation function to",
            Atomic,
            Some(ComponentKind::Aggregation),
            true,
            |ctx, e, stack| {
                let nested = stack.iter().any(|p| matches!(p, Expr::Aggregate { .. }))
                    || e.is_some_and(|e| e.contains_aggregate());
                if nested {
                    return Vec::new();
                }
                ctx.meta
                    .values
                    .aggregation_kinds
                    .iter()
                    .map(|&k| Expr::aggregate(k, false, e.cloned()).slot())
                    .collect()
            },
        );
    }
    cat.push(
        "removeAggregationFunction",
        "Remove (unnecessary) aggregation function from",
        Atomic,
        None,
        false,
        |_, e, _| match e.map(|e| &**e) {
            Some(Expr::Aggregate { inner, .. }) => vec![inner.clone()],
            _ => Vec::new(),
        },
    );
    cat.push(
        "changeAggregationFunction",
        "Change the kind of an aggregation function in",
        Horizontal,
        None,
        false,
        |ctx, e, _| {
            let Some(Expr::Aggregate {
                kind,
                distinct,
                inner,
            }) = e.map(|e| &**e)
            else {
                return Vec::new();
            };
            ctx.meta
                .values
                .aggregation_kinds
                .iter()
                .filter(|k| *k != kind)
                .map(|&k| Expr::aggregate(k, *distinct, inner.clone()).slot())
                .collect()
        },
    );
    cat.push(
        "setAggregationDistinct",
        "Make an aggregation function ignore duplicates in",
        Atomic,
        None,
        false,
        |ctx, e, _| match e.map(|e| &**e) {
            Some(Expr::Aggregate {
                kind,
                distinct: false,
                inner,
            }) if ctx.meta.values.distinct_aggregation => {
                vec![Expr::aggregate(*kind, true, inner.clone()).slot()]
            }
            _ => Vec::new(),
        },
    );
    cat.push(
        "unsetAggregationDistinct",
        "Make an aggregation function count duplicates in",
        Atomic,
        None,
        false,
        |_, e, _| match e.map(|e| &**e) {
            Some(Expr::Aggregate {
                kind,
                distinct: true,
                inner,
            }) => vec![Expr::aggregate(*kind, false, inner.clone()).slot()],
            _ => Vec::new(),
        },
    );
}

fn binary_expressions(cat: &mut Catalog<'_>) {
    cat.push(
        "addBinaryExpression",
        "Add (missing) binary expression to",
        Atomic,
        Some(ComponentKind::BinaryExpression),
        true,
        |ctx, e, _| {
            let mut out = Vec::new();
            for &op in &ctx.meta.values.operators {
                out.push(Expr::binary(op, e.cloned(), None).slot());
                if e.is_some() {
                    out.push(Expr::binary(op, None, e.cloned()).slot());
                }
            }
            out
        },
    );
    cat.push(
        "removeBinaryExpression",
        "Remove (unnecessary) binary expression from",
        Atomic,
        None,
        false,
        |_, e, _| match e.map(|e| &**e) {
            Some(Expr::Binary {
                left: None, right, ..
            }) => vec![right.clone()],
            Some(Expr::Binary { left, right: None, .. }) => vec![left.clone()],
            _ => Vec::new(),
        },
    );
    cat.push(
        "changeBinaryOperator",
        "Change the operator of a binary expression in",
        Horizontal,
        None,
        false,
        |ctx, e, _| {
            let Some(Expr::Binary { op, left, right }) = e.map(|e| &**e) else {
                return Vec::new();
            };
            ctx.meta
                .values
                .operators
                .iter()
                .filter(|o| *o != op)
                .map(|&o| Expr::binary(o, left.clone(), right.clone()).slot())
                .collect()
        },
    );
}
