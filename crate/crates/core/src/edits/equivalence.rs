//! Rewrites that keep the result of every executable query unchanged.
//! All of them cost 0 by default.

use super::{Edit, EditCategory};
use crate::ast::{BinaryOp, Clause, Expr, JoinKind, Query, Slot};
use crate::meta::MetaInfo;
use crate::schema::{Resolution, Schema, Scope};

fn edit<F>(name: &str, description: &str, f: F) -> Edit
where
    F: Fn(&Query, &Schema) -> Vec<Query> + Send + Sync + 'static,
{
    Edit::new(name, description, 0, EditCategory::Equivalence, move |q: &Query, s: &Schema, _: &MetaInfo| {
        f(q, s)
    })
}

/// Applies `f` at every expression position of every clause.
fn everywhere(q: &Query, f: impl Fn(&Expr) -> Vec<Slot>) -> Vec<Query> {
    let mut out = Vec::new();
    for clause in Clause::ALL {
        out.extend(q.recursively_replace(clause, usize::MAX, |e, _| e.map_or_else(Vec::new, |e| f(e))));
    }
    out
}

fn swap_operands(e: &Expr, ops: &[BinaryOp]) -> Vec<Slot> {
    match e {
        Expr::Binary { op, left, right } if ops.contains(op) => {
            vec![Expr::binary(*op, right.clone(), left.clone()).slot()]
        }
        _ => Vec::new(),
    }
}

/// Both rotations of `(a o b) o c` and `a o (b o c)`.
fn rotations(e: &Expr, target: BinaryOp) -> Vec<Slot> {
    let Expr::Binary { op, left, right } = e else {
        return Vec::new();
    };
    if *op != target {
        return Vec::new();
    }
    let mut out = Vec::new();
    if let Some(Expr::Binary { op: inner, left: a, right: b }) = left.as_deref() {
        if *inner == target {
            let bc = Expr::binary(target, b.clone(), right.clone()).slot();
            out.push(Expr::binary(target, a.clone(), bc).slot());
        }
    }
    if let Some(Expr::Binary { op: inner, left: b, right: c }) = right.as_deref() {
        if *inner == target {
            let ab = Expr::binary(target, left.clone(), b.clone()).slot();
            out.push(Expr::binary(target, ab, c.clone()).slot());
        }
    }
    out
}

pub(super) fn push_edits(edits: &mut Vec<Edit>) {
    edits.push(edit(
        "andCommutation",
        "Swap the operands of a conjunction",
        |q, _| everywhere(q, |e| swap_operands(e, &[BinaryOp::And])),
    ));
    edits.push(edit(
        "orCommutation",
        "Swap the operands of a disjunction",
        |q, _| everywhere(q, |e| swap_operands(e, &[BinaryOp::Or])),
    ));
    edits.push(edit(
        "arithmeticCommutation",
        "Swap the operands of an addition or multiplication",
        |q, _| everywhere(q, |e| swap_operands(e, &[BinaryOp::Add, BinaryOp::Mul])),
    ));
    edits.push(edit(
        "comparisonFlip",
        "Swap the operands of a comparison and mirror its operator",
        |q, _| {
            everywhere(q, |e| match e {
                Expr::Binary { op, left, right } if op.is_comparison() => {
                    let mirrored = op.mirrored().expect("comparisons have a mirror");
                    vec![Expr::binary(mirrored, right.clone(), left.clone()).slot()]
                }
                _ => Vec::new(),
            })
        },
    ));
    edits.push(edit(
        "andAssociativity",
        "Regroup a chain of conjunctions",
        |q, _| everywhere(q, |e| rotations(e, BinaryOp::And)),
    ));
    edits.push(edit(
        "orAssociativity",
        "Regroup a chain of disjunctions",
        |q, _| everywhere(q, |e| rotations(e, BinaryOp::Or)),
    ));
    edits.push(edit(
        "notPushdown",
        "Replace a negated comparison by the opposite comparison",
        |q, _| {
            everywhere(q, |e| match e {
                Expr::Not(Some(inner)) => match &**inner {
                    Expr::Binary { op, left, right } if op.is_comparison() => {
                        let negated = op.negated().expect("comparisons have a negation");
                        vec![Expr::binary(negated, left.clone(), right.clone()).slot()]
                    }
                    _ => Vec::new(),
                },
                _ => Vec::new(),
            })
        },
    ));
    edits.push(edit(
        "notPullup",
        "Replace a comparison by the negation of the opposite comparison",
        |q, _| {
            everywhere(q, |e| match e {
                Expr::Binary { op, left, right } if op.is_comparison() => {
                    let negated = op.negated().expect("comparisons have a negation");
                    vec![Expr::not(Expr::binary(negated, left.clone(), right.clone()).slot()).slot()]
                }
                _ => Vec::new(),
            })
        },
    ));
    edits.push(edit(
        "doubleNegationElimination",
        "Remove a double negation",
        |q, _| {
            everywhere(q, |e| match e {
                Expr::Not(Some(inner)) => match &**inner {
                    Expr::Not(x) => vec![x.clone()],
                    _ => Vec::new(),
                },
                _ => Vec::new(),
            })
        },
    ));
    edits.push(edit(
        "conjunctDuplication",
        "Repeat a condition as a conjunction with itself",
        |q, _| {
            let mut out = Vec::new();
            let dup = |p: &Slot| match p {
                Some(e) if !e.has_hole() => Some(Expr::binary(BinaryOp::And, p.clone(), p.clone()).slot()),
                _ => None,
            };
            if let Some(w) = dup(q.where_clause()) {
                out.push(q.set_where(w));
            }
            if let Some(h) = dup(q.having()) {
                out.push(q.set_having(h));
            }
            out
        },
    ));
    edits.push(edit(
        "conjunctDeduplication",
        "Remove a condition repeated in a conjunction",
        |q, _| {
            everywhere(q, |e| match e {
                Expr::Binary {
                    op: BinaryOp::And,
                    left,
                    right,
                } if left == right => vec![left.clone()],
                _ => Vec::new(),
            })
        },
    ));
    edits.push(edit(
        "innerJoinToCrossWhere",
        "Move the condition of an inner join into the where-clause",
        inner_join_to_cross_where,
    ));
    edits.push(edit(
        "crossWhereToInnerJoin",
        "Move a condition of the where-clause into an inner join",
        cross_where_to_inner_join,
    ));
    edits.push(edit(
        "dropRedundantDistinct",
        "Remove a DISTINCT that cannot remove any row",
        |q, s| {
            if q.distinct() && distinct_is_redundant(q, s) {
                vec![q.set_distinct(false)]
            } else {
                Vec::new()
            }
        },
    ));
    edits.push(edit(
        "addRedundantDistinct",
        "Add a DISTINCT that cannot remove any row",
        |q, s| {
            if !q.distinct() && distinct_is_redundant(q, s) {
                vec![q.set_distinct(true)]
            } else {
                Vec::new()
            }
        },
    ));
}

/// Whether moving a condition between the ON of element `upto` and the
/// WHERE clause keeps the join semantics: no later join preserves the rows
/// of its right side.
fn later_joins_allow_move(q: &Query, upto: usize) -> bool {
    !q.from()[upto + 1..]
        .iter()
        .any(|f| matches!(f.join, Some(JoinKind::RightOuter | JoinKind::FullOuter)))
}

/// Whether every column in `condition` resolves to one of the first
/// `upto + 1` FROM elements, both in that prefix and in the whole FROM
/// clause.
fn confined(q: &Query, schema: &Schema, condition: &Expr, upto: usize) -> bool {
    let Ok(scope) = Scope::new(q, schema) else {
        return false;
    };
    let all = scope.entries.len();
    let mut ok = !condition.contains_aggregate();
    condition.walk(&mut |e| {
        if let Expr::Column { qualifier, name } = e {
            let whole = scope.resolve(qualifier.as_ref(), name, all);
            let prefix = scope.resolve(qualifier.as_ref(), name, upto + 1);
            ok &= matches!((whole, prefix), (Resolution::Column(a), Resolution::Column(b)) if a == b);
        }
    });
    ok
}

fn inner_join_to_cross_where(q: &Query, schema: &Schema) -> Vec<Query> {
    let mut out = Vec::new();
    for (i, f) in q.from().iter().enumerate() {
        let (Some(JoinKind::Inner), Some(c)) = (f.join, &f.condition) else {
            continue;
        };
        if !later_joins_allow_move(q, i) || !confined(q, schema, c, i) {
            continue;
        }
        let condition = f.condition.clone();
        let where_clause = match q.where_clause() {
            None => condition,
            w => Expr::binary(BinaryOp::And, w.clone(), condition).slot(),
        };
        if let Ok(moved) = q.replace_from_element(i, f.clone().joined(JoinKind::Cross, None)) {
            out.push(moved.set_where(where_clause));
        }
    }
    out
}

fn cross_where_to_inner_join(q: &Query, schema: &Schema) -> Vec<Query> {
    let Some(w) = q.where_clause() else {
        return Vec::new();
    };
    // (condition to move, what stays in WHERE)
    let mut splits: Vec<(Slot, Slot)> = vec![(Some(w.clone()), None)];
    if let Expr::Binary {
        op: BinaryOp::And,
        left,
        right,
    } = &**w
    {
        splits.push((right.clone(), left.clone()));
        splits.push((left.clone(), right.clone()));
    }
    let mut out = Vec::new();
    for (i, f) in q.from().iter().enumerate() {
        if f.join != Some(JoinKind::Cross) || !later_joins_allow_move(q, i) {
            continue;
        }
        for (moved, rest) in &splits {
            let Some(c) = moved else { continue };
            if !confined(q, schema, c, i) {
                continue;
            }
            let element = f.clone().joined(JoinKind::Inner, moved.clone());
            if let Ok(joined) = q.replace_from_element(i, element) {
                out.push(joined.set_where(rest.clone()));
            }
        }
    }
    out
}

/// DISTINCT cannot remove rows when the SELECT list contains a full primary
/// key of every FROM element and nothing is grouped or aggregated.
fn distinct_is_redundant(q: &Query, schema: &Schema) -> bool {
    if q.from().is_empty() || !q.group_by().is_empty() || q.having().is_some() {
        return false;
    }
    let aggregated = |s: &Slot| s.as_ref().is_none_or(|e| e.contains_aggregate());
    if q.select().iter().any(|s| aggregated(&s.expr)) || q.order_by().iter().any(|o| aggregated(&o.expr)) {
        return false;
    }
    let Ok(scope) = Scope::new(q, schema) else {
        return false;
    };
    let all = scope.entries.len();
    scope.entries.iter().enumerate().all(|(i, (_, table))| {
        !table.primary_key().is_empty()
            && table.primary_key().iter().all(|key| {
                q.select().iter().any(|s| match s.expr.as_deref() {
                    Some(Expr::Asterisk { qualifier: None }) => true,
                    Some(Expr::Asterisk { qualifier: Some(t) }) => scope.element(t, all) == Some(i),
                    Some(Expr::Column { qualifier, name }) => matches!(
                        scope.resolve(qualifier.as_ref(), name, all),
                        Resolution::Column((j, c)) if j == i && c == *key
                    ),
                    _ => false,
                })
            })
    })
}
