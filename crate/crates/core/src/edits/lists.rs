//! Edits on the query's lists and flags: DISTINCT, SELECT, FROM, GROUP BY
//! and ORDER BY elements.

use std::collections::HashMap;

use super::{Edit, EditCategory};
use crate::ast::{Direction, FromElement, Ident, JoinKind, OrderByElement, Query, SelectElement};
use crate::meta::MetaInfo;
use crate::schema::Schema;
use crate::Cost;

use EditCategory::{Atomic, Equivalence, Horizontal};

fn edit<F>(name: &str, description: &str, cost: Cost, category: EditCategory, f: F) -> Edit
where
    F: Fn(&Query, &MetaInfo) -> Vec<Query> + Send + Sync + 'static,
{
    Edit::new(name, description, cost, category, move |q: &Query, _: &Schema, m: &MetaInfo| f(q, m))
}

/// Every query obtained by swapping two elements of a list.
fn swaps<T: Clone>(items: &[T], rebuild: impl Fn(Vec<T>) -> Query) -> Vec<Query> {
    let mut out = Vec::new();
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let mut v = items.to_vec();
            v.swap(i, j);
            out.push(rebuild(v));
        }
    }
    out
}

pub(super) fn push_edits(edits: &mut Vec<Edit>) {
    distinct(edits);
    select(edits);
    from(edits);
    group_by(edits);
    order_by(edits);
}

fn distinct(edits: &mut Vec<Edit>) {
    edits.push(edit(
        "setDistinct",
        "Add DISTINCT to the select-clause",
        2,
        Atomic,
        |q, _| if q.distinct() { vec![] } else { vec![q.set_distinct(true)] },
    ));
    edits.push(edit(
        "unsetDistinct",
        "Remove DISTINCT from the select-clause",
        2,
        Atomic,
        |q, _| if q.distinct() { vec![q.set_distinct(false)] } else { vec![] },
    ));
}

fn select(edits: &mut Vec<Edit>) {
    edits.push(edit(
        "addSelectElement",
        "Add a (missing) element to the select-clause",
        1,
        Atomic,
        |q, _| {
            (0..=q.select().len())
                .filter_map(|i| q.insert_select_element(i, SelectElement::hole()).ok())
                .collect()
        },
    ));
    edits.push(edit(
        "removeSelectElement",
        "Remove an (unnecessary) element from the select-clause",
        1,
        Atomic,
        |q, _| {
            (0..q.select().len())
                .filter(|&i| q.select()[i] == SelectElement::hole())
                .filter_map(|i| q.remove_select_element(i).ok())
                .collect()
        },
    ));
    edits.push(edit(
        "setSelectElementAlias",
        "Give an element of the select-clause an alias",
        1,
        Atomic,
        |q, m| {
            let mut out = Vec::new();
            for (i, s) in q.select().iter().enumerate() {
                if s.alias.is_some() {
                    continue;
                }
                for a in &m.values.select_aliases {
                    let element = SelectElement {
                        expr: s.expr.clone(),
                        alias: Some(a.clone()),
                    };
                    out.extend(q.replace_select_element(i, element).ok());
                }
            }
            out
        },
    ));
    edits.push(edit(
        "unsetSelectElementAlias",
        "Remove the alias of an element of the select-clause",
        1,
        Atomic,
        |q, _| {
            let mut out = Vec::new();
            for (i, s) in q.select().iter().enumerate() {
                if s.alias.is_some() {
                    let element = SelectElement {
                        expr: s.expr.clone(),
                        alias: None,
                    };
                    out.extend(q.replace_select_element(i, element).ok());
                }
            }
            out
        },
    ));
    edits.push(edit(
        "changeSelectElementAlias",
        "Change the alias of an element of the select-clause",
        1,
        Horizontal,
        |q, m| {
            let mut out = Vec::new();
            for (i, s) in q.select().iter().enumerate() {
                let Some(current) = &s.alias else { continue };
                for a in m.values.select_aliases.iter().filter(|a| *a != current) {
                    let element = SelectElement {
                        expr: s.expr.clone(),
                        alias: Some(a.clone()),
                    };
                    out.extend(q.replace_select_element(i, element).ok());
                }
            }
            out
        },
    ));
    edits.push(edit(
        "swapSelectElements",
        "Swap the order of two elements of the select-clause",
        1,
        Horizontal,
        |q, _| swaps(q.select(), |v| q.set_select(v)),
    ));
}

/// Rewrites references qualified by `from` to be qualified by `to`.
fn requalify(q: &Query, from: &Ident, to: &Ident) -> Query {
    let renames: HashMap<Ident, Ident> = [(from.clone(), to.clone())].into();
    q.requalified(&renames)
}

fn from(edits: &mut Vec<Edit>) {
    edits.push(edit(
        "addFromElement",
        "Add a (missing) table to the from-clause",
        1,
        Atomic,
        |q, m| {
            let mut out = Vec::new();
            for i in 0..=q.from().len() {
                for t in m.values.tables() {
                    out.extend(q.insert_from_element(i, FromElement::table(t, None)).ok());
                }
            }
            out
        },
    ));
    edits.push(edit(
        "removeFromElement",
        "Remove an (unnecessary) table from the from-clause",
        1,
        Atomic,
        |q, _| {
            let from = q.from();
            (0..from.len())
                .filter(|&i| {
                    let next_is_conditional = i == 0 && from.get(1).is_some_and(|f| f.has_condition_slot());
                    from[i].alias.is_none() && !from[i].has_condition_slot() && !next_is_conditional
                })
                .filter_map(|i| q.remove_from_element(i).ok())
                .collect()
        },
    ));
    edits.push(edit(
        "changeFromTable",
        "Replace a table of the from-clause with another one",
        1,
        Horizontal,
        |q, m| {
            let mut out = Vec::new();
            for (i, f) in q.from().iter().enumerate() {
                for t in m.values.tables().filter(|t| **t != f.table) {
                    let element = FromElement {
                        table: t.clone(),
                        ..f.clone()
                    };
                    out.extend(q.replace_from_element(i, element).ok());
                }
            }
            out
        },
    ));
    edits.push(edit(
        "setFromAlias",
        "Give a table of the from-clause an alias",
        1,
        Atomic,
        |q, m| {
            let mut out = Vec::new();
            for (i, f) in q.from().iter().enumerate() {
                if f.alias.is_some() {
                    continue;
                }
                let taken = |a: &Ident| q.from().iter().any(|o| o.exposed_name() == a);
                if let Some(a) = m.values.from_aliases.iter().find(|a| !taken(a)) {
                    let element = FromElement {
                        alias: Some(a.clone()),
                        ..f.clone()
                    };
                    let renamed = requalify(q, &f.table, a);
                    out.extend(renamed.replace_from_element(i, element).ok());
                }
            }
            out
        },
    ));
    edits.push(edit(
        "unsetFromAlias",
        "Remove the alias of a table of the from-clause",
        1,
        Atomic,
        |q, _| {
            let mut out = Vec::new();
            for (i, f) in q.from().iter().enumerate() {
                let Some(alias) = &f.alias else { continue };
                if q.from().iter().any(|o| *o.exposed_name() == f.table) {
                    continue;
                }
                let element = FromElement {
                    alias: None,
                    ..f.clone()
                };
                let renamed = requalify(q, alias, &f.table);
                out.extend(renamed.replace_from_element(i, element).ok());
            }
            out
        },
    ));
    edits.push(edit(
        "setJoinType",
        "Turn a cross product in the from-clause into a join with a condition",
        1,
        Atomic,
        |q, _| {
            let mut out = Vec::new();
            for (i, f) in q.from().iter().enumerate() {
                if f.join != Some(JoinKind::Cross) {
                    continue;
                }
                for kind in JoinKind::CONDITIONAL {
                    out.extend(q.replace_from_element(i, f.clone().joined(kind, None)).ok());
                }
            }
            out
        },
    ));
    edits.push(edit(
        "unsetJoinType",
        "Turn a join without condition in the from-clause into a cross product",
        1,
        Atomic,
        |q, _| {
            let mut out = Vec::new();
            for (i, f) in q.from().iter().enumerate() {
                if f.has_condition_slot() && f.condition.is_none() {
                    out.extend(q.replace_from_element(i, f.clone().joined(JoinKind::Cross, None)).ok());
                }
            }
            out
        },
    ));
    edits.push(edit(
        "changeJoinType",
        "Change the type of a join in the from-clause",
        1,
        Atomic,
        |q, _| {
            let mut out = Vec::new();
            for (i, f) in q.from().iter().enumerate() {
                let Some(current) = f.join.filter(|k| k.has_condition()) else {
                    continue;
                };
                for kind in JoinKind::CONDITIONAL.into_iter().filter(|k| *k != current) {
                    let element = f.clone().joined(kind, f.condition.clone());
                    out.extend(q.replace_from_element(i, element).ok());
                }
            }
            out
        },
    ));
}

fn group_by(edits: &mut Vec<Edit>) {
    edits.push(edit(
        "addGroupByElement",
        "Add a (missing) element to the group-by-clause",
        1,
        Atomic,
        |q, _| {
            (0..=q.group_by().len())
                .filter_map(|i| q.insert_group_by_element(i, None).ok())
                .collect()
        },
    ));
    edits.push(edit(
        "removeGroupByElement",
        "Remove an (unnecessary) element from the group-by-clause",
        1,
        Atomic,
        |q, _| {
            (0..q.group_by().len())
                .filter(|&i| q.group_by()[i].is_none())
                .filter_map(|i| q.remove_group_by_element(i).ok())
                .collect()
        },
    ));
    edits.push(edit(
        "swapGroupByElements",
        "Swap the order of two elements of the group-by-clause",
        0,
        Equivalence,
        |q, _| swaps(q.group_by(), |v| q.set_group_by(v)),
    ));
}

fn order_by(edits: &mut Vec<Edit>) {
    edits.push(edit(
        "addOrderByElement",
        "Add a (missing) element to the order-by-clause",
        1,
        Atomic,
        |q, _| {
            (0..=q.order_by().len())
                .filter_map(|i| q.insert_order_by_element(i, OrderByElement::default()).ok())
                .collect()
        },
    ));
    edits.push(edit(
        "removeOrderByElement",
        "Remove an (unnecessary) element from the order-by-clause",
        1,
        Atomic,
        |q, _| {
            (0..q.order_by().len())
                .filter(|&i| q.order_by()[i] == OrderByElement::default())
                .filter_map(|i| q.remove_order_by_element(i).ok())
                .collect()
        },
    ));
    for (name, description, from, to) in [
        (
            "setOrderByDescending",
            "Sort an element of the order-by-clause in descending order",
            Direction::Asc,
            Direction::Desc,
        ),
        (
            "unsetOrderByDescending",
            "Sort an element of the order-by-clause in ascending order",
            Direction::Desc,
            Direction::Asc,
        ),
    ] {
        edits.push(edit(name, description, 1, Atomic, move |q, _| {
            let mut out = Vec::new();
            for (i, o) in q.order_by().iter().enumerate() {
                if o.direction == from {
                    let element = OrderByElement::new(o.expr.clone(), to);
                    out.extend(q.replace_order_by_element(i, element).ok());
                }
            }
            out
        }));
    }
    edits.push(edit(
        "swapOrderByElements",
        "Swap the order of two elements of the order-by-clause",
        1,
        Horizontal,
        |q, _| swaps(q.order_by(), |v| q.set_order_by(v)),
    ));
}
