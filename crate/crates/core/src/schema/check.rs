use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{Schema, Table};
use crate::ast::{AggregateKind, Clause, Expr, Ident, Query, Slot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ExecutabilityCategory {
    Hole,
    UnknownTable,
    UnknownColumn,
    AmbiguousColumn,
    IllegalAggregation,
    UngroupedColumn,
    /// A value where a condition is required, or the reverse.
    ShapeMismatch,
}

impl ExecutabilityCategory {
    pub const ALL: [ExecutabilityCategory; 7] = [
        Self::Hole,
        Self::UnknownTable,
        Self::UnknownColumn,
        Self::AmbiguousColumn,
        Self::IllegalAggregation,
        Self::UngroupedColumn,
        Self::ShapeMismatch,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ExecutabilityError {
    pub category: ExecutabilityCategory,
    /// Clause the problem was found in; `None` for the query as a whole.
    pub clause: Option<Clause>,
    pub message: String,
}

impl fmt::Display for ExecutabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.clause {
            Some(c) => write!(f, "{:?} in {}: {}", self.category, c.phrase(), self.message),
            None => write!(f, "{:?}: {}", self.category, self.message),
        }
    }
}

fn fail<T>(
    category: ExecutabilityCategory,
    clause: Option<Clause>,
    message: impl Into<String>,
) -> Result<T, ExecutabilityError> {
    Err(ExecutabilityError {
        category,
        clause,
        message: message.into(),
    })
}

/// A resolved column: FROM-element index and column name.
pub(crate) type ColumnBinding = (usize, Ident);

/// Name resolution against the FROM list of one query.
pub(crate) struct Scope<'a> {
    pub entries: Vec<(&'a Ident, &'a Table)>,
}

pub(crate) enum Resolution {
    Column(ColumnBinding),
    Unknown(ExecutabilityCategory, String),
    Ambiguous(String),
}

impl<'a> Scope<'a> {
    pub fn new(query: &'a Query, schema: &'a Schema) -> Result<Scope<'a>, ExecutabilityError> {
        let mut entries = Vec::new();
        for f in query.from() {
            let Some(table) = schema.table_of(f) else {
                return fail(
                    ExecutabilityCategory::UnknownTable,
                    None,
                    format!("table '{}' does not exist", f.table),
                );
            };
            if entries.iter().any(|(n, _)| *n == f.exposed_name()) {
                return fail(
                    ExecutabilityCategory::AmbiguousColumn,
                    None,
                    format!("table name '{}' specified more than once", f.exposed_name()),
                );
            }
            entries.push((f.exposed_name(), table));
        }
        Ok(Scope { entries })
    }

    /// Index of the FROM element exposed as `qualifier` among the first
    /// `visible` elements.
    pub fn element(&self, qualifier: &str, visible: usize) -> Option<usize> {
        self.entries[..visible]
            .iter()
            .position(|(n, _)| n.as_ref() == qualifier)
    }

    pub fn resolve(&self, qualifier: Option<&Ident>, column: &Ident, visible: usize) -> Resolution {
        match qualifier {
            Some(q) => match self.element(q, visible) {
                None => Resolution::Unknown(
                    ExecutabilityCategory::UnknownTable,
                    format!("missing FROM entry for '{q}'"),
                ),
                Some(i) if self.entries[i].1.has_column(column) => {
                    Resolution::Column((i, column.clone()))
                }
                Some(_) => Resolution::Unknown(
                    ExecutabilityCategory::UnknownColumn,
                    format!("column '{q}.{column}' does not exist"),
                ),
            },
            None => {
                let owners: Vec<usize> = (0..visible)
                    .filter(|&i| self.entries[i].1.has_column(column))
                    .collect();
                match owners.as_slice() {
                    [i] => Resolution::Column((*i, column.clone())),
                    [] => Resolution::Unknown(
                        ExecutabilityCategory::UnknownColumn,
                        format!("column '{column}' does not exist"),
                    ),
                    _ => Resolution::Ambiguous(format!("column reference '{column}' is ambiguous")),
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Shape {
    Condition,
    Value,
    Any,
}

/// Checks that `query` would run against a database of `schema` without
/// error. Returns the first problem found.
pub fn check_executable(query: &Query, schema: &Schema) -> Result<(), ExecutabilityError> {
    use ExecutabilityCategory as C;

    if query.select().is_empty() {
        return fail(C::Hole, Some(Clause::Select), "the select list is empty");
    }
    if query.from().is_empty() {
        return fail(C::Hole, None, "the from clause is empty");
    }
    let scope = Scope::new(query, schema)?;
    let all = scope.entries.len();
    let select_aliases: Vec<&Ident> = query.select().iter().filter_map(|s| s.alias.as_ref()).collect();

    let checker = |clause: Clause, visible: usize| ExprChecker {
        scope: &scope,
        clause,
        visible,
        aliases: if clause == Clause::OrderBy {
            select_aliases.clone()
        } else {
            Vec::new()
        },
    };

    for s in query.select() {
        let Some(e) = &s.expr else {
            return fail(C::Hole, Some(Clause::Select), "select element without expression");
        };
        if let Expr::Asterisk { qualifier } = &**e {
            checker(Clause::Select, all).asterisk(qualifier)?;
        } else {
            checker(Clause::Select, all).expr(e, false)?;
        }
    }
    let mut visible = 1;
    for f in query.from().iter().skip(1) {
        visible += 1;
        if f.has_condition_slot() {
            checker(Clause::JoinCondition, visible).condition(&f.condition)?;
        }
    }
    if query.where_clause().is_some() {
        checker(Clause::Where, all).condition(query.where_clause())?;
    }
    for g in query.group_by() {
        let Some(e) = g else {
            return fail(C::Hole, Some(Clause::GroupBy), "empty group-by element");
        };
        checker(Clause::GroupBy, all).expr(e, false)?;
    }
    if query.having().is_some() {
        checker(Clause::Having, all).condition(query.having())?;
    }
    for o in query.order_by() {
        let Some(e) = &o.expr else {
            return fail(C::Hole, Some(Clause::OrderBy), "empty order-by element");
        };
        checker(Clause::OrderBy, all).expr(e, false)?;
    }

    check_grouping(query, &scope, &select_aliases)
}

struct ExprChecker<'s, 'a> {
    scope: &'s Scope<'a>,
    clause: Clause,
    visible: usize,
    aliases: Vec<&'s Ident>,
}

impl ExprChecker<'_, '_> {
    fn err<T>(&self, category: ExecutabilityCategory, msg: impl Into<String>) -> Result<T, ExecutabilityError> {
        fail(category, Some(self.clause), msg)
    }

    fn condition(&self, slot: &Slot) -> Result<(), ExecutabilityError> {
        let Some(e) = slot else {
            return self.err(ExecutabilityCategory::Hole, "missing condition");
        };
        if self.expr(e, false)? == Shape::Value {
            return self.err(
                ExecutabilityCategory::ShapeMismatch,
                format!("'{e}' is not a condition"),
            );
        }
        Ok(())
    }

    fn asterisk(&self, qualifier: &Option<Ident>) -> Result<(), ExecutabilityError> {
        if let Some(q) = qualifier {
            if self.scope.element(q, self.visible).is_none() {
                return self.err(
                    ExecutabilityCategory::UnknownTable,
                    format!("missing FROM entry for '{q}'"),
                );
            }
        }
        Ok(())
    }

    fn operand(&self, slot: &Slot, in_aggregate: bool, want: Shape) -> Result<(), ExecutabilityError> {
        let Some(e) = slot else {
            return self.err(ExecutabilityCategory::Hole, "missing operand");
        };
        let shape = self.expr(e, in_aggregate)?;
        if shape != Shape::Any && want != Shape::Any && shape != want {
            return self.err(
                ExecutabilityCategory::ShapeMismatch,
                format!("'{e}' has the wrong shape for its position"),
            );
        }
        Ok(())
    }

    fn expr(&self, e: &Expr, in_aggregate: bool) -> Result<Shape, ExecutabilityError> {
        use ExecutabilityCategory as C;
        match e {
            Expr::Asterisk { .. } => self.err(C::ShapeMismatch, "'*' is not allowed here"),
            Expr::Column { qualifier, name } => {
                if qualifier.is_none() && self.aliases.contains(&name) {
                    return Ok(Shape::Any);
                }
                match self.scope.resolve(qualifier.as_ref(), name, self.visible) {
                    Resolution::Column(_) => Ok(Shape::Any),
                    Resolution::Unknown(c, msg) => self.err(c, msg),
                    Resolution::Ambiguous(msg) => self.err(C::AmbiguousColumn, msg),
                }
            }
            Expr::Constant(_) => Ok(Shape::Value),
            Expr::Not(inner) => {
                self.operand(inner, in_aggregate, Shape::Condition)?;
                Ok(Shape::Condition)
            }
            Expr::Aggregate { kind, inner, .. } => {
                if !self.clause.allows_aggregation() {
                    return self.err(
                        C::IllegalAggregation,
                        format!("aggregate functions are not allowed in the {}", self.clause.phrase()),
                    );
                }
                if in_aggregate {
                    return self.err(C::IllegalAggregation, "aggregate function calls cannot be nested");
                }
                match inner.as_deref() {
                    Some(Expr::Asterisk { qualifier: None }) if *kind == AggregateKind::Count => {}
                    Some(Expr::Asterisk { .. }) => {
                        return self.err(C::ShapeMismatch, format!("{}(*) is not allowed", kind.keyword()))
                    }
                    _ => self.operand(inner, true, Shape::Value)?,
                }
                Ok(Shape::Value)
            }
            Expr::Binary { op, left, right } => {
                let (want, result) = if op.is_logical() {
                    (Shape::Condition, Shape::Condition)
                } else if op.is_comparison() {
                    (Shape::Any, Shape::Condition)
                } else {
                    (Shape::Value, Shape::Value)
                };
                self.operand(left, in_aggregate, want)?;
                self.operand(right, in_aggregate, want)?;
                Ok(result)
            }
        }
    }
}

fn is_aggregate_query(query: &Query) -> bool {
    !query.group_by().is_empty()
        || [Clause::Select, Clause::Having, Clause::OrderBy].into_iter().any(|c| {
            query
                .clause_slots(c)
                .into_iter()
                .flatten()
                .any(|e| e.contains_aggregate())
        })
}

fn check_grouping(query: &Query, scope: &Scope<'_>, aliases: &[&Ident]) -> Result<(), ExecutabilityError> {
    if !is_aggregate_query(query) {
        return Ok(());
    }
    let all = scope.entries.len();
    let grouped_exprs: Vec<&Expr> = query.group_by().iter().flatten().map(|e| &**e).collect();
    let mut grouped_columns: Vec<ColumnBinding> = Vec::new();
    for e in &grouped_exprs {
        if let Expr::Column { qualifier, name } = e {
            if let Resolution::Column(b) = scope.resolve(qualifier.as_ref(), name, all) {
                grouped_columns.push(b);
            }
        }
    }
    // Columns of a table whose whole primary key is grouped are
    // functionally dependent on the grouping.
    let key_grouped = |element: usize| {
        let key = scope.entries[element].1.primary_key();
        !key.is_empty()
            && key
                .iter()
                .all(|k| grouped_columns.iter().any(|(i, c)| *i == element && c == k))
    };

    let check = |clause: Clause, e: &Expr, allow_aliases: bool| -> Result<(), ExecutabilityError> {
        let mut stack = vec![e];
        while let Some(e) = stack.pop() {
            if grouped_exprs.contains(&e) {
                continue;
            }
            match e {
                Expr::Aggregate { .. } | Expr::Constant(_) => {}
                Expr::Asterisk { .. } => {
                    return fail(
                        ExecutabilityCategory::UngroupedColumn,
                        Some(clause),
                        "'*' in a grouped query",
                    )
                }
                Expr::Column { qualifier, name } => {
                    if allow_aliases && qualifier.is_none() && aliases.contains(&name) {
                        continue;
                    }
                    if let Resolution::Column(b) = scope.resolve(qualifier.as_ref(), name, all) {
                        if !grouped_columns.contains(&b) && !key_grouped(b.0) {
                            return fail(
                                ExecutabilityCategory::UngroupedColumn,
                                Some(clause),
                                format!("column '{e}' must appear in the group-by clause or be used in an aggregate function"),
                            );
                        }
                    }
                }
                other => stack.extend(other.children().flatten().map(|c| &**c)),
            }
        }
        Ok(())
    };

    for s in query.select() {
        if let Some(e) = &s.expr {
            check(Clause::Select, e, false)?;
        }
    }
    if let Some(e) = query.having() {
        check(Clause::Having, e, false)?;
    }
    for o in query.order_by() {
        if let Some(e) = &o.expr {
            check(Clause::OrderBy, e, true)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_query, parse_schema};

    fn category(sql: &str, schema: &str) -> Option<ExecutabilityCategory> {
        let q = parse_query(sql).unwrap();
        let s = parse_schema(schema).unwrap();
        check_executable(&q, &s).err().map(|e| e.category)
    }

    const SCHEMA: &str = "students(*id, name, age)\nteachers(*id, subject)";

    #[test]
    fn ambiguous_unqualified_column() {
        assert_eq!(
            category("SELECT id FROM students, teachers", SCHEMA),
            Some(ExecutabilityCategory::AmbiguousColumn)
        );
        assert_eq!(
            category("SELECT students.name, id FROM students, teachers", SCHEMA),
            Some(ExecutabilityCategory::AmbiguousColumn)
        );
    }

    #[test]
    fn minimal_queries_pass() {
        assert_eq!(category("SELECT * FROM students", SCHEMA), None);
        assert_eq!(category("SELECT students.id FROM students, teachers", SCHEMA), None);
        assert_eq!(
            category(
                "SELECT * FROM students JOIN teachers ON students.id = teachers.id",
                SCHEMA
            ),
            None
        );
        assert_eq!(
            category("SELECT s.name AS n FROM students s WHERE s.age > 21 ORDER BY n DESC", SCHEMA),
            None
        );
    }

    #[test]
    fn every_category_is_reachable() {
        use ExecutabilityCategory as C;
        let cases = [
            ("SELECT AVG() FROM students", C::Hole),
            ("SELECT id FROM pupils", C::UnknownTable),
            ("SELECT x.id FROM students", C::UnknownTable),
            ("SELECT grade FROM students", C::UnknownColumn),
            ("SELECT id FROM students, teachers", C::AmbiguousColumn),
            ("SELECT id FROM students WHERE COUNT(id) > 1", C::IllegalAggregation),
            ("SELECT MAX(COUNT(id)) FROM students", C::IllegalAggregation),
            ("SELECT name, COUNT(*) FROM students", C::UngroupedColumn),
            ("SELECT age, name FROM students GROUP BY age", C::UngroupedColumn),
            ("SELECT id FROM students WHERE 3", C::ShapeMismatch),
        ];
        for (sql, want) in cases {
            assert_eq!(category(sql, SCHEMA), Some(want), "{sql}");
        }
    }

    #[test]
    fn primary_key_grouping_allows_dependent_columns() {
        assert_eq!(category("SELECT id, name, COUNT(*) FROM students GROUP BY id", SCHEMA), None);
        assert_eq!(
            category("SELECT age, COUNT(*) FROM students GROUP BY age HAVING AVG(id) > 2", SCHEMA),
            None
        );
    }

    #[test]
    fn join_condition_sees_only_earlier_tables() {
        assert_eq!(
            category(
                "SELECT * FROM students s JOIN teachers t ON s.id = x.id, students x",
                SCHEMA
            ),
            Some(ExecutabilityCategory::UnknownTable)
        );
    }
}
