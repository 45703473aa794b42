use thiserror::Error;

use super::check::{check_executable, ExecutabilityError, Resolution, Scope};
use super::{Schema, Table};
use crate::ast::{Clause, Expr, Ident, Query};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeductionError {
    #[error("the query is incomplete")]
    Incomplete,
    #[error("column '{0}' could belong to more than one table")]
    Ambiguous(String),
    #[error("qualifier '{0}' does not name a FROM element")]
    UnknownQualifier(String),
    #[error("the query is not executable on its own deduced schema: {0}")]
    NotExecutable(ExecutabilityError),
}

/// Builds the smallest schema under which `query` is executable, from the
/// tables in its FROM clause and the columns it attributes to them. Columns
/// the query never mentions are missing from the result.
pub fn deduce_schema(query: &Query) -> Result<Schema, DeductionError> {
    if query.has_hole() {
        return Err(DeductionError::Incomplete);
    }
    let mut tables: Vec<(Ident, Vec<Ident>)> = Vec::new();
    for f in query.from() {
        if !tables.iter().any(|(t, _)| *t == f.table) {
            tables.push((f.table.clone(), Vec::new()));
        }
    }
    let select_aliases: Vec<&Ident> = query.select().iter().filter_map(|s| s.alias.as_ref()).collect();

    for (clause, e) in query.expressions() {
        let Expr::Column { qualifier, name } = e else {
            continue;
        };
        let element = match qualifier {
            Some(q) => query
                .from()
                .iter()
                .find(|f| f.exposed_name() == q)
                .ok_or_else(|| DeductionError::UnknownQualifier(q.to_string()))?,
            None if clause == Clause::OrderBy && select_aliases.contains(&name) => continue,
            None => match query.from() {
                [only] => only,
                _ => return Err(DeductionError::Ambiguous(name.to_string())),
            },
        };
        let columns = &mut tables
            .iter_mut()
            .find(|(t, _)| *t == element.table)
            .expect("every FROM table was registered")
            .1;
        if !columns.contains(name) {
            columns.push(name.clone());
        }
    }

    let tables = tables
        .into_iter()
        .map(|(name, columns)| {
            Table::new(&name, columns.iter().map(|c| c.as_ref()), std::iter::empty::<&str>())
                .expect("deduced columns are unique")
        })
        .collect();
    let schema = Schema::new(tables).expect("deduced tables are unique");
    check_executable(query, &schema).map_err(DeductionError::NotExecutable)?;
    Ok(schema)
}

/// Filters `schema` down to what `destination` uses: its FROM tables and
/// the columns it references, with asterisks keeping whole tables. A
/// primary key survives only if all of its columns do.
pub fn restrict_schema(schema: &Schema, destination: &Query) -> Schema {
    let Ok(scope) = Scope::new(destination, schema) else {
        return Schema::default();
    };
    let all = scope.entries.len();
    let mut whole: Vec<usize> = Vec::new();
    let mut used: Vec<(usize, Ident)> = Vec::new();
    for (_, e) in destination.expressions() {
        match e {
            Expr::Asterisk { qualifier: None } => whole.extend(0..all),
            Expr::Asterisk { qualifier: Some(q) } => whole.extend(scope.element(q, all)),
            Expr::Column { qualifier, name } => {
                if let Resolution::Column(b) = scope.resolve(qualifier.as_ref(), name, all) {
                    used.push(b);
                }
            }
            _ => {}
        }
    }

    let mut tables = Vec::new();
    for table in schema.tables() {
        let elements: Vec<usize> = (0..all)
            .filter(|&i| scope.entries[i].1.name() == table.name())
            .collect();
        if elements.is_empty() {
            continue;
        }
        let keep_all = elements.iter().any(|i| whole.contains(i));
        let columns: Vec<&str> = table
            .columns()
            .iter()
            .filter(|c| keep_all || used.iter().any(|(i, u)| elements.contains(i) && u == *c))
            .map(|c| c.as_ref())
            .collect();
        let key: Vec<&str> = if table.primary_key().iter().all(|k| columns.contains(&k.as_ref())) {
            table.primary_key().iter().map(|k| k.as_ref()).collect()
        } else {
            Vec::new()
        };
        tables.push(Table::new(table.name(), columns, key).expect("subset of a valid table"));
    }
    Schema::new(tables).expect("subset of a valid schema")
}
