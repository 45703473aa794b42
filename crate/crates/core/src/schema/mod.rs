//! Database schema model plus the checks and derivations that depend on it.

mod check;
mod deduce;

use std::fmt;

use thiserror::Error;

use crate::ast::{ident, FromElement, Ident};

pub use check::{check_executable, ExecutabilityError, ExecutabilityCategory};
pub(crate) use check::{Resolution, Scope};
pub use deduce::{deduce_schema, restrict_schema, DeductionError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("duplicate table '{0}'")]
    DuplicateTable(String),
    #[error("duplicate column '{column}' in table '{table}'")]
    DuplicateColumn { table: String, column: String },
    #[error("primary-key column '{column}' is not a column of '{table}'")]
    UnknownKeyColumn { table: String, column: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Table {
    name: Ident,
    columns: Vec<Ident>,
    primary_key: Vec<Ident>,
}

impl Table {
    pub fn new<S: AsRef<str>>(
        name: &str,
        columns: impl IntoIterator<Item = S>,
        primary_key: impl IntoIterator<Item = S>,
    ) -> Result<Table, SchemaError> {
        let columns: Vec<Ident> = columns.into_iter().map(|c| ident(c.as_ref())).collect();
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].contains(c) {
                return Err(SchemaError::DuplicateColumn {
                    table: name.to_owned(),
                    column: c.to_string(),
                });
            }
        }
        let primary_key: Vec<Ident> = primary_key.into_iter().map(|c| ident(c.as_ref())).collect();
        if let Some(missing) = primary_key.iter().find(|k| !columns.contains(k)) {
            return Err(SchemaError::UnknownKeyColumn {
                table: name.to_owned(),
                column: missing.to_string(),
            });
        }
        Ok(Table {
            name: ident(name),
            columns,
            primary_key,
        })
    }

    pub fn name(&self) -> &Ident {
        &self.name
    }

    pub fn columns(&self) -> &[Ident] {
        &self.columns
    }

    pub fn primary_key(&self) -> &[Ident] {
        &self.primary_key
    }

    pub fn has_column(&self, column: &str) -> bool {
        self.columns.iter().any(|c| c.as_ref() == column)
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self
            .columns
            .iter()
            .map(|c| {
                if self.primary_key.contains(c) {
                    format!("*{c}")
                } else {
                    c.to_string()
                }
            })
            .collect();
        write!(f, "{}({})", self.name, cols.join(", "))
    }
}

/// Ordered set of tables with unique names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Schema {
    tables: Vec<Table>,
}

impl Schema {
    pub fn new(tables: Vec<Table>) -> Result<Schema, SchemaError> {
        for (i, t) in tables.iter().enumerate() {
            if tables[..i].iter().any(|o| o.name == t.name) {
                return Err(SchemaError::DuplicateTable(t.name.to_string()));
            }
        }
        Ok(Schema { tables })
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name.as_ref() == name)
    }

    /// Whether every table and column here also exists in `other`.
    pub fn is_subschema_of(&self, other: &Schema) -> bool {
        self.tables.iter().all(|t| {
            other
                .table(&t.name)
                .is_some_and(|o| t.columns.iter().all(|c| o.has_column(c)))
        })
    }

    pub(crate) fn table_of(&self, element: &FromElement) -> Option<&Table> {
        self.table(&element.table)
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_rejected() {
        assert!(Table::new("t", ["a", "a"], []).is_err());
        assert!(Table::new("t", ["a"], ["b"]).is_err());
        let t = Table::new("t", ["a"], []).unwrap();
        assert!(Schema::new(vec![t.clone(), t]).is_err());
    }

    #[test]
    fn subschema() {
        let full = Schema::new(vec![Table::new("t", ["a", "b"], []).unwrap()]).unwrap();
        let part = Schema::new(vec![Table::new("t", ["b"], []).unwrap()]).unwrap();
        assert!(part.is_subschema_of(&full));
        assert!(!full.is_subschema_of(&part));
    }
}
