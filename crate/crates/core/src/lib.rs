//! Edit distance between SQL queries, measured as the cheapest sequence of
//! small AST edits that turns one query into another.
//!
//! ```
//! use sqldist::{parse_query, parse_schema, shortest_distance, SearchOptions};
//!
//! let schema = parse_schema("students(id, name, age)").unwrap();
//! let start = parse_query("SELECT id FROM students").unwrap();
//! let destination = parse_query("SELECT DISTINCT name FROM students").unwrap();
//! let options = SearchOptions::new().start(start).schema(schema);
//! let result = shortest_distance(&destination, &options).unwrap();
//! assert_eq!(result.distance, Some(3));
//! ```

pub mod ast;
pub mod edits;
pub mod grading;
pub mod meta;
pub mod oracle;
pub mod parser;
pub mod schema;
pub mod search;

/// Edit and path costs. Costs are integers so the search can bucket them.
pub type Cost = u32;

/// Points awarded by the default grading configuration.
pub type Points = f64;

pub use ast::{Clause, Expr, Query};
pub use edits::{apply_edit, default_edit_set, Edit, EditCategory, EditSet};
pub use grading::{build_report, grade, FeedbackReport, GradingConfig};
pub use meta::{build_meta_info, MetaInfo};
pub use parser::{parse_query, parse_schema, ParseError};
pub use schema::{check_executable, deduce_schema, Schema};
pub use search::{difficulty, progress, shortest_distance, SearchOptions, SearchResult, SearchStatus};
