//! Immutable AST for the supported SELECT subset.
//!
//! Every expression slot is an `Option<Arc<Expr>>`; `None` is a hole (rendered
//! `_`). Subtrees are shared through `Arc`, so cloning a [`Query`] and changing
//! one clause only copies the path to the change.

mod canonical;
mod hash;
mod render;
mod replace;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use hash::{HashValue, Hashable};

/// Table, column and alias names. Case is preserved.
pub type Ident = Arc<str>;

/// An expression position that may be empty.
pub type Slot = Option<Arc<Expr>>;

pub fn ident(s: &str) -> Ident {
    Arc::from(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Literal {
    Integer(i64),
    Text(Arc<str>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AggregateKind {
    Count,
    Sum,
    Avg,
    Min,
    Max,
}

impl AggregateKind {
    pub const ALL: [AggregateKind; 5] = [Self::Count, Self::Sum, Self::Avg, Self::Min, Self::Max];

    pub fn keyword(self) -> &'static str {
        match self {
            Self::Count => "COUNT",
            Self::Sum => "SUM",
            Self::Avg => "AVG",
            Self::Min => "MIN",
            Self::Max => "MAX",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.keyword().eq_ignore_ascii_case(word))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinaryOp {
    Eq,
    NotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
    And,
    Or,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 12] = [
        Self::Eq,
        Self::NotEq,
        Self::Lt,
        Self::LtEq,
        Self::Gt,
        Self::GtEq,
        Self::And,
        Self::Or,
        Self::Add,
        Self::Sub,
        Self::Mul,
        Self::Div,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Eq => "=",
            Self::NotEq => "<>",
            Self::Lt => "<",
            Self::LtEq => "<=",
            Self::Gt => ">",
            Self::GtEq => ">=",
            Self::And => "AND",
            Self::Or => "OR",
            Self::Add => "+",
            Self::Sub => "-",
            Self::Mul => "*",
            Self::Div => "/",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            Self::Eq | Self::NotEq | Self::Lt | Self::LtEq | Self::Gt | Self::GtEq
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, Self::And | Self::Or)
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, Self::Add | Self::Sub | Self::Mul | Self::Div)
    }

    /// The operator that gives the same result with swapped operands
    /// (`a < b` is `b > a`), if there is one.
    pub fn mirrored(self) -> Option<BinaryOp> {
        Some(match self {
            Self::Eq => Self::Eq,
            Self::NotEq => Self::NotEq,
            Self::Lt => Self::Gt,
            Self::LtEq => Self::GtEq,
            Self::Gt => Self::Lt,
            Self::GtEq => Self::LtEq,
            Self::And => Self::And,
            Self::Or => Self::Or,
            Self::Add => Self::Add,
            Self::Mul => Self::Mul,
            Self::Sub | Self::Div => return None,
        })
    }

    /// Comparison with the complementary truth value (`a < b` vs `a >= b`).
    pub fn negated(self) -> Option<BinaryOp> {
        Some(match self {
            Self::Eq => Self::NotEq,
            Self::NotEq => Self::Eq,
            Self::Lt => Self::GtEq,
            Self::LtEq => Self::Gt,
            Self::Gt => Self::LtEq,
            Self::GtEq => Self::Lt,
            _ => return None,
        })
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            Self::Or => 1,
            Self::And => 2,
            Self::Eq | Self::NotEq | Self::Lt | Self::LtEq | Self::Gt | Self::GtEq => 4,
            Self::Add | Self::Sub => 5,
            Self::Mul | Self::Div => 6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JoinKind {
    Inner,
    LeftOuter,
    RightOuter,
    FullOuter,
    /// Comma join; never carries a condition.
    Cross,
}

impl JoinKind {
    pub const CONDITIONAL: [JoinKind; 4] =
        [Self::Inner, Self::LeftOuter, Self::RightOuter, Self::FullOuter];

    pub fn has_condition(self) -> bool {
        self != Self::Cross
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Self::Inner => "INNER JOIN",
            Self::LeftOuter => "LEFT OUTER JOIN",
            Self::RightOuter => "RIGHT OUTER JOIN",
            Self::FullOuter => "FULL OUTER JOIN",
            Self::Cross => ",",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[default]
    Asc,
    Desc,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Asterisk {
        qualifier: Option<Ident>,
    },
    Column {
        qualifier: Option<Ident>,
        name: Ident,
    },
    Constant(Literal),
    Not(Slot),
    Aggregate {
        kind: AggregateKind,
        distinct: bool,
        inner: Slot,
    },
    Binary {
        op: BinaryOp,
        left: Slot,
        right: Slot,
    },
}

impl Expr {
    pub fn column(qualifier: Option<&str>, name: &str) -> Expr {
        Expr::Column {
            qualifier: qualifier.map(ident),
            name: ident(name),
        }
    }

    pub fn asterisk(qualifier: Option<&str>) -> Expr {
        Expr::Asterisk {
            qualifier: qualifier.map(ident),
        }
    }

    pub fn integer(value: i64) -> Expr {
        Expr::Constant(Literal::Integer(value))
    }

    pub fn text(value: &str) -> Expr {
        Expr::Constant(Literal::Text(Arc::from(value)))
    }

    pub fn not(inner: Slot) -> Expr {
        Expr::Not(inner)
    }

    pub fn aggregate(kind: AggregateKind, distinct: bool, inner: Slot) -> Expr {
        Expr::Aggregate {
            kind,
            distinct,
            inner,
        }
    }

    pub fn binary(op: BinaryOp, left: Slot, right: Slot) -> Expr {
        Expr::Binary { op, left, right }
    }

    pub fn slot(self) -> Slot {
        Some(Arc::new(self))
    }

    pub fn kind(&self) -> ComponentKind {
        match self {
            Expr::Asterisk { .. } => ComponentKind::Asterisk,
            Expr::Column { .. } => ComponentKind::ColumnReference,
            Expr::Constant(_) => ComponentKind::Constant,
            Expr::Not(_) => ComponentKind::Not,
            Expr::Aggregate { .. } => ComponentKind::Aggregation,
            Expr::Binary { .. } => ComponentKind::BinaryExpression,
        }
    }

    /// Child slots, left to right.
    pub fn children(&self) -> impl Iterator<Item = &Slot> {
        let pair = match self {
            Expr::Not(inner) | Expr::Aggregate { inner, .. } => [Some(inner), None],
            Expr::Binary { left, right, .. } => [Some(left), Some(right)],
            _ => [None, None],
        };
        pair.into_iter().flatten()
    }

    /// Rebuilds this node with the child at `index` replaced.
    pub(crate) fn with_child(&self, index: usize, child: Slot) -> Expr {
        match (self, index) {
            (Expr::Not(_), 0) => Expr::Not(child),
            (
                Expr::Aggregate {
                    kind, distinct, ..
                },
                0,
            ) => Expr::Aggregate {
                kind: *kind,
                distinct: *distinct,
                inner: child,
            },
            (Expr::Binary { op, right, .. }, 0) => Expr::Binary {
                op: *op,
                left: child,
                right: right.clone(),
            },
            (Expr::Binary { op, left, .. }, 1) => Expr::Binary {
                op: *op,
                left: left.clone(),
                right: child,
            },
            _ => panic!("expression has no child {index}"),
        }
    }

    /// Visits every node of the tree rooted here, pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for child in self.children().flatten() {
            child.walk(f);
        }
    }

    pub fn contains_aggregate(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e, Expr::Aggregate { .. }));
        found
    }

    pub fn has_hole(&self) -> bool {
        match self {
            Expr::Not(inner) | Expr::Aggregate { inner, .. } => {
                inner.as_ref().is_none_or(|e| e.has_hole())
            }
            Expr::Binary { left, right, .. } => {
                left.as_ref().is_none_or(|e| e.has_hole())
                    || right.as_ref().is_none_or(|e| e.has_hole())
            }
            _ => false,
        }
    }

    /// Number of nodes; holes do not count.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Height of the tree: a leaf has height 0.
    pub fn height(&self) -> usize {
        self.children()
            .flatten()
            .map(|c| c.height() + 1)
            .max()
            .unwrap_or(0)
    }
}

/// Height of a slot. An empty slot has height 0, like a leaf.
pub fn slot_height(slot: &Slot) -> usize {
    slot.as_ref().map_or(0, |e| e.height())
}

/// The kinds of expression components, used for per-kind limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ComponentKind {
    ColumnReference,
    Aggregation,
    BinaryExpression,
    Not,
    Constant,
    Asterisk,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 6] = [
        Self::ColumnReference,
        Self::Aggregation,
        Self::BinaryExpression,
        Self::Not,
        Self::Constant,
        Self::Asterisk,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Query locations that hold expressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Clause {
    Select,
    Where,
    GroupBy,
    Having,
    OrderBy,
    JoinCondition,
}

impl Clause {
    pub const ALL: [Clause; 6] = [
        Self::Select,
        Self::Where,
        Self::GroupBy,
        Self::Having,
        Self::OrderBy,
        Self::JoinCondition,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Name fragment used in edit names, e.g. `addHavingAggregationFunction`.
    pub fn label(self) -> &'static str {
        match self {
            Self::Select => "Select",
            Self::Where => "Where",
            Self::GroupBy => "GroupBy",
            Self::Having => "Having",
            Self::OrderBy => "OrderBy",
            Self::JoinCondition => "JoinCondition",
        }
    }

    pub fn phrase(self) -> &'static str {
        match self {
            Self::Select => "select-clause",
            Self::Where => "where-clause",
            Self::GroupBy => "group-by-clause",
            Self::Having => "having-clause",
            Self::OrderBy => "order-by-clause",
            Self::JoinCondition => "join condition",
        }
    }

    /// Whether aggregation functions may appear in an executable query here.
    pub fn allows_aggregation(self) -> bool {
        matches!(self, Self::Select | Self::Having | Self::OrderBy)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SelectElement {
    pub expr: Slot,
    pub alias: Option<Ident>,
}

impl SelectElement {
    pub fn new(expr: Slot, alias: Option<&str>) -> Self {
        SelectElement {
            expr,
            alias: alias.map(ident),
        }
    }

    pub fn hole() -> Self {
        Self::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FromElement {
    pub table: Ident,
    pub alias: Option<Ident>,
    /// `None` exactly for the first element of the FROM list.
    pub join: Option<JoinKind>,
    /// Only meaningful for conditional joins; `None` there is a hole.
    pub condition: Slot,
}

impl FromElement {
    pub fn table(table: &str, alias: Option<&str>) -> Self {
        FromElement {
            table: ident(table),
            alias: alias.map(ident),
            join: None,
            condition: None,
        }
    }

    pub fn joined(mut self, kind: JoinKind, condition: Slot) -> Self {
        self.join = Some(kind);
        self.condition = if kind.has_condition() { condition } else { None };
        self
    }

    /// The name under which columns of this element are qualified.
    pub fn exposed_name(&self) -> &Ident {
        self.alias.as_ref().unwrap_or(&self.table)
    }

    pub fn has_condition_slot(&self) -> bool {
        self.join.is_some_and(JoinKind::has_condition)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OrderByElement {
    pub expr: Slot,
    pub direction: Direction,
}

impl OrderByElement {
    pub fn new(expr: Slot, direction: Direction) -> Self {
        OrderByElement { expr, direction }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AstError {
    #[error("index {index} out of bounds for {list} of length {len}")]
    IndexOutOfBounds {
        list: &'static str,
        index: usize,
        len: usize,
    },
}

/// A possibly incomplete SELECT query. Values never change after
/// construction; every `set_*`, `insert_*` and `remove_*` returns a new query.
///
/// `PartialEq` is plain structural equality. Use [`Query::equals_canonical`]
/// to compare modulo FROM alias spelling.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Query {
    distinct: bool,
    select: Vec<SelectElement>,
    from: Vec<FromElement>,
    where_clause: Slot,
    group_by: Vec<Slot>,
    having: Slot,
    order_by: Vec<OrderByElement>,
}

macro_rules! list_ops {
    ($list:ident, $elem:ty, $name:literal, $insert:ident, $remove:ident, $replace:ident) => {
        pub fn $insert(&self, index: usize, element: $elem) -> Result<Query, AstError> {
            check_index($name, index, self.$list.len() + 1, self.$list.len())?;
            let mut q = self.clone();
            q.$list.insert(index, element);
            Ok(q.normalized())
        }

        pub fn $remove(&self, index: usize) -> Result<Query, AstError> {
            check_index($name, index, self.$list.len(), self.$list.len())?;
            let mut q = self.clone();
            q.$list.remove(index);
            Ok(q.normalized())
        }

        pub fn $replace(&self, index: usize, element: $elem) -> Result<Query, AstError> {
            check_index($name, index, self.$list.len(), self.$list.len())?;
            let mut q = self.clone();
            q.$list[index] = element;
            Ok(q.normalized())
        }
    };
}

fn check_index(list: &'static str, index: usize, bound: usize, len: usize) -> Result<(), AstError> {
    if index < bound {
        Ok(())
    } else {
        Err(AstError::IndexOutOfBounds { list, index, len })
    }
}

impl Query {
    /// The fully incomplete query.
    pub fn empty() -> Query {
        Query::default()
    }

    pub fn new(
        distinct: bool,
        select: Vec<SelectElement>,
        from: Vec<FromElement>,
        where_clause: Slot,
        group_by: Vec<Slot>,
        having: Slot,
        order_by: Vec<OrderByElement>,
    ) -> Query {
        Query {
            distinct,
            select,
            from,
            where_clause,
            group_by,
            having,
            order_by,
        }
        .normalized()
    }

    /// Enforces the FROM-list shape: the first element carries no join, every
    /// later one does, and only conditional joins keep a condition.
    fn normalized(mut self) -> Query {
        for (i, f) in self.from.iter_mut().enumerate() {
            if i == 0 {
                f.join = None;
                f.condition = None;
            } else {
                let kind = *f.join.get_or_insert(JoinKind::Cross);
                if !kind.has_condition() {
                    f.condition = None;
                }
            }
        }
        self
    }

    pub fn is_empty(&self) -> bool {
        *self == Query::empty()
    }

    pub fn distinct(&self) -> bool {
        self.distinct
    }

    pub fn select(&self) -> &[SelectElement] {
        &self.select
    }

    pub fn from(&self) -> &[FromElement] {
        &self.from
    }

    pub fn where_clause(&self) -> &Slot {
        &self.where_clause
    }

    pub fn group_by(&self) -> &[Slot] {
        &self.group_by
    }

    pub fn having(&self) -> &Slot {
        &self.having
    }

    pub fn order_by(&self) -> &[OrderByElement] {
        &self.order_by
    }

    pub fn set_distinct(&self, distinct: bool) -> Query {
        Query {
            distinct,
            ..self.clone()
        }
    }

    pub fn set_where(&self, expr: Slot) -> Query {
        Query {
            where_clause: expr,
            ..self.clone()
        }
    }

    pub fn set_having(&self, expr: Slot) -> Query {
        Query {
            having: expr,
            ..self.clone()
        }
    }

    pub fn set_select(&self, select: Vec<SelectElement>) -> Query {
        Query {
            select,
            ..self.clone()
        }
    }

    pub fn set_from(&self, from: Vec<FromElement>) -> Query {
        Query {
            from,
            ..self.clone()
        }
        .normalized()
    }

    pub fn set_group_by(&self, group_by: Vec<Slot>) -> Query {
        Query {
            group_by,
            ..self.clone()
        }
    }

    pub fn set_order_by(&self, order_by: Vec<OrderByElement>) -> Query {
        Query {
            order_by,
            ..self.clone()
        }
    }

    list_ops!(
        select,
        SelectElement,
        "select list",
        insert_select_element,
        remove_select_element,
        replace_select_element
    );
    list_ops!(
        from,
        FromElement,
        "from list",
        insert_from_element,
        remove_from_element,
        replace_from_element
    );
    list_ops!(
        group_by,
        Slot,
        "group-by list",
        insert_group_by_element,
        remove_group_by_element,
        replace_group_by_element
    );
    list_ops!(
        order_by,
        OrderByElement,
        "order-by list",
        insert_order_by_element,
        remove_order_by_element,
        replace_order_by_element
    );

    /// Number of expression slots in `clause`, holes included.
    pub fn slot_count(&self, clause: Clause) -> usize {
        self.clause_slots(clause).len()
    }

    /// The expression slots of a clause in document order.
    pub fn clause_slots(&self, clause: Clause) -> Vec<&Slot> {
        match clause {
            Clause::Select => self.select.iter().map(|s| &s.expr).collect(),
            Clause::Where => vec![&self.where_clause],
            Clause::GroupBy => self.group_by.iter().collect(),
            Clause::Having => vec![&self.having],
            Clause::OrderBy => self.order_by.iter().map(|o| &o.expr).collect(),
            Clause::JoinCondition => self
                .from
                .iter()
                .filter(|f| f.has_condition_slot())
                .map(|f| &f.condition)
                .collect(),
        }
    }

    /// Replaces the `index`-th slot of `clause` (same order as
    /// [`Query::clause_slots`]).
    pub fn with_clause_slot(&self, clause: Clause, index: usize, slot: Slot) -> Query {
        let mut q = self.clone();
        match clause {
            Clause::Select => q.select[index].expr = slot,
            Clause::Where => q.where_clause = slot,
            Clause::GroupBy => q.group_by[index] = slot,
            Clause::Having => q.having = slot,
            Clause::OrderBy => q.order_by[index].expr = slot,
            Clause::JoinCondition => {
                let f = q
                    .from
                    .iter_mut()
                    .filter(|f| f.has_condition_slot())
                    .nth(index)
                    .expect("join condition index in range");
                f.condition = slot;
            }
        }
        q
    }

    /// Every expression node in the query, with the clause it sits in.
    pub fn expressions(&self) -> Vec<(Clause, &Expr)> {
        let mut out = Vec::new();
        for clause in Clause::ALL {
            for e in self.clause_slots(clause).into_iter().flatten() {
                e.walk(&mut |n| out.push((clause, n)));
            }
        }
        out
    }

    /// Whether the query has a hole anywhere, including an empty
    /// SELECT or FROM list.
    pub fn has_hole(&self) -> bool {
        if self.select.is_empty() || self.from.is_empty() {
            return true;
        }
        let slot_hole = |s: &Slot| s.as_ref().is_none_or(|e| e.has_hole());
        let opt_hole = |s: &Slot| s.as_ref().is_some_and(|e| e.has_hole());
        self.select.iter().any(|s| slot_hole(&s.expr))
            || self.from.iter().any(|f| f.has_condition_slot() && slot_hole(&f.condition))
            || opt_hole(&self.where_clause)
            || self.group_by.iter().any(slot_hole)
            || opt_hole(&self.having)
            || self.order_by.iter().any(|o| slot_hole(&o.expr))
    }

    /// Count of components and set attributes. Each atomic remove or unset
    /// edit lowers it by at least one.
    pub fn component_count(&self) -> usize {
        let mut n = usize::from(self.distinct);
        n += self.select.len() + self.select.iter().filter(|s| s.alias.is_some()).count();
        for f in &self.from {
            n += 1 + usize::from(f.alias.is_some());
            n += usize::from(f.join.is_some_and(JoinKind::has_condition));
        }
        n += self.group_by.len() + self.order_by.len();
        n += self
            .order_by
            .iter()
            .filter(|o| o.direction == Direction::Desc)
            .count();
        for (_, e) in self.expressions() {
            n += 1;
            n += match e {
                Expr::Column { qualifier, .. } | Expr::Asterisk { qualifier } => {
                    usize::from(qualifier.is_some())
                }
                Expr::Aggregate { distinct, .. } => usize::from(*distinct),
                _ => 0,
            };
        }
        n
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::expr_to_string(self))
    }
}
