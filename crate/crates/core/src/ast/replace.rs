use std::sync::Arc;

use super::{Clause, Expr, Query, Slot};

impl Query {
    /// Applies `multimap` at every expression position of `clause` whose
    /// depth is at most `max_depth` and returns one query per replacement.
    ///
    /// The multimap receives the current subexpression (`None` for a hole)
    /// and its ancestors, outermost first; the depth of a position is the
    /// length of that stack.
    pub fn recursively_replace<F>(&self, clause: Clause, max_depth: usize, mut multimap: F) -> Vec<Query>
    where
        F: FnMut(Option<&Arc<Expr>>, &[&Expr]) -> Vec<Slot>,
    {
        let slots: Vec<Slot> = self.clause_slots(clause).into_iter().cloned().collect();
        let mut out = Vec::new();
        for (i, slot) in slots.iter().enumerate() {
            let mut stack = Vec::new();
            for replacement in replace_in_slot(slot, max_depth, &mut stack, &mut multimap) {
                out.push(self.with_clause_slot(clause, i, replacement));
            }
        }
        out
    }

    pub fn recursively_replace_select<F>(&self, max_depth: usize, multimap: F) -> Vec<Query>
    where
        F: FnMut(Option<&Arc<Expr>>, &[&Expr]) -> Vec<Slot>,
    {
        self.recursively_replace(Clause::Select, max_depth, multimap)
    }

    pub fn recursively_replace_where<F>(&self, max_depth: usize, multimap: F) -> Vec<Query>
    where
        F: FnMut(Option<&Arc<Expr>>, &[&Expr]) -> Vec<Slot>,
    {
        self.recursively_replace(Clause::Where, max_depth, multimap)
    }

    pub fn recursively_replace_group_by<F>(&self, max_depth: usize, multimap: F) -> Vec<Query>
    where
        F: FnMut(Option<&Arc<Expr>>, &[&Expr]) -> Vec<Slot>,
    {
        self.recursively_replace(Clause::GroupBy, max_depth, multimap)
    }

    pub fn recursively_replace_having<F>(&self, max_depth: usize, multimap: F) -> Vec<Query>
    where
        F: FnMut(Option<&Arc<Expr>>, &[&Expr]) -> Vec<Slot>,
    {
        self.recursively_replace(Clause::Having, max_depth, multimap)
    }

    pub fn recursively_replace_order_by<F>(&self, max_depth: usize, multimap: F) -> Vec<Query>
    where
        F: FnMut(Option<&Arc<Expr>>, &[&Expr]) -> Vec<Slot>,
    {
        self.recursively_replace(Clause::OrderBy, max_depth, multimap)
    }

    pub fn recursively_replace_join_conditions<F>(&self, max_depth: usize, multimap: F) -> Vec<Query>
    where
        F: FnMut(Option<&Arc<Expr>>, &[&Expr]) -> Vec<Slot>,
    {
        self.recursively_replace(Clause::JoinCondition, max_depth, multimap)
    }
}

fn replace_in_slot<'a, F>(
    slot: &'a Slot,
    max_depth: usize,
    stack: &mut Vec<&'a Expr>,
    multimap: &mut F,
) -> Vec<Slot>
where
    F: FnMut(Option<&Arc<Expr>>, &[&Expr]) -> Vec<Slot>,
{
    if stack.len() > max_depth {
        return Vec::new();
    }
    let mut out = multimap(slot.as_ref(), stack);
    if let Some(expr) = slot {
        stack.push(expr);
        for (i, child) in expr.children().enumerate() {
            for replacement in replace_in_slot(child, max_depth, stack, multimap) {
                out.push(Some(Arc::new(expr.with_child(i, replacement))));
            }
        }
        stack.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{BinaryOp, FromElement};

    fn where_query(e: Slot) -> Query {
        Query::new(
            false,
            vec![],
            vec![FromElement::table("t", None)],
            e,
            vec![],
            None,
            vec![],
        )
    }

    #[test]
    fn vacuous_multimap_yields_nothing() {
        let q = where_query(Expr::column(None, "a").slot());
        assert!(q.recursively_replace_where(5, |_, _| vec![]).is_empty());
    }

    #[test]
    fn not_insertion_at_every_position() {
        let eq = Expr::binary(
            BinaryOp::Eq,
            Expr::column(None, "a").slot(),
            Expr::column(None, "b").slot(),
        );
        let q = where_query(eq.slot());
        let out = q.recursively_replace_where(2, |e, _| vec![Expr::not(e.cloned()).slot()]);
        let rendered: Vec<String> = out
            .iter()
            .map(|q| q.where_clause().as_ref().unwrap().to_string())
            .collect();
        assert_eq!(rendered, ["NOT a = b", "(NOT a) = b", "a = (NOT b)"]);
    }

    #[test]
    fn depth_limit_cuts_positions() {
        let eq = Expr::binary(
            BinaryOp::Eq,
            Expr::column(None, "a").slot(),
            Expr::column(None, "b").slot(),
        );
        let q = where_query(eq.slot());
        assert_eq!(q.recursively_replace_where(0, |e, _| vec![Expr::not(e.cloned()).slot()]).len(), 1);
    }

    #[test]
    fn stack_is_outermost_first() {
        let e = Expr::not(Expr::binary(BinaryOp::And, None, None).slot());
        let q = where_query(e.slot());
        let mut seen = Vec::new();
        q.recursively_replace_where(9, |cur, stack| {
            seen.push((cur.is_some(), stack.iter().map(|e| e.kind()).collect::<Vec<_>>()));
            vec![]
        });
        assert_eq!(seen.len(), 4);
        assert_eq!(seen[3].1.len(), 2);
        assert!(matches!(seen[3].1[0], crate::ast::ComponentKind::Not));
    }
}
