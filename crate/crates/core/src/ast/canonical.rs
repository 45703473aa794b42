use std::collections::HashMap;
use std::sync::Arc;

use super::{Expr, Ident, Query, Slot};

impl Query {
    /// Renames FROM aliases positionally (`a1`, `a2`, ...) and re-qualifies
    /// references to them. Whether an element has an alias is kept.
    pub fn canonical(&self) -> Query {
        let mut renames: HashMap<Ident, Ident> = HashMap::new();
        let mut next = 1;
        for f in &self.from {
            if let Some(alias) = &f.alias {
                renames
                    .entry(alias.clone())
                    .or_insert_with(|| Arc::from(format!("a{next}")));
                next += 1;
            }
        }
        if renames.is_empty() {
            return self.clone();
        }
        if renames.iter().all(|(k, v)| k == v) {
            return self.clone();
        }

        let mut q = self.requalified(&renames);
        for f in &mut q.from {
            if let Some(alias) = &f.alias {
                f.alias = renames.get(alias).cloned();
            }
        }
        q
    }

    /// Rewrites every column and asterisk qualifier found in `renames`.
    /// FROM aliases themselves are left alone.
    pub(crate) fn requalified(&self, renames: &HashMap<Ident, Ident>) -> Query {
        let mut q = self.clone();
        for f in &mut q.from {
            f.condition = rename_slot(&f.condition, renames);
        }
        for s in &mut q.select {
            s.expr = rename_slot(&s.expr, renames);
        }
        q.where_clause = rename_slot(&q.where_clause, renames);
        for g in &mut q.group_by {
            *g = rename_slot(g, renames);
        }
        q.having = rename_slot(&q.having, renames);
        for o in &mut q.order_by {
            o.expr = rename_slot(&o.expr, renames);
        }
        q
    }

    /// Equality after alias canonicalization on both sides.
    pub fn equals_canonical(&self, other: &Query) -> bool {
        self == other || self.canonical() == other.canonical()
    }
}

fn rename_slot(slot: &Slot, renames: &HashMap<Ident, Ident>) -> Slot {
    slot.as_ref().map(|e| rename_expr(e, renames))
}

fn rename_expr(e: &Arc<Expr>, renames: &HashMap<Ident, Ident>) -> Arc<Expr> {
    let requalify = |q: &Option<Ident>| q.as_ref().map(|q| renames.get(q).unwrap_or(q).clone());
    match &**e {
        Expr::Column { qualifier, name } if qualifier.is_some() => Arc::new(Expr::Column {
            qualifier: requalify(qualifier),
            name: name.clone(),
        }),
        Expr::Asterisk { qualifier } if qualifier.is_some() => Arc::new(Expr::Asterisk {
            qualifier: requalify(qualifier),
        }),
        Expr::Column { .. } | Expr::Asterisk { .. } | Expr::Constant(_) => e.clone(),
        other => {
            let mut out = other.clone();
            for (i, child) in other.children().enumerate() {
                out = out.with_child(i, rename_slot(child, renames));
            }
            Arc::new(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::ast::{FromElement, Query, SelectElement, Expr};

    fn q(qualifier: Option<&str>, alias: Option<&str>) -> Query {
        Query::new(
            false,
            vec![SelectElement::new(Expr::column(qualifier, "id").slot(), None)],
            vec![FromElement::table("students", alias)],
            None,
            vec![],
            None,
            vec![],
        )
    }

    #[test]
    fn alias_spelling_is_irrelevant() {
        assert!(q(Some("s"), Some("s")).equals_canonical(&q(Some("stud"), Some("stud"))));
    }

    #[test]
    fn alias_presence_is_relevant() {
        assert!(!q(None, None).equals_canonical(&q(Some("s"), Some("s"))));
    }

    #[test]
    fn canonical_is_idempotent() {
        let c = q(Some("s"), Some("s")).canonical();
        assert_eq!(c.canonical(), c);
        assert_eq!(c.from()[0].alias.as_deref(), Some("a1"));
    }
}
