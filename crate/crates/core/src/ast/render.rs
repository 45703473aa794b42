use super::{Direction, Expr, JoinKind, Literal, Query, Slot};

const NOT_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 7;

impl Query {
    /// One line per clause. Holes render as `_`; clauses that are absent or
    /// empty are omitted, except SELECT which is always present.
    pub fn render(&self) -> String {
        self.render_lines().join("\n")
    }

    /// Same as [`Query::render`] with the clauses joined by single spaces.
    pub fn render_inline(&self) -> String {
        self.render_lines().join(" ")
    }

    fn render_lines(&self) -> Vec<String> {
        let mut lines = Vec::new();

        let mut select = String::from("SELECT");
        if self.distinct {
            select.push_str(" DISTINCT");
        }
        let elements: Vec<String> = self
            .select
            .iter()
            .map(|s| match &s.alias {
                Some(alias) => format!("{} AS {alias}", slot_to_string(&s.expr)),
                None => slot_to_string(&s.expr),
            })
            .collect();
        if !elements.is_empty() {
            select.push(' ');
            select.push_str(&elements.join(", "));
        }
        lines.push(select);

        if !self.from.is_empty() {
            let mut from = String::from("FROM ");
            for (i, f) in self.from.iter().enumerate() {
                match f.join {
                    None if i == 0 => {}
                    None | Some(JoinKind::Cross) => from.push_str(", "),
                    Some(kind) => {
                        from.push(' ');
                        from.push_str(kind.keyword());
                        from.push(' ');
                    }
                }
                from.push_str(&f.table);
                if let Some(alias) = &f.alias {
                    from.push_str(" AS ");
                    from.push_str(alias);
                }
                if f.has_condition_slot() {
                    from.push_str(" ON ");
                    from.push_str(&slot_to_string(&f.condition));
                }
            }
            lines.push(from);
        }

        if let Some(e) = &self.where_clause {
            lines.push(format!("WHERE {}", expr_to_string(e)));
        }
        if !self.group_by.is_empty() {
            let items: Vec<String> = self.group_by.iter().map(slot_to_string).collect();
            lines.push(format!("GROUP BY {}", items.join(", ")));
        }
        if let Some(e) = &self.having {
            lines.push(format!("HAVING {}", expr_to_string(e)));
        }
        if !self.order_by.is_empty() {
            let items: Vec<String> = self
                .order_by
                .iter()
                .map(|o| match o.direction {
                    Direction::Asc => slot_to_string(&o.expr),
                    Direction::Desc => format!("{} DESC", slot_to_string(&o.expr)),
                })
                .collect();
            lines.push(format!("ORDER BY {}", items.join(", ")));
        }
        lines
    }
}

pub(crate) fn slot_to_string(slot: &Slot) -> String {
    slot.as_deref().map_or_else(|| "_".to_owned(), expr_to_string)
}

pub(crate) fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn precedence(slot: &Slot) -> u8 {
    match slot.as_deref() {
        Some(Expr::Binary { op, .. }) => op.precedence(),
        Some(Expr::Not(_)) => NOT_PRECEDENCE,
        _ => ATOM_PRECEDENCE,
    }
}

fn write_slot(slot: &Slot, parenthesize: bool, out: &mut String) {
    if parenthesize {
        out.push('(');
    }
    match slot {
        Some(e) => write_expr(e, out),
        None => out.push('_'),
    }
    if parenthesize {
        out.push(')');
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Asterisk { qualifier } => {
            if let Some(q) = qualifier {
                out.push_str(q);
                out.push('.');
            }
            out.push('*');
        }
        Expr::Column { qualifier, name } => {
            if let Some(q) = qualifier {
                out.push_str(q);
                out.push('.');
            }
            out.push_str(name);
        }
        Expr::Constant(Literal::Integer(i)) => out.push_str(&i.to_string()),
        Expr::Constant(Literal::Text(s)) => {
            out.push('\'');
            out.push_str(&s.replace('\'', "''"));
            out.push('\'');
        }
        Expr::Not(inner) => {
            out.push_str("NOT ");
            write_slot(inner, precedence(inner) < NOT_PRECEDENCE, out);
        }
        Expr::Aggregate {
            kind,
            distinct,
            inner,
        } => {
            out.push_str(kind.keyword());
            out.push('(');
            if *distinct {
                out.push_str("DISTINCT ");
            }
            write_slot(inner, false, out);
            out.push(')');
        }
        Expr::Binary { op, left, right } => {
            let p = op.precedence();
            let lp = precedence(left);
            write_slot(left, lp < p || (op.is_comparison() && lp == p), out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_slot(right, precedence(right) <= p, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::ast::{AggregateKind, Expr, FromElement, Query, SelectElement};

    #[test]
    fn empty_query_golden() {
        assert_eq!(Query::empty().render(), "SELECT");
    }

    #[test]
    fn hole_renders_as_underscore() {
        let q = Query::new(
            false,
            vec![SelectElement::new(
                Expr::aggregate(AggregateKind::Avg, false, None).slot(),
                None,
            )],
            vec![FromElement::table("students", None)],
            None,
            vec![],
            None,
            vec![],
        );
        assert_eq!(q.render(), "SELECT AVG(_)\nFROM students");
        assert_eq!(q.render_inline(), "SELECT AVG(_) FROM students");
    }

    #[test]
    fn text_constants_escape_quotes() {
        assert_eq!(Expr::text("it's").to_string(), "'it''s'");
    }
}
