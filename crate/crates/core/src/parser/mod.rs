//! Recursive-descent parser for the supported SELECT subset.
//!
//! The parser accepts incomplete queries: `_` stands for a missing
//! expression anywhere one is expected, empty function arguments (`AVG( )`)
//! and dangling operators (`WHERE age >`) become holes, and every clause is
//! optional. Empty input is the empty query.

mod lexer;
mod schema;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ast::{
    ident, AggregateKind, BinaryOp, Direction, Expr, FromElement, JoinKind, Literal,
    OrderByElement, Query, SelectElement, Slot,
};
use lexer::{tokenize, Token, TokenKind};

pub use schema::parse_schema;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            position,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.position, self.message)
    }
}

const RESERVED: &[&str] = &[
    "SELECT", "DISTINCT", "FROM", "WHERE", "GROUP", "BY", "HAVING", "ORDER", "ASC", "DESC", "AS",
    "JOIN", "INNER", "LEFT", "RIGHT", "FULL", "OUTER", "CROSS", "ON", "AND", "OR", "NOT",
];

/// Words that end an expression or list, used for hole recovery.
const CLAUSE_WORDS: &[&str] = &[
    "FROM", "WHERE", "GROUP", "HAVING", "ORDER", "JOIN", "INNER", "LEFT", "RIGHT", "FULL",
    "CROSS", "ON",
];

pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    p.query()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, n: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.offset)
    }

    fn advance(&mut self) -> Option<TokenKind> {
        let t = self.tokens.get(self.pos).map(|t| t.kind.clone());
        self.pos += 1;
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(self.offset(), message))
    }

    fn is_word(&self, word: &str) -> bool {
        self.is_word_at(0, word)
    }

    fn is_word_at(&self, n: usize, word: &str) -> bool {
        matches!(self.peek_at(n), Some(TokenKind::Word(w)) if w.eq_ignore_ascii_case(word))
    }

    fn eat_word(&mut self, word: &str) -> bool {
        if self.is_word(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_word(&mut self, word: &str) -> Result<(), ParseError> {
        if self.eat_word(word) {
            Ok(())
        } else {
            self.error(format!("expected {word}"))
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_clause_end(&self) -> bool {
        match self.peek() {
            None | Some(TokenKind::Semicolon) => true,
            Some(TokenKind::Word(w)) => CLAUSE_WORDS.iter().any(|k| k.eq_ignore_ascii_case(w)),
            _ => false,
        }
    }

    /// A non-reserved word usable as a name.
    fn name(&mut self) -> Option<String> {
        match self.peek() {
            Some(TokenKind::Word(w))
                if w != "_" && !RESERVED.iter().any(|k| k.eq_ignore_ascii_case(w)) =>
            {
                let w = w.clone();
                self.pos += 1;
                Some(w)
            }
            _ => None,
        }
    }

    fn query(&mut self) -> Result<Query, ParseError> {
        let mut distinct = false;
        let mut select = Vec::new();
        let mut from = Vec::new();
        let mut where_clause = None;
        let mut group_by = Vec::new();
        let mut having = None;
        let mut order_by = Vec::new();

        if self.eat_word("SELECT") {
            distinct = self.eat_word("DISTINCT");
            if self.eat_word("ALL") {
                distinct = false;
            }
            select = self.select_list()?;
        }
        if self.eat_word("FROM") {
            from = self.parse_from_list()?;
        }
        if self.eat_word("WHERE") {
            where_clause = self.expr()?;
        }
        if self.eat_word("GROUP") {
            self.expect_word("BY")?;
            group_by = self.slot_list()?;
        }
        if self.eat_word("HAVING") {
            having = self.expr()?;
        }
        if self.eat_word("ORDER") {
            self.expect_word("BY")?;
            order_by = self.order_list()?;
        }
        self.eat(&TokenKind::Semicolon);
        if self.peek().is_some() {
            return self.error(format!("unexpected {}", describe(self.peek())));
        }
        Ok(Query::new(
            distinct,
            select,
            from,
            where_clause,
            group_by,
            having,
            order_by,
        ))
    }

    fn select_list(&mut self) -> Result<Vec<SelectElement>, ParseError> {
        let mut out = Vec::new();
        if self.at_clause_end() {
            return Ok(out);
        }
        loop {
            let expr = if self.is_word("AS") { None } else { self.expr()? };
            let alias = self.alias()?;
            out.push(SelectElement {
                expr,
                alias: alias.map(|a| ident(&a)),
            });
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        Ok(out)
    }

    fn alias(&mut self) -> Result<Option<String>, ParseError> {
        if self.eat_word("AS") {
            match self.name() {
                Some(n) => Ok(Some(n)),
                None => self.error("expected alias after AS"),
            }
        } else {
            Ok(self.name())
        }
    }

    fn parse_from_list(&mut self) -> Result<Vec<FromElement>, ParseError> {
        let mut out = Vec::new();
        if self.at_clause_end() && !self.is_word("JOIN") {
            return Ok(out);
        }
        out.push(self.table_ref()?);
        loop {
            if self.eat(&TokenKind::Comma) {
                out.push(self.table_ref()?.joined(JoinKind::Cross, None));
                continue;
            }
            let Some(kind) = self.join_keyword()? else {
                break;
            };
            let mut element = self.table_ref()?;
            let condition = if self.eat_word("ON") {
                if !kind.has_condition() {
                    return self.error("CROSS JOIN takes no ON condition");
                }
                self.expr()?
            } else {
                None
            };
            element = element.joined(kind, condition);
            out.push(element);
        }
        Ok(out)
    }

    fn join_keyword(&mut self) -> Result<Option<JoinKind>, ParseError> {
        let kind = if self.eat_word("JOIN") {
            return Ok(Some(JoinKind::Inner));
        } else if self.eat_word("INNER") {
            JoinKind::Inner
        } else if self.eat_word("CROSS") {
            JoinKind::Cross
        } else if self.eat_word("LEFT") {
            self.eat_word("OUTER");
            JoinKind::LeftOuter
        } else if self.eat_word("RIGHT") {
            self.eat_word("OUTER");
            JoinKind::RightOuter
        } else if self.eat_word("FULL") {
            self.eat_word("OUTER");
            JoinKind::FullOuter
        } else {
            return Ok(None);
        };
        self.expect_word("JOIN")?;
        Ok(Some(kind))
    }

    fn table_ref(&mut self) -> Result<FromElement, ParseError> {
        let Some(table) = self.name() else {
            return self.error("expected table name");
        };
        let alias = self.alias()?;
        Ok(FromElement::table(&table, alias.as_deref()))
    }

    fn slot_list(&mut self) -> Result<Vec<Slot>, ParseError> {
        let mut out = Vec::new();
        if self.at_clause_end() {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        Ok(out)
    }

    fn order_list(&mut self) -> Result<Vec<OrderByElement>, ParseError> {
        let mut out = Vec::new();
        if self.at_clause_end() {
            return Ok(out);
        }
        loop {
            let expr = self.expr()?;
            let direction = if self.eat_word("DESC") {
                Direction::Desc
            } else {
                self.eat_word("ASC");
                Direction::Asc
            };
            out.push(OrderByElement { expr, direction });
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<Slot, ParseError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Slot, ParseError> {
        let mut left = self.and_expr()?;
        while self.eat_word("OR") {
            let right = self.and_expr()?;
            left = Expr::binary(BinaryOp::Or, left, right).slot();
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Slot, ParseError> {
        let mut left = self.not_expr()?;
        while self.eat_word("AND") {
            let right = self.not_expr()?;
            left = Expr::binary(BinaryOp::And, left, right).slot();
        }
        Ok(left)
    }

    fn not_expr(&mut self) -> Result<Slot, ParseError> {
        if self.eat_word("NOT") {
            let inner = self.not_expr()?;
            return Ok(Expr::not(inner).slot());
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Slot, ParseError> {
        let left = self.additive()?;
        let op = match self.peek() {
            Some(TokenKind::Eq) => BinaryOp::Eq,
            Some(TokenKind::NotEq) => BinaryOp::NotEq,
            Some(TokenKind::Lt) => BinaryOp::Lt,
            Some(TokenKind::LtEq) => BinaryOp::LtEq,
            Some(TokenKind::Gt) => BinaryOp::Gt,
            Some(TokenKind::GtEq) => BinaryOp::GtEq,
            _ => return Ok(left),
        };
        self.pos += 1;
        let right = self.additive()?;
        Ok(Expr::binary(op, left, right).slot())
    }

    fn additive(&mut self) -> Result<Slot, ParseError> {
        let mut left = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Plus) => BinaryOp::Add,
                Some(TokenKind::Minus) => BinaryOp::Sub,
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.multiplicative()?;
            left = Expr::binary(op, left, right).slot();
        }
    }

    fn multiplicative(&mut self) -> Result<Slot, ParseError> {
        let mut left = self.primary()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Star) => BinaryOp::Mul,
                Some(TokenKind::Slash) => BinaryOp::Div,
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.primary()?;
            left = Expr::binary(op, left, right).slot();
        }
    }

    fn primary(&mut self) -> Result<Slot, ParseError> {
        match self.peek().cloned() {
            Some(TokenKind::Word(w)) if w == "_" => {
                self.pos += 1;
                Ok(None)
            }
            Some(TokenKind::Word(w)) if w.eq_ignore_ascii_case("NOT") => {
                self.pos += 1;
                let inner = self.not_expr()?;
                Ok(Expr::not(inner).slot())
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(&TokenKind::RParen) {
                    return self.error("expected ')'");
                }
                Ok(inner)
            }
            Some(TokenKind::Integer(i)) => {
                self.pos += 1;
                Ok(Expr::Constant(Literal::Integer(i)).slot())
            }
            Some(TokenKind::Minus) if matches!(self.peek_at(1), Some(TokenKind::Integer(_))) => {
                self.pos += 1;
                let Some(TokenKind::Integer(i)) = self.advance() else {
                    unreachable!()
                };
                Ok(Expr::integer(-i).slot())
            }
            Some(TokenKind::Text(s)) => {
                self.pos += 1;
                Ok(Expr::Constant(Literal::Text(Arc::from(s.as_str()))).slot())
            }
            Some(TokenKind::Star) => {
                self.pos += 1;
                Ok(Expr::asterisk(None).slot())
            }
            Some(TokenKind::Word(w)) if matches!(self.peek_at(1), Some(TokenKind::LParen)) => {
                let Some(kind) = AggregateKind::from_keyword(&w) else {
                    return self.error(format!("unsupported function '{w}'"));
                };
                self.pos += 2;
                let distinct = self.eat_word("DISTINCT");
                let inner = if matches!(self.peek(), Some(TokenKind::Star))
                    && matches!(self.peek_at(1), Some(TokenKind::RParen))
                {
                    self.pos += 1;
                    Expr::asterisk(None).slot()
                } else {
                    self.expr()?
                };
                if !self.eat(&TokenKind::RParen) {
                    return self.error("expected ')' after function argument");
                }
                Ok(Expr::aggregate(kind, distinct, inner).slot())
            }
            Some(TokenKind::Word(_)) => {
                let Some(first) = self.name() else {
                    // A keyword where an expression belongs: leave a hole.
                    return Ok(None);
                };
                if self.eat(&TokenKind::Dot) {
                    if self.eat(&TokenKind::Star) {
                        return Ok(Expr::asterisk(Some(&first)).slot());
                    }
                    match self.name() {
                        Some(column) => Ok(Expr::column(Some(&first), &column).slot()),
                        None => self.error("expected column name after '.'"),
                    }
                } else {
                    Ok(Expr::column(None, &first).slot())
                }
            }
            // Anything else cannot start an expression; the caller decides
            // whether what follows is acceptable.
            _ => Ok(None),
        }
    }
}

fn describe(kind: Option<&TokenKind>) -> String {
    match kind {
        None => "end of input".to_owned(),
        Some(TokenKind::Word(w)) => format!("'{w}'"),
        Some(TokenKind::Integer(i)) => format!("'{i}'"),
        Some(TokenKind::Text(s)) => format!("'{s}'"),
        Some(TokenKind::Comma) => "','".to_owned(),
        Some(TokenKind::Dot) => "'.'".to_owned(),
        Some(TokenKind::LParen) => "'('".to_owned(),
        Some(TokenKind::RParen) => "')'".to_owned(),
        Some(other) => format!("{other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_query_on_students() {
        let q = parse_query("SELECT s.id AS ID FROM students AS s WHERE s.age > 21").unwrap();
        assert_eq!(q.select().len(), 1);
        assert_eq!(q.select()[0].expr, Expr::column(Some("s"), "id").slot());
        assert_eq!(q.select()[0].alias.as_deref(), Some("ID"));
        assert_eq!(q.from()[0].table.as_ref(), "students");
        assert_eq!(q.from()[0].alias.as_deref(), Some("s"));
        assert_eq!(
            q.where_clause(),
            &Expr::binary(
                BinaryOp::Gt,
                Expr::column(Some("s"), "age").slot(),
                Expr::integer(21).slot()
            )
            .slot()
        );
    }

    #[test]
    fn empty_aggregate_argument_is_a_hole() {
        let q = parse_query("SELECT AVG(   ) FROM students").unwrap();
        assert_eq!(
            q.select()[0].expr,
            Expr::aggregate(AggregateKind::Avg, false, None).slot()
        );
    }

    #[test]
    fn empty_input_is_empty_query() {
        assert!(parse_query("").unwrap().is_empty());
        assert!(parse_query("  -- nothing\n").unwrap().is_empty());
        assert!(parse_query("SELECT").unwrap().is_empty());
    }

    #[test]
    fn dangling_operator_and_bare_alias() {
        let q = parse_query("SELECT AS x FROM t WHERE age >").unwrap();
        assert_eq!(q.select()[0], SelectElement::new(None, Some("x")));
        assert_eq!(
            q.where_clause(),
            &Expr::binary(BinaryOp::Gt, Expr::column(None, "age").slot(), None).slot()
        );
        let q = parse_query("SELECT _ FROM t WHERE > 3 AND").unwrap();
        assert_eq!(q.select()[0], SelectElement::hole());
        assert_eq!(q.where_clause().as_ref().unwrap().to_string(), "_ > 3 AND _");
    }

    #[test]
    fn joins_and_keywords_are_case_insensitive() {
        let q = parse_query(
            "select * from students join teachers on students.id = teachers.id left join x",
        )
        .unwrap();
        assert_eq!(q.from()[1].join, Some(JoinKind::Inner));
        assert!(q.from()[1].condition.is_some());
        assert_eq!(q.from()[2].join, Some(JoinKind::LeftOuter));
        assert_eq!(q.from()[2].condition, None);
        let q = parse_query("SELECT * FROM a CROSS JOIN b, c").unwrap();
        assert_eq!(q.from()[1].join, Some(JoinKind::Cross));
        assert_eq!(q.from()[2].join, Some(JoinKind::Cross));
    }

    #[test]
    fn count_star_and_distinct_argument() {
        let q = parse_query("SELECT COUNT(*), COUNT(DISTINCT name) FROM t").unwrap();
        assert_eq!(
            q.select()[0].expr,
            Expr::aggregate(AggregateKind::Count, false, Expr::asterisk(None).slot()).slot()
        );
        assert_eq!(
            q.select()[1].expr,
            Expr::aggregate(AggregateKind::Count, true, Expr::column(None, "name").slot()).slot()
        );
    }

    #[test]
    fn precedence() {
        let q = parse_query("SELECT a FROM t WHERE NOT a = 1 OR b < 2 AND c + 1 * 2 > 3").unwrap();
        let rendered = q.where_clause().as_ref().unwrap().to_string();
        assert_eq!(rendered, "NOT a = 1 OR b < 2 AND c + 1 * 2 > 3");
        let Expr::Binary { op, .. } = q.where_clause().as_deref().unwrap() else {
            panic!()
        };
        assert_eq!(*op, BinaryOp::Or);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_query("SELECT (a FROM t").unwrap_err();
        assert_eq!(e.position, 10);
        let e = parse_query("SELECT a FROM t )").unwrap_err();
        assert_eq!(e.position, 16);
        assert!(parse_query("SELECT foo(a) FROM t").is_err());
        assert!(parse_query("SELECT a FROM t WHERE 1.5 > a").is_err());
    }

    #[test]
    fn group_order_clauses() {
        let q = parse_query("SELECT a, COUNT(*) FROM t GROUP BY a HAVING COUNT(*) > 1 ORDER BY a DESC, b ASC;")
            .unwrap();
        assert_eq!(q.group_by().len(), 1);
        assert!(q.having().is_some());
        assert_eq!(q.order_by()[0].direction, Direction::Desc);
        assert_eq!(q.order_by()[1].direction, Direction::Asc);
    }

    #[test]
    fn trailing_comma_adds_hole_element() {
        let q = parse_query("SELECT a, FROM t").unwrap();
        assert_eq!(q.select().len(), 2);
        assert_eq!(q.select()[1], SelectElement::hole());
    }
}
