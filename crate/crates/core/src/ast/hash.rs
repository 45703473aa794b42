use super::{
    AggregateKind, BinaryOp, Direction, Expr, FromElement, JoinKind, Literal, OrderByElement,
    Query, SelectElement, Slot,
};

/// Largest prime below 2^64. Once a product of bounds would exceed it the
/// bound saturates here and values are reduced modulo it.
const MODULUS: u64 = 0xFFFF_FFFF_FFFF_FFC5;

/// Multiplier used in place of a saturated child bound; a bound equal to the
/// modulus would otherwise annihilate everything folded before it.
const SATURATED_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;

/// Mixed-radix hash: `value` is a digit in `[0, max)`. Parents fold children
/// in as `value * child.max + child.value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HashValue {
    value: u64,
    max: u64,
}

impl HashValue {
    /// Panics unless `value < max` and `max >= 2`.
    pub fn new(value: u64, max: u64) -> HashValue {
        assert!(max >= 2 && value < max, "hash digit {value} out of range {max}");
        HashValue { value, max }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn max(self) -> u64 {
        self.max
    }

    pub fn flag(b: bool) -> HashValue {
        HashValue::new(u64::from(b), 2)
    }

    /// Digit for the `index`-th of `count` variants.
    pub fn tag(index: usize, count: usize) -> HashValue {
        HashValue::new(index as u64, count.max(2) as u64)
    }

    pub fn text(s: &str) -> HashValue {
        // FNV-1a; stable across runs and platforms.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in s.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        HashValue::new(h % MODULUS, MODULUS)
    }

    pub fn length(n: usize) -> HashValue {
        HashValue::new((n % 64) as u64, 64)
    }

    pub fn combine(self, child: HashValue) -> HashValue {
        match self.max.checked_mul(child.max) {
            Some(max) if max <= MODULUS => HashValue {
                value: self.value * child.max + child.value,
                max,
            },
            _ => {
                let mult = if child.max >= MODULUS {
                    SATURATED_MULTIPLIER
                } else {
                    child.max
                };
                let v = (u128::from(self.value) * u128::from(mult) + u128::from(child.value))
                    % u128::from(MODULUS);
                HashValue {
                    value: v as u64,
                    max: MODULUS,
                }
            }
        }
    }

    pub fn combine_all(self, children: impl IntoIterator<Item = HashValue>) -> HashValue {
        children.into_iter().fold(self, HashValue::combine)
    }
}

/// Structural hashing of AST components.
pub trait Hashable {
    fn hash_value(&self) -> HashValue;
}

impl Hashable for str {
    fn hash_value(&self) -> HashValue {
        HashValue::text(self)
    }
}

impl<T: Hashable + ?Sized> Hashable for Option<&T> {
    fn hash_value(&self) -> HashValue {
        match self {
            None => HashValue::flag(false),
            Some(t) => HashValue::flag(true).combine(t.hash_value()),
        }
    }
}

fn opt_text(s: &Option<super::Ident>) -> HashValue {
    s.as_deref().hash_value()
}

fn slot(s: &Slot) -> HashValue {
    s.as_deref().hash_value()
}

fn position<T: PartialEq + Copy>(all: &[T], item: T) -> HashValue {
    let i = all.iter().position(|x| *x == item).unwrap_or(0);
    HashValue::tag(i, all.len())
}

impl Hashable for Literal {
    fn hash_value(&self) -> HashValue {
        match self {
            Literal::Integer(i) => HashValue::tag(0, 2).combine(HashValue::text(&i.to_string())),
            Literal::Text(s) => HashValue::tag(1, 2).combine(HashValue::text(s)),
        }
    }
}

impl Hashable for Expr {
    fn hash_value(&self) -> HashValue {
        match self {
            Expr::Asterisk { qualifier } => HashValue::tag(0, 6).combine(opt_text(qualifier)),
            Expr::Column { qualifier, name } => HashValue::tag(1, 6)
                .combine(opt_text(qualifier))
                .combine(HashValue::text(name)),
            Expr::Constant(lit) => HashValue::tag(2, 6).combine(lit.hash_value()),
            Expr::Not(inner) => HashValue::tag(3, 6).combine(slot(inner)),
            Expr::Aggregate {
                kind,
                distinct,
                inner,
            } => HashValue::tag(4, 6)
                .combine(position(&AggregateKind::ALL, *kind))
                .combine(HashValue::flag(*distinct))
                .combine(slot(inner)),
            Expr::Binary { op, left, right } => HashValue::tag(5, 6)
                .combine(position(&BinaryOp::ALL, *op))
                .combine(slot(left))
                .combine(slot(right)),
        }
    }
}

impl Hashable for SelectElement {
    fn hash_value(&self) -> HashValue {
        slot(&self.expr).combine(opt_text(&self.alias))
    }
}

impl Hashable for FromElement {
    fn hash_value(&self) -> HashValue {
        const JOINS: [Option<JoinKind>; 6] = [
            None,
            Some(JoinKind::Inner),
            Some(JoinKind::LeftOuter),
            Some(JoinKind::RightOuter),
            Some(JoinKind::FullOuter),
            Some(JoinKind::Cross),
        ];
        HashValue::text(&self.table)
            .combine(opt_text(&self.alias))
            .combine(position(&JOINS, self.join))
            .combine(slot(&self.condition))
    }
}

impl Hashable for OrderByElement {
    fn hash_value(&self) -> HashValue {
        slot(&self.expr).combine(position(&[Direction::Asc, Direction::Desc], self.direction))
    }
}

impl Query {
    /// Hash of this exact structure, aliases as written.
    pub fn structural_hash(&self) -> HashValue {
        let mut h = HashValue::flag(self.distinct);
        h = h
            .combine(HashValue::length(self.select.len()))
            .combine_all(self.select.iter().map(Hashable::hash_value));
        h = h
            .combine(HashValue::length(self.from.len()))
            .combine_all(self.from.iter().map(Hashable::hash_value));
        h = h.combine(slot(&self.where_clause));
        h = h
            .combine(HashValue::length(self.group_by.len()))
            .combine_all(self.group_by.iter().map(slot));
        h = h.combine(slot(&self.having));
        h.combine(HashValue::length(self.order_by.len()))
            .combine_all(self.order_by.iter().map(Hashable::hash_value))
    }
}

/// Hashes the canonical form, so queries that differ only in FROM alias
/// spelling hash alike.
impl Hashable for Query {
    fn hash_value(&self) -> HashValue {
        self.canonical().structural_hash()
    }
}
