//! The ordered alphabet of formal parameters and the truncation context.
//!
//! Symbols come in five families with a fixed global order:
//! `q`, then `a1 < a2 < ...`, then `b1 < ...`, then `u1 < ...`, then
//! `y1 < ...`. Every symbol has grading weight 1; series arithmetic discards
//! terms of total weight above the cap `D`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// One formal parameter. The payload is a 1-based family index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Q,
    A(u16),
    B(u16),
    U(u16),
    Y(u16),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Q => write!(f, "q"),
            Symbol::A(i) => write!(f, "a{i}"),
            Symbol::B(i) => write!(f, "b{i}"),
            Symbol::U(i) => write!(f, "u{i}"),
            Symbol::Y(i) => write!(f, "y{i}"),
        }
    }
}

/// The materialized symbol list: `q`, `a1..a_na`, `b1..b_nb`, `u1..u_nu`,
/// `y1..y_ny`, in that order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    pub na: u16,
    pub nb: u16,
    pub nu: u16,
    pub ny: u16,
}

impl Alphabet {
    pub fn new(na: u16, nb: u16, nu: u16, ny: u16) -> Self {
        Alphabet { na, nb, nu, ny }
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        1 + (self.na + self.nb + self.nu + self.ny) as usize
    }

    pub fn is_empty(&self) -> bool {
        false // q is always present
    }

    /// Position of a symbol in the fixed order.
    pub fn index(&self, s: Symbol) -> Result<usize> {
        let bad = || Error::InvalidInput(format!("symbol {s} outside alphabet {self:?}"));
        match s {
            Symbol::Q => Ok(0),
            Symbol::A(i) => {
                if i >= 1 && i <= self.na {
                    Ok(i as usize)
                } else {
                    Err(bad())
                }
            }
            Symbol::B(i) => {
                if i >= 1 && i <= self.nb {
                    Ok((self.na + i) as usize)
                } else {
                    Err(bad())
                }
            }
            Symbol::U(i) => {
                if i >= 1 && i <= self.nu {
                    Ok((self.na + self.nb + i) as usize)
                } else {
                    Err(bad())
                }
            }
            Symbol::Y(i) => {
                if i >= 1 && i <= self.ny {
                    Ok((self.na + self.nb + self.nu + i) as usize)
                } else {
                    Err(bad())
                }
            }
        }
    }

    /// Symbol at a position (inverse of [`Alphabet::index`]).
    pub fn symbol(&self, idx: usize) -> Symbol {
        debug_assert!(idx < self.len());
        let mut i = idx as u16;
        if i == 0 {
            return Symbol::Q;
        }
        i -= 1;
        if i < self.na {
            return Symbol::A(i + 1);
        }
        i -= self.na;
        if i < self.nb {
            return Symbol::B(i + 1);
        }
        i -= self.nb;
        if i < self.nu {
            return Symbol::U(i + 1);
        }
        i -= self.nu;
        Symbol::Y(i + 1)
    }
}

/// Alphabet plus truncation cap: the context every graded series lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ctx {
    pub alphabet: Alphabet,
    pub cap: u32,
}

impl Ctx {
    /// Shared context with the given family sizes and cap.
    pub fn new(na: u16, nb: u16, nu: u16, ny: u16, cap: u32) -> Arc<Ctx> {
        Arc::new(Ctx {
            alphabet: Alphabet::new(na, nb, nu, ny),
            cap,
        })
    }

    /// A context with only `q`, `a`'s and `b`'s, the common case.
    pub fn ab(na: u16, nb: u16, cap: u32) -> Arc<Ctx> {
        Self::new(na, nb, 0, 0, cap)
    }

    pub fn compatible(&self, other: &Ctx) -> bool {
        self == other
    }
}

/// Unify the optional contexts of two operands.
pub(crate) fn unify<'a>(
    lhs: &'a Option<Arc<Ctx>>,
    rhs: &'a Option<Arc<Ctx>>,
) -> Result<Option<Arc<Ctx>>> {
    match (lhs, rhs) {
        (None, None) => Ok(None),
        (Some(c), None) | (None, Some(c)) => Ok(Some(c.clone())),
        (Some(a), Some(b)) => {
            if a.compatible(b) {
                Ok(Some(a.clone()))
            } else {
                Err(Error::AlphabetMismatch(format!("{a:?} vs {b:?}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_order_is_fixed() {
        let alph = Alphabet::new(2, 2, 1, 1);
        let order: Vec<Symbol> = (0..alph.len()).map(|i| alph.symbol(i)).collect();
        assert_eq!(
            order,
            vec![
                Symbol::Q,
                Symbol::A(1),
                Symbol::A(2),
                Symbol::B(1),
                Symbol::B(2),
                Symbol::U(1),
                Symbol::Y(1),
            ]
        );
        for (i, s) in order.iter().enumerate() {
            assert_eq!(alph.index(*s).unwrap(), i);
        }
    }

    #[test]
    fn out_of_range_symbol_rejected() {
        let alph = Alphabet::new(1, 0, 0, 0);
        assert!(alph.index(Symbol::A(2)).is_err());
        assert!(alph.index(Symbol::B(1)).is_err());
    }
}
