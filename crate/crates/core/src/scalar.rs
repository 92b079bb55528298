//! The scalar-ring abstraction shared by every evaluator in the crate.
//!
//! All polynomial families are defined by the same branching/product
//! formulas regardless of where the inputs live: exact rational points,
//! truncated graded series in the inhomogeneity parameters, Laurent
//! polynomials in torus variables, or the auxiliary epsilon-Laurent ring
//! used for limits. [`Scalar`] captures exactly what those formulas need:
//! commutative ring operations plus inversion of units.

use num_traits::{One, Zero};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::Rational;

/// A commutative ring with exact arithmetic and partial inversion.
///
/// `zero()`/`one()` (from `num_traits`) are context-free constants; types
/// carrying an alphabet or a truncation cap adopt the context of the other
/// operand when combined with them.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Multiplicative inverse of a unit. `Err(NotInvertible)` otherwise.
    fn try_inv(&self) -> Result<Self>;

    /// Embed an exact rational constant.
    fn from_rational(r: &Rational) -> Self;

    /// The coefficient of the empty monomial: the part of the value that is
    /// free of every formal symbol and variable. Used by termination guards.
    fn pure_constant(&self) -> Rational;

    /// Embed a small integer.
    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    /// `self^k` for `k >= 0` by repeated squaring.
    fn pow_u(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// `self^k` for any integer `k`; negative powers require a unit.
    fn pow_i(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            Ok(self.pow_u(k as u64))
        } else {
            Ok(self.try_inv()?.pow_u(k.unsigned_abs()))
        }
    }
}

impl Scalar for Rational {
    fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            Err(Error::NotInvertible("division by zero rational".into()))
        } else {
            Ok(Self::one() / self.clone())
        }
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn pure_constant(&self) -> Rational {
        self.clone()
    }
}

/// Parse a rational from `"p/q"` or `"p"` decimal strings.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<num_bigint::BigInt>()
            .map_err(|e| Error::InvalidInput(format!("bad integer {t:?}: {e}")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(num)?, den))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}
