//! A univariate Laurent ring in an auxiliary variable over the rationals.
//!
//! This is the exact-algebra carrier for the two analytic limits of the dual
//! operators: `lim_{eps->0} eps * f(..., 1/eps, ...)` and evaluation of
//! symmetric rational functions at points with repeated zero coordinates
//! (approach along `t*w_i` with distinct `w_i`). Values track the order
//! window they are exact in: coefficients of `eps^k` are exact for `k < cap`.

use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Rational;

/// Default window width for seeded computations.
pub const DEFAULT_WINDOW: i32 = 16;

/// Truncated Laurent series `sum coeffs[i] * eps^(min+i)`, exact below `cap`.
#[derive(Clone, PartialEq)]
pub struct AuxLaurent {
    min: i32,
    coeffs: Vec<Rational>,
    cap: i32,
}

impl AuxLaurent {
    fn normalized(mut min: i32, mut coeffs: Vec<Rational>, cap: i32) -> Self {
        while coeffs.first().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.remove(0);
            min += 1;
        }
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            min = 0;
        }
        AuxLaurent { min, coeffs, cap }
    }

    /// An exact rational constant (valid to every order).
    pub fn constant(r: Rational) -> Self {
        Self::normalized(0, vec![r], i32::MAX)
    }

    /// A rational constant restricted to a finite exactness window.
    pub fn seed(r: Rational, window: i32) -> Self {
        Self::normalized(0, vec![r], window)
    }

    /// `eps^k` within the given window.
    pub fn eps_power(k: i32, window: i32) -> Self {
        Self::normalized(k, vec![Rational::one()], window)
    }

    /// Coefficient of `eps^k`; errors if `k` is outside the exact window.
    pub fn coeff(&self, k: i32) -> Result<Rational> {
        if k >= self.cap {
            return Err(Error::NotInVSpace(format!(
                "aux-laurent window too small: order {k} >= cap {}",
                self.cap
            )));
        }
        let idx = k - self.min;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Ok(Rational::zero())
        } else {
            Ok(self.coeffs[idx as usize].clone())
        }
    }

    /// Lowest nonzero order, `None` for zero.
    pub fn min_order(&self) -> Option<i32> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.min)
        }
    }

    pub fn cap(&self) -> i32 {
        self.cap
    }

    fn truncate(self) -> Self {
        if self.cap == i32::MAX {
            return self;
        }
        let keep = (self.cap - self.min).max(0) as usize;
        let mut coeffs = self.coeffs;
        coeffs.truncate(keep);
        Self::normalized(self.min, coeffs, self.cap)
    }
}

impl fmt::Debug for AuxLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{}*eps^{}", c, self.min + i as i32))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for AuxLaurent {
    type Output = AuxLaurent;
    fn add(self, rhs: Self) -> Self {
        let cap = self.cap.min(rhs.cap);
        if self.coeffs.is_empty() {
            return Self::normalized(rhs.min, rhs.coeffs, cap);
        }
        if rhs.coeffs.is_empty() {
            return Self::normalized(self.min, self.coeffs, cap);
        }
        let min = self.min.min(rhs.min);
        let max = (self.min + self.coeffs.len() as i32).max(rhs.min + rhs.coeffs.len() as i32);
        let mut coeffs = vec![Rational::zero(); (max - min) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.min - min) as usize + i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            coeffs[(rhs.min - min) as usize + i] += c;
        }
        Self::normalized(min, coeffs, cap).truncate()
    }
}

impl Sub for AuxLaurent {
    type Output = AuxLaurent;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Self) -> Self {
        self + rhs.neg()
    }
}

impl Neg for AuxLaurent {
    type Output = AuxLaurent;
    fn neg(self) -> Self {
        AuxLaurent {
            min: self.min,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
            cap: self.cap,
        }
    }
}

impl Mul for AuxLaurent {
    type Output = AuxLaurent;
    fn mul(self, rhs: Self) -> Self {
        // exactness: order t needs all pairs (i, t-i); with both factors
        // exact below their caps this bounds t < min(cap1+min2, cap2+min1).
        let cap = if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            self.cap.min(rhs.cap)
        } else {
            let c1 = self.cap.saturating_add(rhs.min);
            let c2 = rhs.cap.saturating_add(self.min);
            c1.min(c2)
        };
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::normalized(0, Vec::new(), cap);
        }
        let min = self.min + rhs.min;
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::normalized(min, coeffs, cap).truncate()
    }
}

impl Zero for AuxLaurent {
    fn zero() -> Self {
        Self::normalized(0, Vec::new(), i32::MAX)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for AuxLaurent {
    fn one() -> Self {
        Self::constant(Rational::one())
    }
    fn is_one(&self) -> bool {
        self.min == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }
}

impl Scalar for AuxLaurent {
    fn try_inv(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::NotInvertible("zero aux-laurent value".into()));
        }
        let m = self.min;
        let lead_inv = Rational::one() / self.coeffs[0].clone();
        // y = eps^{-m} * u^{-1} with u = eps^{-m} self; exact below cap - 2m.
        let cap = if self.cap == i32::MAX {
            i32::MAX
        } else {
            self.cap - 2 * m
        };
        let rel_len = if cap == i32::MAX {
            self.coeffs.len().max(DEFAULT_WINDOW as usize)
        } else {
            (cap + m).max(0) as usize // relative orders 0 .. cap+m-1 of u^{-1}
        };
        let mut inv_rel = vec![Rational::zero(); rel_len.max(1)];
        inv_rel[0] = lead_inv.clone();
        for t in 1..inv_rel.len() {
            let mut s = Rational::zero();
            for i in 1..=t {
                if i < self.coeffs.len() {
                    s += &self.coeffs[i] * &inv_rel[t - i];
                }
            }
            inv_rel[t] = -(lead_inv.clone() * s);
        }
        Ok(Self::normalized(-m, inv_rel, cap))
    }

    fn from_rational(r: &Rational) -> Self {
        Self::constant(r.clone())
    }

    fn pure_constant(&self) -> Rational {
        let idx = -self.min;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Rational::zero()
        } else {
            self.coeffs[idx as usize].clone()
        }
    }
}
