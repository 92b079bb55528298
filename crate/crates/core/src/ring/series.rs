//! Truncated multivariate power series over the parameter alphabet.
//!
//! Every symbol has weight 1 and terms of total weight above the context cap
//! are discarded by every operation, so the ring is the quotient by the ideal
//! of degree > D terms. Coefficients are exact rationals; no zero
//! coefficient is ever stored.

use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::alphabet::{unify, Ctx, Symbol};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Scalar};
use crate::Rational;

/// Exponent vector over the alphabet, trailing zeros trimmed.
pub type ParamExp = Vec<u16>;

fn exp_degree(e: &[u16]) -> u32 {
    e.iter().map(|&x| x as u32).sum()
}

fn exp_add(a: &[u16], b: &[u16]) -> ParamExp {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0));
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// A truncated graded power series.
#[derive(Clone)]
pub struct GradedSeries {
    ctx: Option<Arc<Ctx>>,
    terms: BTreeMap<ParamExp, Rational>,
}

impl GradedSeries {
    /// The zero series of a given context.
    pub fn zero_in(ctx: &Arc<Ctx>) -> Self {
        GradedSeries {
            ctx: Some(ctx.clone()),
            terms: BTreeMap::new(),
        }
    }

    /// A rational constant in a given context.
    pub fn constant(ctx: &Arc<Ctx>, r: Rational) -> Self {
        let mut s = Self::zero_in(ctx);
        if !r.is_zero() {
            s.terms.insert(Vec::new(), r);
        }
        s
    }

    /// A context-free rational constant.
    pub fn constant_free(r: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(Vec::new(), r);
        }
        GradedSeries { ctx: None, terms }
    }

    /// The symbol `s` as a series (degree-1 monomial).
    pub fn symbol(ctx: &Arc<Ctx>, s: Symbol) -> Result<Self> {
        let idx = ctx.alphabet.index(s)?;
        let mut e = vec![0u16; idx + 1];
        e[idx] = 1;
        let mut out = Self::zero_in(ctx);
        if ctx.cap >= 1 {
            out.terms.insert(e, Rational::one());
        }
        Ok(out)
    }

    /// A single monomial `coeff * prod(sym_i^e_i)` given as (symbol, exp) pairs.
    pub fn monomial(ctx: &Arc<Ctx>, pairs: &[(Symbol, u16)], coeff: Rational) -> Result<Self> {
        let mut e = vec![0u16; ctx.alphabet.len()];
        for &(s, k) in pairs {
            e[ctx.alphabet.index(s)?] += k;
        }
        while e.last() == Some(&0) {
            e.pop();
        }
        let mut out = Self::zero_in(ctx);
        if !coeff.is_zero() && exp_degree(&e) <= ctx.cap {
            out.terms.insert(e, coeff);
        }
        Ok(out)
    }

    pub fn ctx(&self) -> Option<&Arc<Ctx>> {
        self.ctx.as_ref()
    }

    pub fn cap(&self) -> Option<u32> {
        self.ctx.as_ref().map(|c| c.cap)
    }

    /// Iterate (exponent, coefficient) pairs in the fixed serialization order.
    pub fn iter_terms(&self) -> impl Iterator<Item = (&ParamExp, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the given exponent vector (trailing zeros allowed).
    pub fn coeff(&self, exp: &[u16]) -> Rational {
        let mut key = exp.to_vec();
        while key.last() == Some(&0) {
            key.pop();
        }
        self.terms.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant (degree-0) coefficient.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Smallest total degree among stored terms; `None` when zero.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| exp_degree(e)).min()
    }

    /// Largest total degree among stored terms.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| exp_degree(e)).max()
    }

    fn insert_add(&mut self, e: ParamExp, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn checked_binop(
        &self,
        rhs: &Self,
        f: impl FnOnce(&Self, &Self, Option<Arc<Ctx>>) -> Self,
    ) -> Self {
        let ctx = unify(&self.ctx, &rhs.ctx).expect("graded series context mismatch");
        f(self, rhs, ctx)
    }

    /// Fallible addition (the operator impls panic on context mismatch).
    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        let ctx = unify(&self.ctx, &rhs.ctx)?;
        Ok(self.add_impl(rhs, ctx))
    }

    /// Fallible multiplication.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        let ctx = unify(&self.ctx, &rhs.ctx)?;
        Ok(self.mul_impl(rhs, ctx))
    }

    fn add_impl(&self, rhs: &Self, ctx: Option<Arc<Ctx>>) -> Self {
        let mut out = GradedSeries {
            ctx,
            terms: self.terms.clone(),
        };
        for (e, c) in &rhs.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }

    fn mul_impl(&self, rhs: &Self, ctx: Option<Arc<Ctx>>) -> Self {
        let cap = ctx.as_ref().map(|c| c.cap);
        let mut out = GradedSeries {
            ctx,
            terms: BTreeMap::new(),
        };
        if self.terms.is_empty() || rhs.terms.is_empty() {
            return out;
        }
        for (ea, ca) in &self.terms {
            let da = exp_degree(ea);
            for (eb, cb) in &rhs.terms {
                if let Some(cap) = cap {
                    if da + exp_degree(eb) > cap {
                        continue;
                    }
                }
                out.insert_add(exp_add(ea, eb), ca * cb);
            }
        }
        out
    }

    /// Multiply by a rational constant.
    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return GradedSeries {
                ctx: self.ctx.clone(),
                terms: BTreeMap::new(),
            };
        }
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c * r)).collect();
        GradedSeries {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Drop terms of total degree above `cap` (used by re-capping helpers).
    pub fn truncated(&self, cap: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| exp_degree(e) <= cap)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        GradedSeries {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Move the series into a different context (same alphabet, new cap).
    pub fn with_ctx(&self, ctx: &Arc<Ctx>) -> Result<Self> {
        if let Some(old) = &self.ctx {
            if old.alphabet != ctx.alphabet {
                return Err(Error::AlphabetMismatch(format!(
                    "{:?} vs {:?}",
                    old.alphabet, ctx.alphabet
                )));
            }
        }
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| exp_degree(e) <= ctx.cap)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Ok(GradedSeries {
            ctx: Some(ctx.clone()),
            terms,
        })
    }

    /// Series inverse; requires a nonzero constant term.
    pub fn inv(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::NotInvertible(
                "series with zero constant term".into(),
            ));
        }
        let c0_inv = Rational::one() / c0.clone();
        // self = c0 (1 - r) with every term of r of positive degree.
        let mut r = GradedSeries {
            ctx: self.ctx.clone(),
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            if !e.is_empty() {
                r.insert_add(e.clone(), -(c * &c0_inv));
            }
        }
        let mut acc = match &self.ctx {
            Some(ctx) => Self::constant(ctx, Rational::one()),
            None => Self::constant_free(Rational::one()),
        };
        let mut pow = acc.clone();
        let cap = self.cap().unwrap_or(0);
        for _ in 0..=cap {
            pow = pow.try_mul(&r)?;
            if pow.terms.is_empty() {
                break;
            }
            acc = acc.try_add(&pow)?;
        }
        Ok(acc.scale(&c0_inv))
    }

    /// Canonical JSON: a list of `{"exp": {sym: e, ...}, "num": "...", "den": "..."}`
    /// sorted by exponent vector, with every alphabet symbol listed.
    pub fn to_json(&self, ctx: &Arc<Ctx>) -> serde_json::Value {
        let alph = &ctx.alphabet;
        let mut list = Vec::new();
        for (e, c) in &self.terms {
            let mut exp = serde_json::Map::new();
            for i in 0..alph.len() {
                let v = e.get(i).copied().unwrap_or(0);
                exp.insert(alph.symbol(i).to_string(), serde_json::json!(v));
            }
            list.push(serde_json::json!({
                "exp": exp,
                "num": c.numer().to_string(),
                "den": c.denom().to_string(),
            }));
        }
        serde_json::Value::Array(list)
    }

    /// Inverse of [`GradedSeries::to_json`].
    pub fn from_json(ctx: &Arc<Ctx>, v: &serde_json::Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::InvalidInput("series JSON must be an array".into()))?;
        let mut out = Self::zero_in(ctx);
        for item in arr {
            let exp_map = item
                .get("exp")
                .and_then(|e| e.as_object())
                .ok_or_else(|| Error::InvalidInput("series term lacks exp".into()))?;
            let mut e = vec![0u16; ctx.alphabet.len()];
            for (name, val) in exp_map {
                let idx = (0..ctx.alphabet.len())
                    .find(|&i| ctx.alphabet.symbol(i).to_string() == *name)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown symbol {name}")))?;
                e[idx] = val
                    .as_u64()
                    .ok_or_else(|| Error::InvalidInput("exponent must be an integer".into()))?
                    as u16;
            }
            while e.last() == Some(&0) {
                e.pop();
            }
            let num = item.get("num").and_then(|x| x.as_str()).unwrap_or("0");
            let den = item.get("den").and_then(|x| x.as_str()).unwrap_or("1");
            let c = parse_rational(&format!("{num}/{den}"))?;
            out.insert_add(e, c);
        }
        Ok(out)
    }
}

impl PartialEq for GradedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for GradedSeries {}

impl fmt::Debug for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts = Vec::new();
            if let Some(ctx) = &self.ctx {
                for (i, &k) in e.iter().enumerate() {
                    if k == 1 {
                        parts.push(ctx.alphabet.symbol(i).to_string());
                    } else if k > 1 {
                        parts.push(format!("{}^{}", ctx.alphabet.symbol(i), k));
                    }
                }
            } else if !e.is_empty() {
                parts.push(format!("{e:?}"));
            }
            if parts.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", parts.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, parts.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for GradedSeries {
    type Output = GradedSeries;
    fn add(self, rhs: Self) -> Self {
        self.checked_binop(&rhs, |a, b, ctx| a.add_impl(b, ctx))
    }
}

impl Sub for GradedSeries {
    type Output = GradedSeries;
    fn sub(self, rhs: Self) -> Self {
        self.checked_binop(&rhs, |a, b, ctx| a.add_impl(&b.clone().neg(), ctx))
    }
}

impl Mul for GradedSeries {
    type Output = GradedSeries;
    fn mul(self, rhs: Self) -> Self {
        self.checked_binop(&rhs, |a, b, ctx| a.mul_impl(b, ctx))
    }
}

impl Neg for GradedSeries {
    type Output = GradedSeries;
    fn neg(self) -> Self {
        let terms = self.terms.into_iter().map(|(e, c)| (e, -c)).collect();
        GradedSeries {
            ctx: self.ctx,
            terms,
        }
    }
}

impl Zero for GradedSeries {
    fn zero() -> Self {
        GradedSeries {
            ctx: None,
            terms: BTreeMap::new(),
        }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for GradedSeries {
    fn one() -> Self {
        Self::constant_free(Rational::one())
    }
    fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }
}

impl Scalar for GradedSeries {
    fn try_inv(&self) -> Result<Self> {
        self.inv()
    }

    fn from_rational(r: &Rational) -> Self {
        Self::constant_free(r.clone())
    }

    fn pure_constant(&self) -> Rational {
        self.constant_term()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Arc<Ctx> {
        Ctx::ab(1, 1, 3)
    }

    fn q(ctx: &Arc<Ctx>) -> GradedSeries {
        GradedSeries::symbol(ctx, Symbol::Q).unwrap()
    }

    #[test]
    fn mul_truncates_at_cap() {
        // (1+q)(1-q) = 1-q^2 at D >= 2
        let c = ctx();
        let one = GradedSeries::constant(&c, Rational::one());
        let p = one.clone() + q(&c);
        let m = one.clone() - q(&c);
        let prod = p.clone() * m;
        let expect = one.clone() - q(&c) * q(&c);
        assert_eq!(prod, expect);

        // (1+q)^2 at D=1 -> 1+2q
        let c1 = Ctx::ab(1, 1, 1);
        let one1 = GradedSeries::constant(&c1, Rational::one());
        let p1 = one1.clone() + q(&c1);
        let sq = p1.clone() * p1;
        let expect1 = one1 + q(&c1).scale(&Rational::from_integer(2.into()));
        assert_eq!(sq, expect1);
    }

    #[test]
    fn one_is_identity() {
        let c = ctx();
        let x = GradedSeries::constant(&c, Rational::new(3.into(), 7.into())) + q(&c);
        assert_eq!(x.clone() * GradedSeries::one(), x);
    }

    #[test]
    fn geometric_inverse() {
        // inv(1-q) at D=3 -> 1+q+q^2+q^3
        let c = ctx();
        let one = GradedSeries::constant(&c, Rational::one());
        let inv = (one.clone() - q(&c)).inv().unwrap();
        let mut expect = one.clone();
        let mut p = one.clone();
        for _ in 0..3 {
            p = p * q(&c);
            expect = expect + p.clone();
        }
        assert_eq!(inv, expect);
        assert_eq!(GradedSeries::one().inv().unwrap(), GradedSeries::one());
    }

    #[test]
    fn inverse_of_one_minus_ab() {
        // inv(1-a1*b1) at D=2 -> 1 + a1*b1 (a1*b1 has degree 2)
        let c = Ctx::ab(1, 1, 2);
        let a = GradedSeries::symbol(&c, Symbol::A(1)).unwrap();
        let b = GradedSeries::symbol(&c, Symbol::B(1)).unwrap();
        let one = GradedSeries::constant(&c, Rational::one());
        let ab = a * b;
        let inv = (one.clone() - ab.clone()).inv().unwrap();
        assert_eq!(inv, one + ab);
    }

    #[test]
    fn zero_constant_term_not_invertible() {
        let c = ctx();
        assert!(q(&c).inv().is_err());
    }

    #[test]
    fn mismatched_context_errors() {
        let c1 = Ctx::ab(1, 1, 3);
        let c2 = Ctx::ab(2, 1, 3);
        let x = GradedSeries::symbol(&c1, Symbol::Q).unwrap();
        let y = GradedSeries::symbol(&c2, Symbol::Q).unwrap();
        assert!(x.try_mul(&y).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = ctx();
        let a = GradedSeries::symbol(&c, Symbol::A(1)).unwrap();
        let s = GradedSeries::constant(&c, Rational::new((-7).into(), 3.into())) + a * q(&c);
        let v = s.to_json(&c);
        let back = GradedSeries::from_json(&c, &v).unwrap();
        assert_eq!(s, back);
        // byte-stable: serializing twice gives identical text
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            serde_json::to_string(&s.to_json(&c)).unwrap()
        );
    }
}
