//! Spin Hall-Littlewood rational functions via the symmetrized sum, plus
//! skew functions defined through the torus scalar product.
//!
//! Two evaluation routes exist. Point mode works over any scalar ring with
//! division and requires pairwise-distinct coordinates. Symbolic mode clears
//! the Vandermonde denominator against an antisymmetrized numerator and uses
//! exact division; the `1/(1 - a_j u)` factors expand geometrically on the
//! torus, so the output is an honest polynomial object per cap.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ring::qpoch::{qpoch_finite, qq_reciprocal};
use crate::ring::{Ctx, GradedSeries, LaurentPoly, Symbol};
use crate::scalar::Scalar;
use crate::shapes::Partition;
use crate::torus::{scalar_product, DensityKind};

/// Symmetrization size guard: `m!` terms.
pub const DEFAULT_M_GUARD: usize = 8;

/// Parameter data for the spin Hall-Littlewood family. The lists are
/// conceptually infinite; lookups beyond the materialized length read 0,
/// which must cover the largest part of any shape evaluated.
#[derive(Debug, Clone)]
pub struct ShlSpec<S> {
    pub a: Vec<S>,
    pub b: Vec<S>,
    pub q: S,
    /// Optional 1-based index at which `a` is forced to zero (the
    /// substitution required by the dual Cauchy identity and the column
    /// eigenrelation).
    pub a_zero_at: Option<usize>,
}

impl<S: Scalar> ShlSpec<S> {
    pub fn new(a: Vec<S>, b: Vec<S>, q: S) -> Self {
        ShlSpec {
            a,
            b,
            q,
            a_zero_at: None,
        }
    }

    pub fn with_a_zeroed(mut self, idx: usize) -> Self {
        self.a_zero_at = Some(idx);
        self
    }

    /// `a_r` with the zero flag and zero-extension applied.
    pub fn a_at(&self, r: usize) -> S {
        if self.a_zero_at == Some(r) {
            return S::zero();
        }
        self.a.get(r - 1).cloned().unwrap_or_else(S::zero)
    }

    /// `b_r` with zero-extension.
    pub fn b_at(&self, r: usize) -> S {
        self.b.get(r - 1).cloned().unwrap_or_else(S::zero)
    }
}

impl ShlSpec<GradedSeries> {
    /// Symbolic lists `a1..a_n`, `b1..b_n` and symbolic q.
    pub fn symbols(ctx: &Arc<Ctx>, n: usize) -> Result<Self> {
        let a = (1..=n)
            .map(|i| GradedSeries::symbol(ctx, Symbol::A(i as u16)))
            .collect::<Result<Vec<_>>>()?;
        let b = (1..=n)
            .map(|i| GradedSeries::symbol(ctx, Symbol::B(i as u16)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(a, b, GradedSeries::symbol(ctx, Symbol::Q)?))
    }
}

/// `phi_k(u|a,b) = (-1)^k u/(1-a_k u) prod_{j<k} (u-b_j)/(1-a_j u)`.
pub fn phi<S: Scalar>(k: i64, u: &S, spec: &ShlSpec<S>) -> Result<S> {
    if k < 1 {
        return Err(Error::InvalidInput(format!("phi_k needs k >= 1, got {k}")));
    }
    let mut num = u.clone();
    let mut den = S::one() - spec.a_at(k as usize) * u.clone();
    for j in 1..k as usize {
        num = num * (u.clone() - spec.b_at(j));
        den = den * (S::one() - spec.a_at(j) * u.clone());
    }
    let mut w = num * den.try_inv()?;
    if k % 2 == 1 {
        w = -w;
    }
    Ok(w)
}

/// `psi_{lambda}` with zero-extended lists: the prefactor normalization of
/// the symmetrized sum (the caller passes the conjugate shape).
pub fn psi_ext<S: Scalar>(lam: &Partition, spec: &ShlSpec<S>) -> Result<S> {
    let mut w = S::one();
    for r in 1..=lam.len() {
        let d = lam.part(r) as i64 - lam.part(r + 1) as i64;
        if d == 0 {
            continue;
        }
        let ab = spec.a_at(r) * spec.b_at(r);
        w = w * qpoch_finite(&ab, &spec.q, d)?;
        w = w * qq_reciprocal(&spec.q, d)?;
    }
    Ok(w)
}

/// Common prefactor `(1-q)^m psi_{lambda'}(a,b) / (q;q)_{m - len(lambda)}`.
fn prefactor<S: Scalar>(lam: &Partition, m: usize, spec: &ShlSpec<S>) -> Result<S> {
    let one_minus_q = S::one() - spec.q.clone();
    let mut w = one_minus_q.pow_u(m as u64);
    w = w * qq_reciprocal(&spec.q, m as i64 - lam.len() as i64)?;
    w = w * psi_ext(&lam.conjugate(), spec)?;
    Ok(w)
}

pub(crate) fn permutations_with_sign(m: usize) -> Vec<(Vec<usize>, bool)> {
    // lexicographic enumeration; parity tracked by inversion count
    let mut idx: Vec<usize> = (0..m).collect();
    let mut out = Vec::new();
    loop {
        let mut inv = 0usize;
        for i in 0..m {
            for j in i + 1..m {
                if idx[i] > idx[j] {
                    inv += 1;
                }
            }
        }
        out.push((idx.clone(), inv % 2 == 1));
        // next lexicographic permutation
        let mut i = m - 1;
        while i > 0 && idx[i - 1] >= idx[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = m - 1;
        while idx[j] <= idx[i - 1] {
            j -= 1;
        }
        idx.swap(i - 1, j);
        idx[i..].reverse();
    }
    out
}

/// Point-mode evaluation of the spin Hall-Littlewood rational function.
/// Requires pairwise-distinct coordinates; shapes longer than the variable
/// count evaluate to zero.
pub fn eval_shl<S: Scalar>(lam: &Partition, us: &[S], spec: &ShlSpec<S>) -> Result<S> {
    let m = us.len();
    if m == 0 || m > DEFAULT_M_GUARD {
        return Err(Error::TooLarge(format!(
            "symmetrized sum over {m}! terms refused (guard {DEFAULT_M_GUARD})"
        )));
    }
    if lam.len() > m {
        return Ok(S::zero());
    }
    for i in 0..m {
        for j in 0..i {
            if us[i] == us[j] {
                return Err(Error::DegeneratePoint(format!(
                    "coincident coordinates {i} and {j}"
                )));
            }
        }
    }
    let mut sum = S::zero();
    for (perm, _) in permutations_with_sign(m) {
        let v: Vec<S> = perm.iter().map(|&i| us[i].clone()).collect();
        let mut term = S::one();
        for alpha in 0..m {
            for beta in alpha + 1..m {
                let num = v[alpha].clone() - spec.q.clone() * v[beta].clone();
                let den = v[alpha].clone() - v[beta].clone();
                term = term * num * den.try_inv()?;
            }
        }
        for (i, &part) in lam.parts().iter().enumerate() {
            term = term * phi(part as i64, &v[i], spec)?;
        }
        sum = sum + term;
    }
    Ok(prefactor(lam, m, spec)? * sum)
}

fn neg_poly(p: &LaurentPoly) -> LaurentPoly {
    use std::ops::Neg;
    p.clone().neg()
}

/// Symbolic evaluation over `m` torus variables: the Vandermonde denominator
/// is cleared against the antisymmetrized numerator and divided out exactly.
pub fn eval_shl_symbolic(
    lam: &Partition,
    m: usize,
    spec: &ShlSpec<GradedSeries>,
    ctx: &Arc<Ctx>,
) -> Result<LaurentPoly> {
    if m == 0 || m > DEFAULT_M_GUARD {
        return Err(Error::TooLarge(format!(
            "symmetrized sum over {m}! terms refused (guard {DEFAULT_M_GUARD})"
        )));
    }
    if lam.len() > m {
        return Ok(LaurentPoly::zero_n(m));
    }
    let one = LaurentPoly::one_in(ctx, m);
    let var = |i: usize| LaurentPoly::var(ctx, m, i);
    // base numerator: prod_{a<b} (u_a - q u_b) * prod_i phi(lam_i, u_i)
    let mut base = one.clone();
    for alpha in 0..m {
        for beta in alpha + 1..m {
            base = base.try_mul(&(var(alpha) - var(beta).scale_series(&spec.q)?))?;
        }
    }
    for (i, &part) in lam.parts().iter().enumerate() {
        base = base.try_mul(&phi_symbolic(part as i64, i, m, spec, ctx)?)?;
    }
    // antisymmetrized sum, then exact division by the Vandermonde
    let mut num = LaurentPoly::zero_n(m);
    for (perm, odd) in permutations_with_sign(m) {
        let image = base.permute_vars(&perm);
        num = if odd {
            num.try_add(&neg_poly(&image))?
        } else {
            num.try_add(&image)?
        };
    }
    let mut vmd = one;
    for alpha in 0..m {
        for beta in alpha + 1..m {
            vmd = vmd.try_mul(&(var(alpha) - var(beta)))?;
        }
    }
    let quotient = num.exact_divide(&vmd)?;
    quotient.scale_series(&prefactor(lam, m, spec)?)
}

/// `phi_k` applied to the torus variable `i` with geometric denominators.
fn phi_symbolic(
    k: i64,
    i: usize,
    m: usize,
    spec: &ShlSpec<GradedSeries>,
    ctx: &Arc<Ctx>,
) -> Result<LaurentPoly> {
    if k < 1 {
        return Err(Error::InvalidInput(format!("phi_k needs k >= 1, got {k}")));
    }
    let u = LaurentPoly::var(ctx, m, i);
    let one = LaurentPoly::one_in(ctx, m);
    let mut acc = u.clone();
    acc = acc.try_mul(
        &one.try_add(&neg_poly(&u.scale_series(&spec.a_at(k as usize))?))?
            .try_inv()?,
    )?;
    for j in 1..k as usize {
        let bj = LaurentPoly::constant(m, spec.b_at(j));
        acc = acc.try_mul(&u.try_add(&neg_poly(&bj))?)?;
        acc = acc.try_mul(
            &one.try_add(&neg_poly(&u.scale_series(&spec.a_at(j))?))?
                .try_inv()?,
        )?;
    }
    if k % 2 == 1 {
        acc = neg_poly(&acc);
    }
    Ok(acc)
}

/// The orthogonality norm `(1-q)^m psi_{lambda'}(a,b)/(q;q)_{m-len(lambda)}`.
pub fn shl_norm(lam: &Partition, m: usize, spec: &ShlSpec<GradedSeries>) -> Result<GradedSeries> {
    prefactor(lam, m, spec)
}

/// The spin Hall-Littlewood pairing `<f|g>'_m`.
pub fn shl_pair(
    f: &LaurentPoly,
    g: &LaurentPoly,
    m: usize,
    ctx: &Arc<Ctx>,
) -> Result<GradedSeries> {
    scalar_product(&DensityKind::Shl, f, g, m, ctx)
}

/// Skew spin Hall-Littlewood function of `k` auxiliary variables, computed
/// from its scalar-product definition over `n` torus variables:
/// `<F_lam(u_k, z_n) | F_mu(z_n)>'_n / <F_mu | F_mu>'_n`. The `u` variables
/// are adjoined as graded symbols `u1..uk`, so the result is a series.
pub fn eval_skew_shl(
    lam: &Partition,
    mu: &Partition,
    k: usize,
    n: usize,
    spec: &ShlSpec<GradedSeries>,
    ctx: &Arc<Ctx>,
) -> Result<GradedSeries> {
    if lam.len() > n + k || mu.len() > n {
        return Ok(GradedSeries::zero());
    }
    if ctx.alphabet.nu < k as u16 {
        return Err(Error::InvalidInput(format!(
            "need {k} u-symbols in the alphabet, have {}",
            ctx.alphabet.nu
        )));
    }
    let big = eval_shl_symbolic(lam, k + n, spec, ctx)?;
    let mut subs: Vec<Option<GradedSeries>> = Vec::with_capacity(k + n);
    for i in 1..=k {
        subs.push(Some(GradedSeries::symbol(ctx, Symbol::U(i as u16))?));
    }
    subs.extend(std::iter::repeat_with(|| None).take(n));
    let with_u = big.substitute(&subs)?;
    // the pairing partner carries swapped lists, which is what makes the
    // ratio the coefficient of the mu-term in the z-expansion
    let swapped = ShlSpec {
        a: spec.b.clone(),
        b: spec.a.clone(),
        q: spec.q.clone(),
        a_zero_at: None,
    };
    let small = eval_shl_symbolic(mu, n, spec, ctx)?;
    let small_swapped = eval_shl_symbolic(mu, n, &swapped, ctx)?;
    let num = shl_pair(&with_u, &small_swapped, n, ctx)?;
    let den = shl_pair(&small, &small_swapped, n, ctx)?;
    let den_inv = den
        .inv()
        .map_err(|_| Error::DegenerateNorm(format!("self-pairing of {mu} is not a unit")))?;
    num.try_mul(&den_inv)
}
