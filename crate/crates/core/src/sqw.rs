//! Spin q-Whittaker polynomials: skew weights, branching evaluation over any
//! scalar ring, duals, monomial expansion, and expansion of symmetric
//! polynomials in the spin q-Whittaker basis.
//!
//! Two variants exist. The *reduced* family (lists of length n-1, obtained
//! by zeroing the last inhomogeneity) carries the shift property and extends
//! to Laurent polynomials labeled by signatures; the *full* family keeps
//! lists of length n. Both are evaluated by the same interlacing-chain
//! dynamic program, memoized per (shape, level).

#![allow(clippy::needless_range_loop)] // index loops pair multiple arrays

use std::collections::{BTreeMap, HashMap};
use std::ops::Neg;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::qpoch::{qpoch_finite, qq_reciprocal};
use crate::ring::{Ctx, GradedSeries, LaurentPoly, Symbol};
use crate::scalar::Scalar;
use crate::shapes::{
    enumerate_box, enumerate_interlacing, enumerate_interlacing_sig, interlaces, interlaces_sig,
    revlex_cmp, Partition, Signature,
};
use num_traits::Zero;

#[cfg(test)]
use crate::Rational;

/// Which spin q-Whittaker family is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Lists of length n-1; has the shift property and signature extension.
    Reduced,
    /// Lists of length n.
    Full,
}

/// Inhomogeneity parameter lists plus the ambient deformation parameter.
#[derive(Debug, Clone)]
pub struct ParamLists<S> {
    pub a: Vec<S>,
    pub b: Vec<S>,
    pub q: S,
}

impl<S: Scalar> ParamLists<S> {
    pub fn new(a: Vec<S>, b: Vec<S>, q: S) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidInput(format!(
                "parameter lists must have equal length: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        Ok(ParamLists { a, b, q })
    }

    /// Swap the roles of the two lists.
    pub fn swapped(&self) -> Self {
        ParamLists {
            a: self.b.clone(),
            b: self.a.clone(),
            q: self.q.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

impl ParamLists<GradedSeries> {
    /// Symbolic lists `a1..a_n`, `b1..b_n` with the symbolic `q`.
    pub fn symbols(ctx: &Arc<Ctx>, n: usize) -> Result<Self> {
        let a = (1..=n)
            .map(|i| GradedSeries::symbol(ctx, Symbol::A(i as u16)))
            .collect::<Result<Vec<_>>>()?;
        let b = (1..=n)
            .map(|i| GradedSeries::symbol(ctx, Symbol::B(i as u16)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ParamLists {
            a,
            b,
            q: GradedSeries::symbol(ctx, Symbol::Q)?,
        })
    }

    /// Zero lists of length `n` (the q-Whittaker reduction) with symbolic q.
    pub fn zeros(ctx: &Arc<Ctx>, n: usize) -> Result<Self> {
        let z = vec![GradedSeries::zero_in(ctx); n];
        Ok(ParamLists {
            a: z.clone(),
            b: z,
            q: GradedSeries::symbol(ctx, Symbol::Q)?,
        })
    }

    /// Embed the series parameters as z-free Laurent coefficients.
    pub fn embed_laurent(&self, nvars: usize) -> ParamLists<LaurentPoly> {
        let lift = |v: &Vec<GradedSeries>| {
            v.iter()
                .map(|s| LaurentPoly::constant(nvars, s.clone()))
                .collect()
        };
        ParamLists {
            a: lift(&self.a),
            b: lift(&self.b),
            q: LaurentPoly::constant(nvars, self.q.clone()),
        }
    }
}

/// Single-variable skew weight shared by both families. `a`, `b` are the
/// level lists (equal length); the indicator `1_{mu <= lam}` is built in.
///
/// The `(a_r/x;q)` factors are folded into the `x` prefactor so partitions
/// never require an inverse of `x`; the leftover power is `lam_{len+1}`.
pub fn skew_weight<S: Scalar>(
    lam: &Partition,
    mu: &Partition,
    x: &S,
    a: &[S],
    b: &[S],
    q: &S,
) -> Result<S> {
    if !interlaces(mu, lam) {
        return Ok(S::zero());
    }
    let parts_l: Vec<i64> = (1..=a.len() + 1).map(|i| lam.part(i) as i64).collect();
    let parts_m: Vec<i64> = (1..=a.len()).map(|i| mu.part(i) as i64).collect();
    skew_weight_parts(&parts_l, &parts_m, x, a, b, q)
}

/// Skew weight for signatures (`lam` of length n, `mu` of length n-1).
pub fn skew_weight_sig<S: Scalar>(
    lam: &Signature,
    mu: &Signature,
    x: &S,
    a: &[S],
    b: &[S],
    q: &S,
) -> Result<S> {
    if !interlaces_sig(mu, lam) {
        return Ok(S::zero());
    }
    if a.len() != lam.len() - 1 {
        return Err(Error::InvalidInput(format!(
            "signature skew weight needs lists of length {}, got {}",
            lam.len() - 1,
            a.len()
        )));
    }
    skew_weight_parts(lam.parts(), mu.parts(), x, a, b, q)
}

fn skew_weight_parts<S: Scalar>(
    lam: &[i64],
    mu: &[i64],
    x: &S,
    a: &[S],
    b: &[S],
    q: &S,
) -> Result<S> {
    let ell = a.len();
    debug_assert_eq!(b.len(), ell);
    let get = |v: &[i64], i: usize| -> i64 {
        if i >= 1 && i <= v.len() {
            v[i - 1]
        } else {
            0
        }
    };
    let mut w = S::one();
    for r in 1..=ell {
        let dl = get(lam, r) - get(mu, r);
        let dm = get(mu, r) - get(lam, r + 1);
        let dd = get(lam, r) - get(lam, r + 1);
        debug_assert!(dl >= 0 && dm >= 0 && dd >= 0);
        // x^{dl} (a_r/x;q)_{dl} = prod_{i<dl} (x - a_r q^i)
        let mut qi = S::one();
        for _ in 0..dl {
            w = w * (x.clone() - a[r - 1].clone() * qi.clone());
            qi = qi * q.clone();
        }
        w = w * qpoch_finite(&(x.clone() * b[r - 1].clone()), q, dm)?;
        w = w * qpoch_finite(q, q, dd)?;
        w = w * qq_reciprocal(q, dl)?;
        w = w * qq_reciprocal(q, dm)?;
        w = w * qpoch_finite(&(a[r - 1].clone() * b[r - 1].clone()), q, dd)?.try_inv()?;
    }
    // leftover x power: |lam| - |mu| - sum_r dl_r = lam_{ell+1}
    let leftover = get(lam, ell + 1);
    Ok(w * x.pow_i(leftover)?)
}

/// Skew weight of the full family (top-level lists of length n).
pub fn skew_weight_full<S: Scalar>(
    lam: &Partition,
    mu: &Partition,
    x: &S,
    params: &ParamLists<S>,
) -> Result<S> {
    skew_weight(lam, mu, x, &params.a, &params.b, &params.q)
}

/// Skew weight of the reduced family (lists of length n-1).
pub fn skew_weight_reduced<S: Scalar>(
    lam: &Partition,
    mu: &Partition,
    x: &S,
    params: &ParamLists<S>,
) -> Result<S> {
    skew_weight(lam, mu, x, &params.a, &params.b, &params.q)
}

fn branch_eval<S: Scalar>(
    lam: &Partition,
    xs: &[S],
    a: &[S],
    b: &[S],
    q: &S,
    memo: &mut HashMap<(Vec<u32>, usize), S>,
) -> Result<S> {
    let level = xs.len();
    if level == 0 {
        return Ok(if lam.is_empty() { S::one() } else { S::zero() });
    }
    let key = (lam.parts().to_vec(), level);
    if let Some(v) = memo.get(&key) {
        return Ok(v.clone());
    }
    let mut acc = S::zero();
    for mu in enumerate_interlacing(lam, level - 1) {
        let w = skew_weight(lam, &mu, &xs[level - 1], a, b, q)?;
        if w.is_zero() {
            continue;
        }
        let child_a = if a.is_empty() { a } else { &a[1..] };
        let child_b = if b.is_empty() { b } else { &b[..b.len() - 1] };
        let sub = branch_eval(&mu, &xs[..level - 1], child_a, child_b, q, memo)?;
        acc = acc + sub * w;
    }
    memo.insert(key, acc.clone());
    Ok(acc)
}

fn check_lists<S: Scalar>(params: &ParamLists<S>, want: usize, what: &str) -> Result<()> {
    if params.len() != want {
        return Err(Error::InvalidInput(format!(
            "{what} in {} variables needs parameter lists of length {want}, got {}",
            if what.contains("reduced") {
                want + 1
            } else {
                want
            },
            params.len()
        )));
    }
    Ok(())
}

/// Reduced-family evaluation at a point (lists of length n-1).
/// Shapes longer than the variable count evaluate to zero.
pub fn eval_sqw<S: Scalar>(lam: &Partition, xs: &[S], params: &ParamLists<S>) -> Result<S> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("need at least one variable".into()));
    }
    check_lists(params, xs.len() - 1, "reduced spin q-Whittaker")?;
    let mut memo = HashMap::new();
    branch_eval(lam, xs, &params.a, &params.b, &params.q, &mut memo)
}

/// Full-family evaluation at a point (lists of length n).
pub fn eval_sqw_full<S: Scalar>(lam: &Partition, xs: &[S], params: &ParamLists<S>) -> Result<S> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("need at least one variable".into()));
    }
    check_lists(params, xs.len(), "full spin q-Whittaker")?;
    if lam.len() > xs.len() {
        return Ok(S::zero());
    }
    let mut memo = HashMap::new();
    branch_eval(lam, xs, &params.a, &params.b, &params.q, &mut memo)
}

/// Family dispatch used by the expansion drivers and the CLI.
pub fn eval_variant<S: Scalar>(
    variant: Variant,
    lam: &Partition,
    xs: &[S],
    params: &ParamLists<S>,
) -> Result<S> {
    match variant {
        Variant::Reduced => eval_sqw(lam, xs, params),
        Variant::Full => eval_sqw_full(lam, xs, params),
    }
}

/// Signature-labeled Laurent evaluation, defined by the shift relation
/// applied to `lam - lam_n * (1..1)`.
pub fn eval_sqw_sig<S: Scalar>(lam: &Signature, xs: &[S], params: &ParamLists<S>) -> Result<S> {
    if lam.len() != xs.len() {
        return Err(Error::InvalidInput(format!(
            "signature of length {} at a point of {} coordinates",
            lam.len(),
            xs.len()
        )));
    }
    let (red, shift) = lam.reduce();
    let base = eval_sqw(&red, xs, params)?;
    let mut prod = S::one();
    for x in xs {
        prod = prod * x.clone();
    }
    Ok(base * prod.pow_i(shift)?)
}

/// Signature evaluation by direct branching over signature chains.
/// Kept as an independent route; equality with [`eval_sqw_sig`] is a test.
pub fn eval_sqw_sig_by_branching<S: Scalar>(
    lam: &Signature,
    xs: &[S],
    params: &ParamLists<S>,
) -> Result<S> {
    let n = lam.len();
    if xs.len() != n {
        return Err(Error::InvalidInput(
            "point size must match signature length".into(),
        ));
    }
    check_lists(params, n - 1, "signature branching")?;
    if n == 1 {
        return xs[0].pow_i(lam.part(1));
    }
    let mut acc = S::zero();
    for mu in enumerate_interlacing_sig(lam) {
        let w = skew_weight_sig(lam, &mu, &xs[n - 1], &params.a, &params.b, &params.q)?;
        if w.is_zero() {
            continue;
        }
        let child = ParamLists {
            a: params.a[1..].to_vec(),
            b: params.b[..params.b.len() - 1].to_vec(),
            q: params.q.clone(),
        };
        let sub = eval_sqw_sig_by_branching(&mu, &xs[..n - 1], &child)?;
        acc = acc + sub * w;
    }
    Ok(acc)
}

/// The dual normalization `psi_lambda(a_m, b_m) =
/// prod_r (a_r b_r;q)_{lam_r - lam_{r+1}} / (q;q)_{lam_r - lam_{r+1}}`.
pub fn dual_norm_psi<S: Scalar>(lam: &Partition, params: &ParamLists<S>) -> Result<S> {
    let m = params.len();
    if lam.len() > m {
        return Err(Error::InvalidInput(format!(
            "psi needs length(lambda) <= {m}, got {}",
            lam.len()
        )));
    }
    let mut w = S::one();
    for r in 1..=m {
        let d = lam.part(r) as i64 - lam.part(r + 1) as i64;
        if d == 0 {
            continue;
        }
        let ab = params.a[r - 1].clone() * params.b[r - 1].clone();
        w = w * qpoch_finite(&ab, &params.q, d)?;
        w = w * qq_reciprocal(&params.q, d)?;
    }
    Ok(w)
}

/// Dual spin q-Whittaker polynomial: `psi_lambda * (full family)`.
/// Zero when the shape is longer than the variable count.
pub fn eval_sqw_dual<S: Scalar>(lam: &Partition, ys: &[S], params: &ParamLists<S>) -> Result<S> {
    if lam.len() > ys.len() {
        return Ok(S::zero());
    }
    let f = eval_sqw_full(lam, ys, params)?;
    let psi = dual_norm_psi(lam, params)?;
    Ok(psi * f)
}

/// A symmetric polynomial stored in the monomial basis `m_mu` with graded
/// series coefficients. Equality compares the term maps.
#[derive(Debug, Clone)]
pub struct SymPoly {
    nvars: usize,
    terms: BTreeMap<Partition, GradedSeries>,
}

impl PartialEq for SymPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl SymPoly {
    pub fn zero(nvars: usize) -> Self {
        SymPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn coeff(&self, mu: &Partition) -> GradedSeries {
        self.terms
            .get(mu)
            .cloned()
            .unwrap_or_else(GradedSeries::zero)
    }

    pub fn iter_terms(&self) -> impl Iterator<Item = (&Partition, &GradedSeries)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest first part over the support.
    pub fn max_part(&self) -> u32 {
        self.terms.keys().map(|p| p.part(1)).max().unwrap_or(0)
    }

    pub fn insert(&mut self, mu: Partition, c: GradedSeries) {
        if mu.len() > self.nvars {
            panic!("monomial key longer than the variable count");
        }
        if !c.is_zero() {
            self.terms.insert(mu, c);
        }
    }

    /// Collect a symmetric Laurent polynomial (non-negative exponents) into
    /// the monomial basis; errors if the input is not symmetric.
    pub fn from_laurent(p: &LaurentPoly) -> Result<SymPoly> {
        let n = p.nvars();
        let mut grouped: BTreeMap<Partition, (GradedSeries, usize)> = BTreeMap::new();
        for (e, c) in p.iter_terms() {
            if e.iter().any(|&x| x < 0) {
                return Err(Error::InvalidInput(
                    "cannot collect a Laurent polynomial with negative exponents".into(),
                ));
            }
            let mut sorted: Vec<u32> = e.iter().map(|&x| x as u32).collect();
            sorted.sort_unstable_by(|x, y| y.cmp(x));
            let key = Partition::new_unchecked(sorted);
            match grouped.entry(key) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert((c.clone(), 1));
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    if &o.get().0 != c {
                        return Err(Error::InvalidInput("polynomial is not symmetric".into()));
                    }
                    o.get_mut().1 += 1;
                }
            }
        }
        let mut out = SymPoly::zero(n);
        for (mu, (c, count)) in grouped {
            if count != orbit_size(&mu, n) {
                return Err(Error::InvalidInput("polynomial is not symmetric".into()));
            }
            out.insert(mu, c);
        }
        Ok(out)
    }

    /// Expand back into a Laurent polynomial over `nvars` variables.
    pub fn to_laurent(&self) -> LaurentPoly {
        let mut out = LaurentPoly::zero_n(self.nvars);
        for (mu, c) in &self.terms {
            for perm in distinct_permutations(mu, self.nvars) {
                out.insert_add(trim(perm), c.clone());
            }
        }
        out
    }

    pub fn add(&self, rhs: &SymPoly) -> Result<SymPoly> {
        if self.nvars != rhs.nvars {
            return Err(Error::VariableMismatch {
                expected: self.nvars,
                got: rhs.nvars,
            });
        }
        let mut out = self.clone();
        for (mu, c) in &rhs.terms {
            let sum = out.coeff(mu).try_add(c)?;
            if sum.is_zero() {
                out.terms.remove(mu);
            } else {
                out.terms.insert(mu.clone(), sum);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &SymPoly) -> Result<SymPoly> {
        let prod = self.to_laurent().try_mul(&rhs.to_laurent())?;
        SymPoly::from_laurent(&prod)
    }

    pub fn scale_series(&self, s: &GradedSeries) -> Result<SymPoly> {
        let mut out = SymPoly::zero(self.nvars);
        for (mu, c) in &self.terms {
            out.insert(mu.clone(), c.try_mul(s)?);
        }
        Ok(out)
    }

    /// Evaluate at series values (e.g. the auxiliary `u`/`y` symbols).
    pub fn eval_series(&self, vals: &[GradedSeries]) -> Result<GradedSeries> {
        if vals.len() != self.nvars {
            return Err(Error::VariableMismatch {
                expected: self.nvars,
                got: vals.len(),
            });
        }
        let subs: Vec<Option<GradedSeries>> = vals.iter().cloned().map(Some).collect();
        Ok(self.to_laurent().substitute(&subs)?.constant_term())
    }

    /// `{"n": .., "basis": "monomial", "terms": [{"mu": [...], "coeff": ...}]}`
    pub fn to_json(&self, ctx: &Arc<Ctx>) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(mu, c)| {
                serde_json::json!({
                    "mu": mu.parts(),
                    "coeff": c.to_json(ctx),
                })
            })
            .collect();
        serde_json::json!({
            "n": self.nvars,
            "basis": "monomial",
            "terms": terms,
        })
    }

    pub fn from_json(ctx: &Arc<Ctx>, v: &serde_json::Value) -> Result<SymPoly> {
        let n = v
            .get("n")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::InvalidInput("sympoly JSON lacks n".into()))?
            as usize;
        let mut out = SymPoly::zero(n);
        for t in v
            .get("terms")
            .and_then(|x| x.as_array())
            .unwrap_or(&Vec::new())
        {
            let mu = t
                .get("mu")
                .and_then(|x| x.as_array())
                .ok_or_else(|| Error::InvalidInput("term lacks mu".into()))?
                .iter()
                .map(|p| p.as_u64().map(|v| v as u32))
                .collect::<Option<Vec<u32>>>()
                .ok_or_else(|| Error::InvalidInput("bad mu".into()))?;
            let c = GradedSeries::from_json(
                ctx,
                t.get("coeff")
                    .ok_or_else(|| Error::InvalidInput("term lacks coeff".into()))?,
            )?;
            out.insert(Partition::new(mu)?, c);
        }
        Ok(out)
    }
}

fn trim(mut e: Vec<i32>) -> Vec<i32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

fn orbit_size(mu: &Partition, n: usize) -> usize {
    // n! / prod(multiplicities!)
    let mut counts: HashMap<u32, u64> = HashMap::new();
    for i in 1..=n {
        *counts.entry(mu.part(i)).or_insert(0) += 1;
    }
    let fact = |k: u64| (1..=k).product::<u64>().max(1);
    let denom: u64 = counts.values().map(|&c| fact(c)).product();
    (fact(n as u64) / denom) as usize
}

fn distinct_permutations(mu: &Partition, n: usize) -> Vec<Vec<i32>> {
    let mut base: Vec<i32> = (1..=n).map(|i| mu.part(i) as i32).collect();
    base.sort_unstable();
    let mut out = vec![base.clone()];
    while next_permutation(&mut base) {
        out.push(base.clone());
    }
    out
}

fn next_permutation(v: &mut [i32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Expand a family member into the monomial basis by running the branching
/// dynamic program over the Laurent ring in the `x` variables.
pub fn expand_monomial(
    variant: Variant,
    lam: &Partition,
    n: usize,
    params: &ParamLists<GradedSeries>,
    ctx: &Arc<Ctx>,
) -> Result<SymPoly> {
    let lifted = params.embed_laurent(n);
    let xs: Vec<LaurentPoly> = (0..n).map(|i| LaurentPoly::var(ctx, n, i)).collect();
    let value = eval_variant(variant, lam, &xs, &lifted)?;
    let mut sp = SymPoly::from_laurent(&value)?;
    sp.nvars = n; // constants collapse to zero variables
    Ok(sp)
}

/// Coefficients `c_lambda` with `p = sum c_lambda * family_lambda`, solved by
/// Gaussian elimination against the monomial-expansion transition matrix
/// over `Box(L, n)` (revlex-descending order; pivots are units because the
/// matrix is unitriangular at the origin).
pub fn expand_in_basis(
    variant: Variant,
    p: &SymPoly,
    n: usize,
    params: &ParamLists<GradedSeries>,
    ctx: &Arc<Ctx>,
) -> Result<BTreeMap<Partition, GradedSeries>> {
    let l = p.max_part();
    let mut basis = enumerate_box(l, n as u32);
    basis.sort_by(|x, y| revlex_cmp(y, x));
    let k = basis.len();
    let expansions: Vec<SymPoly> = basis
        .iter()
        .map(|lam| expand_monomial(variant, lam, n, params, ctx))
        .collect::<Result<Vec<_>>>()?;
    // Solve sum_i c_i * A[i][j] = p_j over the same box of monomial labels.
    let mut mat: Vec<Vec<GradedSeries>> = vec![vec![GradedSeries::zero(); k + 1]; k];
    for (j, mu) in basis.iter().enumerate() {
        for i in 0..k {
            mat[j][i] = expansions[i].coeff(mu);
        }
        mat[j][k] = p.coeff(mu);
    }
    // check that p is supported inside the box
    for (mu, _) in p.iter_terms() {
        if !basis.contains(mu) {
            return Err(Error::InvalidInput(format!(
                "polynomial has support {mu} outside Box({l},{n})"
            )));
        }
    }
    // forward elimination; diagonal pivots stay units in the truncated ring
    for col in 0..k {
        let pivot_inv = mat[col][col]
            .inv()
            .map_err(|_| Error::SingularTransition(format!("pivot at {}", basis[col])))?;
        for row in 0..k {
            if row == col {
                continue;
            }
            let factor = mat[row][col].try_mul(&pivot_inv)?;
            if factor.is_zero() {
                continue;
            }
            for t in col..=k {
                let delta = factor.try_mul(&mat[col][t])?;
                mat[row][t] = mat[row][t].try_add(&delta.neg())?;
            }
        }
    }
    let mut out = BTreeMap::new();
    for (i, lam) in basis.iter().enumerate() {
        let pivot_inv = mat[i][i]
            .inv()
            .map_err(|_| Error::SingularTransition(format!("pivot at {}", basis[i])))?;
        let c = mat[i][k].try_mul(&pivot_inv)?;
        if !c.is_zero() {
            out.insert(lam.clone(), c);
        }
    }
    Ok(out)
}
