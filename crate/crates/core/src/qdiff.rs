//! q-shift and q-difference operators in point and symbolic modes, the dual
//! operators acting on spin Hall-Littlewood functions (including the
//! epsilon-limit), and the eigenrelation checkers.
//!
//! Symbolic images are returned together with a power `s` such that the
//! returned polynomial equals `q^s` times the true image: shifting by the
//! most negative q-exponent keeps everything inside the graded ring, and
//! identity checks align shifts on both sides.

use std::ops::Neg;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::aux::{AuxLaurent, DEFAULT_WINDOW};
use crate::ring::{Ctx, GradedSeries, LaurentPoly};
use crate::rng::DetRng;
use crate::scalar::Scalar;
use crate::shapes::Partition;
use crate::shl::{eval_shl, ShlSpec};
use crate::sqw::{eval_sqw, ParamLists};
use crate::Rational;

/// The first-order q-difference operators.
#[derive(Debug, Clone)]
pub enum OpKind<S> {
    /// `D_1`: plain q-Whittaker operator (forward q-shift).
    D1,
    /// `D_1` conjugate: backward q-shift with inverted cross ratios.
    D1Bar,
    /// Forward operator dressed with `prod_r (1 - x_i b_r)` factors.
    Db(Vec<S>),
    /// Backward operator dressed with `prod_r (1 - a_r/x_i)` factors.
    DaBar(Vec<S>),
}

impl<S> OpKind<S> {
    fn is_bar(&self) -> bool {
        matches!(self, OpKind::D1Bar | OpKind::DaBar(_))
    }

    fn dressing(&self) -> &[S] {
        match self {
            OpKind::Db(v) | OpKind::DaBar(v) => v,
            _ => &[],
        }
    }
}

fn check_op_arity<S>(op: &OpKind<S>, n: usize) -> Result<()> {
    let len = op.dressing().len();
    if !op.dressing().is_empty() && len != n - 1 {
        return Err(Error::InvalidInput(format!(
            "operator over {n} variables needs a dressing list of length {}, got {len}",
            n - 1
        )));
    }
    Ok(())
}

/// Apply the operator to an evaluator at an exact point. Coordinates must be
/// pairwise distinct and nonzero.
pub fn apply_point<S: Scalar>(
    op: &OpKind<S>,
    f: &dyn Fn(&[S]) -> Result<S>,
    xs: &[S],
    q: &S,
) -> Result<S> {
    let n = xs.len();
    check_op_arity(op, n)?;
    for i in 0..n {
        if xs[i].is_zero() {
            return Err(Error::DegeneratePoint(format!("coordinate {i} is zero")));
        }
        for j in 0..i {
            if xs[i] == xs[j] {
                return Err(Error::DegeneratePoint(format!("coordinates {i} = {j}")));
            }
        }
    }
    let qinv = if op.is_bar() {
        Some(q.try_inv()?)
    } else {
        None
    };
    let mut acc = S::zero();
    for i in 0..n {
        let mut pref = S::one();
        match op {
            OpKind::Db(bs) => {
                for b in bs {
                    pref = pref * (S::one() - xs[i].clone() * b.clone());
                }
            }
            OpKind::DaBar(avs) => {
                let xi_inv = xs[i].try_inv()?;
                for a in avs {
                    pref = pref * (S::one() - a.clone() * xi_inv.clone());
                }
            }
            _ => {}
        }
        for j in 0..n {
            if j == i {
                continue;
            }
            let ratio = if op.is_bar() {
                // 1/(1 - x_j/x_i)
                (S::one() - xs[j].clone() * xs[i].try_inv()?).try_inv()?
            } else {
                // 1/(1 - x_i/x_j)
                (S::one() - xs[i].clone() * xs[j].try_inv()?).try_inv()?
            };
            pref = pref * ratio;
        }
        let mut shifted = xs.to_vec();
        shifted[i] = match &qinv {
            Some(qi) => xs[i].clone() * qi.clone(),
            None => xs[i].clone() * q.clone(),
        };
        acc = acc + pref * f(&shifted)?;
    }
    Ok(acc)
}

/// `q^{pre + dir * e_i}`-weighted q-shift of a Laurent polynomial: the image
/// of `T_{q^{dir}, z_i}` multiplied by `q^pre`. Fails if an exponent would
/// require a negative power of q.
fn t_shift(f: &LaurentPoly, i: usize, q: &GradedSeries, dir: i64, pre: i64) -> Result<LaurentPoly> {
    let mut out = LaurentPoly::zero_n(f.nvars());
    for (e, c) in f.iter_terms() {
        let k = pre + dir * e.get(i).copied().unwrap_or(0) as i64;
        if k < 0 {
            return Err(Error::InvalidInput(format!(
                "q-shift would need q^{k}; increase the alignment power"
            )));
        }
        let nc = c.try_mul(&q.pow_u(k as u64))?;
        if !nc.is_zero() {
            out.insert_add(e.clone(), nc);
        }
    }
    Ok(out)
}

/// Apply the operator to a symmetric Laurent polynomial, clearing the common
/// Vandermonde denominator and dividing exactly. Returns `(s, P)` with
/// `P = q^s * image`; `s = 0` for forward operators on polynomial input.
/// A division failure signals non-symmetric input and is surfaced as-is.
pub fn apply_symbolic(
    op: &OpKind<GradedSeries>,
    f: &LaurentPoly,
    q: &GradedSeries,
    ctx: &Arc<Ctx>,
) -> Result<(i64, LaurentPoly)> {
    let shift = required_shift(op, f);
    let image = apply_symbolic_shifted(op, f, q, ctx, shift)?;
    Ok((shift, image))
}

/// The q-power needed to keep `q^s * image` polynomial in q.
pub fn required_shift(op: &OpKind<GradedSeries>, f: &LaurentPoly) -> i64 {
    let n = f.nvars();
    let mut s: i64 = 0;
    for i in 0..n {
        if op.is_bar() {
            s = s.max(f.max_exp(i) as i64);
        } else {
            s = s.max(-(f.min_exp(i) as i64));
        }
    }
    s
}

/// `q^shift * (op f)` as a Laurent polynomial (shift must be large enough).
pub fn apply_symbolic_shifted(
    op: &OpKind<GradedSeries>,
    f: &LaurentPoly,
    q: &GradedSeries,
    ctx: &Arc<Ctx>,
    shift: i64,
) -> Result<LaurentPoly> {
    let n = f.nvars();
    check_op_arity(op, n)?;
    let one = || LaurentPoly::one_in(ctx, n);
    let var = |i: usize| LaurentPoly::var(ctx, n, i);
    let dir: i64 = if op.is_bar() { -1 } else { 1 };
    let mut num = LaurentPoly::zero_n(n);
    for i in 0..n {
        // dressing factors
        let mut term = one();
        match op {
            OpKind::Db(bs) => {
                for b in bs {
                    term = term.try_mul(&(one() - var(i).scale_series(b)?))?;
                }
            }
            OpKind::DaBar(avs) => {
                // prod_r (1 - a_r/z_i) * z_i^{n-1} = prod_r (z_i - a_r)
                for a in avs {
                    term = term.try_mul(&(var(i) - LaurentPoly::constant(n, a.clone())))?;
                }
            }
            OpKind::D1Bar => {
                // bare z_i^{n-1} from clearing 1/(1 - z_j/z_i)
                let mut e = vec![0i32; n];
                e[i] = (n as i32) - 1;
                term = term.try_mul(&LaurentPoly::monomial(
                    n,
                    &e,
                    GradedSeries::constant(ctx, Rational::one()),
                ))?;
            }
            OpKind::D1 => {}
        }
        if let OpKind::DaBar(avs) = op {
            // the z_i^{n-1} was consumed by (z_i - a_r) factors; any excess
            // over the dressing length stays as a monomial
            let excess = (n as i32 - 1) - avs.len() as i32;
            if excess > 0 {
                let mut e = vec![0i32; n];
                e[i] = excess;
                term = term.try_mul(&LaurentPoly::monomial(
                    n,
                    &e,
                    GradedSeries::constant(ctx, Rational::one()),
                ))?;
            }
        }
        if !op.is_bar() {
            // prod_{j != i} z_j from clearing 1/(1 - z_i/z_j)
            let mut e = vec![0i32; n];
            for (j, item) in e.iter_mut().enumerate() {
                if j != i {
                    *item = 1;
                }
            }
            term = term.try_mul(&LaurentPoly::monomial(
                n,
                &e,
                GradedSeries::constant(ctx, Rational::one()),
            ))?;
        }
        // reduced Vandermonde over the other variables, with the sign from
        // aligning against the full Vandermonde
        let mut red = one();
        for k in 0..n {
            for l in k + 1..n {
                if k == i || l == i {
                    continue;
                }
                red = red.try_mul(&(var(k) - var(l)))?;
            }
        }
        let sign_flips = if op.is_bar() { i } else { n - 1 - i };
        if sign_flips % 2 == 1 {
            red = red.neg();
        }
        term = term.try_mul(&red)?;
        term = term.try_mul(&t_shift(f, i, q, dir, shift)?)?;
        num = num.try_add(&term)?;
    }
    let mut vmd = one();
    for k in 0..n {
        for l in k + 1..n {
            vmd = vmd.try_mul(&(var(k) - var(l)))?;
        }
    }
    num.exact_divide(&vmd)
}

/// The dual operator acting on `V(m)` through the epsilon limit
/// `lim eps * T_{1/eps, u_j}`: the q-shift convention scales, so each term
/// evaluates at `u_j/eps`, keeps the linear-at-infinity part (which is
/// `u_j` times the top coefficient), and dresses it with
/// `prod_{i<n} (-a_i)(u_j - b_i)/(1 - a_i u_j)`.
pub fn apply_dual_star_n(
    n: usize,
    f: &dyn Fn(&[AuxLaurent]) -> Result<AuxLaurent>,
    us: &[Rational],
    a: &[Rational],
    b: &[Rational],
    q: &Rational,
) -> Result<Rational> {
    if a.len() < n - 1 || b.len() < n - 1 {
        return Err(Error::InvalidInput(format!(
            "dual operator needs n-1 = {} parameter pairs",
            n - 1
        )));
    }
    let m = us.len();
    let mut acc = Rational::zero();
    for j in 0..m {
        let mut cross = Rational::one();
        for l in 0..m {
            if l == j {
                continue;
            }
            let den = us[j].clone() - us[l].clone();
            if den.is_zero() {
                return Err(Error::DegeneratePoint("coincident coordinates".into()));
            }
            cross = cross * (us[j].clone() - q.clone() * us[l].clone()) / den;
        }
        // T_{1/eps, u_j} scales the j-th coordinate: evaluate at u_j/eps
        let mut point: Vec<AuxLaurent> = us
            .iter()
            .map(|u| AuxLaurent::seed(u.clone(), DEFAULT_WINDOW))
            .collect();
        point[j] = AuxLaurent::eps_power(-1, DEFAULT_WINDOW)
            * AuxLaurent::seed(us[j].clone(), DEFAULT_WINDOW);
        let val = f(&point)?;
        let ef = AuxLaurent::eps_power(1, DEFAULT_WINDOW) * val;
        if ef.min_order().map(|o| o < 0).unwrap_or(false) {
            return Err(Error::NotInVSpace(format!(
                "pole of order > 1 at infinity in slot {j}"
            )));
        }
        let limit = ef.coeff(0)?;
        if limit.is_zero() {
            continue;
        }
        let mut dress = Rational::one();
        for i in 0..n - 1 {
            let den = Rational::one() - a[i].clone() * us[j].clone();
            if den.is_zero() {
                return Err(Error::DegeneratePoint("1 - a_i u_j vanishes".into()));
            }
            dress = dress * (-a[i].clone()) * (us[j].clone() - b[i].clone()) / den;
        }
        acc += cross * dress * limit;
    }
    Ok(acc)
}

/// The subset operator `sum_{|I|=r} prod_{i in I, j not in I}
/// (u_j - q u_i)/(u_j - u_i) * f(u with u_I -> 0)`. Evaluation at repeated
/// zeros approaches along `t * w_i` with distinct `w_i` and reads the
/// constant term in `t`.
pub fn apply_dual_star_r(
    r: usize,
    f: &dyn Fn(&[AuxLaurent]) -> Result<AuxLaurent>,
    us: &[Rational],
    q: &Rational,
) -> Result<Rational> {
    let m = us.len();
    if r > m {
        return Err(Error::InvalidInput(format!("subset size {r} exceeds {m}")));
    }
    let mut acc = Rational::zero();
    for subset in subsets(m, r) {
        let mut cross = Rational::one();
        for &i in &subset {
            for j in 0..m {
                if subset.contains(&j) {
                    continue;
                }
                let den = us[j].clone() - us[i].clone();
                if den.is_zero() {
                    return Err(Error::DegeneratePoint("coincident coordinates".into()));
                }
                cross = cross * (us[j].clone() - q.clone() * us[i].clone()) / den;
            }
        }
        let mut point: Vec<AuxLaurent> = us
            .iter()
            .map(|u| AuxLaurent::seed(u.clone(), DEFAULT_WINDOW))
            .collect();
        for (pos, &i) in subset.iter().enumerate() {
            // t * w with distinct small w per zeroed slot
            let w = Rational::new(1.into(), ((pos + 1) as i64).into());
            point[i] =
                AuxLaurent::eps_power(1, DEFAULT_WINDOW) * AuxLaurent::seed(w, DEFAULT_WINDOW);
        }
        let val = f(&point)?;
        if val.min_order().map(|o| o < 0).unwrap_or(false) {
            return Err(Error::DegeneratePoint(
                "function singular along the zero limit".into(),
            ));
        }
        acc += cross * val.coeff(0)?;
    }
    Ok(acc)
}

fn subsets(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, m: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, r, cur, out);
            cur.pop();
        }
    }
    rec(0, m, r, &mut cur, &mut out);
    out
}

/// `e_r(1, q, ..., q^{count-1})`: elementary symmetric polynomial of a
/// geometric list.
pub fn elementary_geometric(r: usize, count: i64, q: &Rational) -> Rational {
    if r == 0 {
        return Rational::one();
    }
    if count <= 0 || (r as i64) > count {
        return Rational::zero();
    }
    let vals: Vec<Rational> = (0..count).map(|k| q.pow_u(k as u64)).collect();
    // e_r via the recurrence over prefixes
    let mut e = vec![Rational::zero(); r + 1];
    e[0] = Rational::one();
    for v in vals {
        for t in (1..=r).rev() {
            let add = e[t - 1].clone() * v.clone();
            e[t] += add;
        }
    }
    e[r].clone()
}

/// Which eigenrelation family a check runs against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenFamily {
    /// Forward operator on the reduced family: eigenvalue `q^{lam_n}`.
    FLambdaN,
    /// Backward operator on the reduced family: eigenvalue `q^{-lam_1}`.
    FLambda1,
    /// Epsilon-limit dual operator on the column family (`a_n = 0`):
    /// eigenvalue `(1 - q^{lam'_n})/(1 - q)`.
    ShlN,
    /// Subset dual operator: eigenvalue `e_r(1, q, .., q^{m - lam'_1 - 1})`.
    ShlR(usize),
}

impl EigenFamily {
    pub fn name(&self) -> String {
        match self {
            EigenFamily::FLambdaN => "f_lambda_n".into(),
            EigenFamily::FLambda1 => "f_lambda_1".into(),
            EigenFamily::ShlN => "shl_n".into(),
            EigenFamily::ShlR(r) => format!("shl_r{r}"),
        }
    }
}

/// Outcome of an eigenrelation check at deterministic rational points.
#[derive(Debug, Clone)]
pub struct EigenReport {
    pub family: String,
    pub lambda: Partition,
    pub n: usize,
    pub points: usize,
    pub pass: bool,
    pub witness: Option<String>,
}

impl EigenReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "family": self.family,
            "lambda": self.lambda.parts(),
            "n": self.n,
            "points": self.points,
            "pass": self.pass,
            "witness": self.witness,
        })
    }
}

const MAX_REDRAWS: usize = 200;

/// Verify `operator f_lambda = eigenvalue * f_lambda` exactly at `trials`
/// deterministic pseudo-random rational points with distinct nonzero
/// coordinates. Draws hitting poles are rejected and redrawn.
pub fn check_eigen(
    family: EigenFamily,
    lam: &Partition,
    n: usize,
    seed: u64,
    trials: usize,
) -> Result<EigenReport> {
    let mut rng = DetRng::new(seed);
    let mut pass = true;
    let mut witness = None;
    for _ in 0..trials {
        let outcome = run_one_trial(family, lam, n, &mut rng)?;
        if let Some(w) = outcome {
            pass = false;
            witness = Some(w);
            break;
        }
    }
    Ok(EigenReport {
        family: family.name(),
        lambda: lam.clone(),
        n,
        points: trials,
        pass,
        witness,
    })
}

fn run_one_trial(
    family: EigenFamily,
    lam: &Partition,
    n: usize,
    rng: &mut DetRng,
) -> Result<Option<String>> {
    for _ in 0..MAX_REDRAWS {
        let q = rng.q_value();
        match family {
            EigenFamily::FLambdaN | EigenFamily::FLambda1 => {
                let params = ParamLists::<Rational> {
                    a: (0..n - 1).map(|_| rng.rational()).collect(),
                    b: (0..n - 1).map(|_| rng.rational()).collect(),
                    q: q.clone(),
                };
                let xs = rng.distinct_point(n);
                let eval = |pt: &[Rational]| eval_sqw(lam, pt, &params);
                let attempt = (|| -> Result<(Rational, Rational)> {
                    let op = match family {
                        EigenFamily::FLambdaN => OpKind::Db(params.b.clone()),
                        _ => OpKind::DaBar(params.a.clone()),
                    };
                    let lhs = apply_point(&op, &eval, &xs, &q)?;
                    let eig = match family {
                        EigenFamily::FLambdaN => q.pow_u(lam.part(n) as u64),
                        _ => q.pow_i(-(lam.part(1) as i64))?,
                    };
                    let rhs = eig * eval(&xs)?;
                    Ok((lhs, rhs))
                })();
                match attempt {
                    Ok((lhs, rhs)) => {
                        if lhs == rhs {
                            return Ok(None);
                        }
                        return Ok(Some(format!("point {xs:?}, q={q}: lhs {lhs} != rhs {rhs}")));
                    }
                    Err(Error::DegeneratePoint(_)) | Err(Error::NotInvertible(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            EigenFamily::ShlN | EigenFamily::ShlR(_) => {
                // here `n` is the column parameter; the variable count is
                // fixed by the caller through the shape's box
                let m = 2.max(lam.len());
                let a: Vec<Rational> = (0..n).map(|_| rng.rational()).collect();
                let b: Vec<Rational> = (0..n).map(|_| rng.rational()).collect();
                let us = rng.distinct_point(m);
                let attempt = (|| -> Result<(Rational, Rational)> {
                    match family {
                        EigenFamily::ShlN => {
                            let spec =
                                ShlSpec::new(a.clone(), b.clone(), q.clone()).with_a_zeroed(n);
                            let aux_spec = embed_spec(&spec);
                            let eval = move |pt: &[AuxLaurent]| eval_shl(lam, pt, &aux_spec);
                            let lhs = apply_dual_star_n(n, &eval, &us, &a, &b, &q)?;
                            let lamc = lam.conjugate();
                            let eig = (Rational::one() - q.pow_u(lamc.part(n) as u64))
                                / (Rational::one() - q.clone());
                            let rhs = eig * eval_shl(lam, &us, &spec)?;
                            Ok((lhs, rhs))
                        }
                        EigenFamily::ShlR(r) => {
                            let spec = ShlSpec::new(a.clone(), b.clone(), q.clone());
                            let aux_spec = embed_spec(&spec);
                            let eval = move |pt: &[AuxLaurent]| eval_shl(lam, pt, &aux_spec);
                            let lhs = apply_dual_star_r(r, &eval, &us, &q)?;
                            let lamc = lam.conjugate();
                            let eig = elementary_geometric(r, m as i64 - lamc.part(1) as i64, &q);
                            let rhs = eig * eval_shl(lam, &us, &spec)?;
                            Ok((lhs, rhs))
                        }
                        _ => unreachable!(),
                    }
                })();
                match attempt {
                    Ok((lhs, rhs)) => {
                        if lhs == rhs {
                            return Ok(None);
                        }
                        return Ok(Some(format!("point {us:?}, q={q}: lhs {lhs} != rhs {rhs}")));
                    }
                    Err(Error::DegeneratePoint(_)) | Err(Error::NotInvertible(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Err(Error::DegeneratePoint(
        "could not find a pole-free sample point".into(),
    ))
}

fn embed_spec(spec: &ShlSpec<Rational>) -> ShlSpec<AuxLaurent> {
    let lift = |v: &Vec<Rational>| v.iter().map(|r| AuxLaurent::constant(r.clone())).collect();
    let mut out = ShlSpec::new(
        lift(&spec.a),
        lift(&spec.b),
        AuxLaurent::constant(spec.q.clone()),
    );
    out.a_zero_at = spec.a_zero_at;
    out
}
