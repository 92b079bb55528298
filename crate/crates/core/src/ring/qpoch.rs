//! q-Pochhammer symbols over any scalar ring.
//!
//! `(x;q)_k = prod_{i=0}^{k-1} (1 - x q^i)` for `k >= 0`, and the two
//! infinite versions used throughout:
//!
//! * `(x;q)_inf  = sum_k (-1)^k q^{k(k-1)/2} x^k / (q;q)_k`
//! * `1/(x;q)_inf = sum_k x^k / (q;q)_k`
//!
//! Both sums are finite in the graded model: each summand eventually
//! truncates to zero, either because `x` carries parameter weight or because
//! of the `q^{k(k-1)/2}` prefactor. Arguments with a nonzero pure-constant
//! part admit no such bound and are rejected.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Hard stop for the expansion loops; generous for any desk-scale cap.
const MAX_EXPANSION_TERMS: u64 = 4096;

/// `(x;q)_k` for `k >= 0`. Negative `k` is only supported through
/// [`qq_reciprocal`].
pub fn qpoch_finite<S: Scalar>(arg: &S, q: &S, k: i64) -> Result<S> {
    if k < 0 {
        return Err(Error::Unsupported(format!(
            "(x;q)_k with k = {k} < 0; use qq_reciprocal for the 1/(q;q)_k convention"
        )));
    }
    let mut acc = S::one();
    let mut qi = S::one();
    for _ in 0..k {
        acc = acc * (S::one() - arg.clone() * qi.clone());
        qi = qi * q.clone();
    }
    Ok(acc)
}

/// The guarded reciprocal convention: `1/(q;q)_k`, defined as 0 for `k < 0`.
///
/// This is the only place negative Pochhammer orders are meaningful; the
/// skew-weight formulas rely on it to kill non-interlacing terms.
pub fn qq_reciprocal<S: Scalar>(q: &S, k: i64) -> Result<S> {
    if k < 0 {
        return Ok(S::zero());
    }
    qpoch_finite(q, q, k)?.try_inv()
}

fn guard_pure_constant<S: Scalar>(arg: &S, what: &str) -> Result<()> {
    if !arg.pure_constant().is_zero() {
        return Err(Error::NonTerminating(format!(
            "{what} of an argument with nonzero constant part"
        )));
    }
    Ok(())
}

/// `(x;q)_inf`, truncated by the grading.
pub fn qpoch_inf<S: Scalar>(arg: &S, q: &S) -> Result<S> {
    guard_pure_constant(arg, "(x;q)_inf")?;
    let mut acc = S::one();
    let mut x_pow = S::one();
    let mut q_tri = S::one(); // q^{k(k-1)/2}
    let mut q_pow = S::one(); // q^{k-1} factor feeding the triangular power
    let mut qq = S::one(); // (q;q)_k
    let mut sign = false;
    for k in 1..=MAX_EXPANSION_TERMS {
        x_pow = x_pow * arg.clone();
        if k > 1 {
            q_pow = q_pow * q.clone();
            q_tri = q_tri * q_pow.clone();
        }
        let core = q_tri.clone() * x_pow.clone();
        if core.is_zero() {
            return Ok(acc);
        }
        qq = qq * (S::one() - q.pow_u(k));
        sign = !sign;
        let term = core * qq.try_inv()?;
        acc = if sign { acc - term } else { acc + term };
    }
    Err(Error::NonTerminating(
        "(x;q)_inf expansion exceeded the iteration bound".into(),
    ))
}

/// `1/(x;q)_inf = sum_k x^k/(q;q)_k`, truncated by the grading.
///
/// Terminates only when powers of the argument vanish under the cap, i.e.
/// every term of `x` must carry parameter weight.
pub fn inv_qpoch_inf<S: Scalar>(arg: &S, q: &S) -> Result<S> {
    guard_pure_constant(arg, "1/(x;q)_inf")?;
    let mut acc = S::one();
    let mut x_pow = S::one();
    let mut qq = S::one();
    for k in 1..=MAX_EXPANSION_TERMS {
        x_pow = x_pow * arg.clone();
        if x_pow.is_zero() {
            return Ok(acc);
        }
        qq = qq * (S::one() - q.pow_u(k));
        acc = acc + x_pow.clone() * qq.try_inv()?;
    }
    Err(Error::NonTerminating(
        "1/(x;q)_inf expansion exceeded the iteration bound".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::alphabet::{Ctx, Symbol};
    use crate::ring::laurent::LaurentPoly;
    use crate::ring::series::GradedSeries;
    use crate::Rational;
    use num_traits::{One, Zero};

    #[test]
    fn finite_pochhammer_expansions() {
        // (z;q)_2 = 1 - z - z q + z^2 q over Laurent z
        let c = Ctx::ab(1, 1, 6);
        let one = GradedSeries::constant(&c, Rational::one());
        let q = GradedSeries::symbol(&c, Symbol::Q).unwrap();
        let z = LaurentPoly::var(&c, 1, 0);
        let qp = LaurentPoly::constant(1, q.clone());
        let got = qpoch_finite(&z, &qp, 2).unwrap();
        let expect =
            LaurentPoly::constant(1, one.clone()) - z.clone() - z.scale_series(&q).unwrap()
                + (z.clone() * z.clone()).scale_series(&q).unwrap();
        assert_eq!(got, expect);

        // (z;q)_0 = 1
        assert!(qpoch_finite(&z, &qp, 0).unwrap().is_one());

        // (a1 b1;q)_1 = 1 - a1 b1 over series
        let a = GradedSeries::symbol(&c, Symbol::A(1)).unwrap();
        let b = GradedSeries::symbol(&c, Symbol::B(1)).unwrap();
        let ab = a * b;
        let got = qpoch_finite(&ab, &q, 1).unwrap();
        assert_eq!(got, one - ab);

        assert!(matches!(
            qpoch_finite(&z, &qp, -1),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn qq_reciprocal_convention() {
        let c = Ctx::ab(0, 0, 4);
        let q = GradedSeries::symbol(&c, Symbol::Q).unwrap();
        assert!(qq_reciprocal(&q, -3).unwrap().is_zero());
        assert!(qq_reciprocal(&q, 0).unwrap().is_one());
        // 1/(q;q)_1 * (1-q) = 1
        let r = qq_reciprocal(&q, 1).unwrap();
        let one = GradedSeries::constant(&c, Rational::one());
        assert_eq!(r * (one.clone() - q), one);
    }

    #[test]
    fn euler_pentagonal_truncation() {
        // (q;q)_inf at D=3 agrees with the pentagonal-number series
        // oracle sum_{k in Z} (-1)^k q^{k(3k-1)/2} = 1 - q - q^2 + q^5 + ...
        let c = Ctx::ab(0, 0, 3);
        let q = GradedSeries::symbol(&c, Symbol::Q).unwrap();
        let got = qpoch_inf(&q, &q).unwrap();
        let mut expect = GradedSeries::constant(&c, Rational::one());
        for k in 1i64..=3 {
            for sgn in [k, -k] {
                let e = sgn * (3 * sgn - 1) / 2;
                if e >= 0 && (e as u32) <= 3 {
                    let term = q.pow_u(e as u64).scale(&Rational::from_integer(
                        (if k % 2 == 1 { -1 } else { 1 }).into(),
                    ));
                    expect = expect + term;
                }
            }
        }
        assert_eq!(got, expect); // 1 - q - q^2
    }

    #[test]
    fn qpoch_inf_small_arguments() {
        // (a1;q)_inf at D=2 -> 1 - a1 - a1 q
        let c = Ctx::ab(1, 0, 2);
        let q = GradedSeries::symbol(&c, Symbol::Q).unwrap();
        let a = GradedSeries::symbol(&c, Symbol::A(1)).unwrap();
        let got = qpoch_inf(&a, &q).unwrap();
        let expect = GradedSeries::constant(&c, Rational::one()) - a.clone() - a * q;
        assert_eq!(got, expect);

        // (z1/z2;q)_inf at D=0 -> 1 - z1/z2
        let c0 = Ctx::ab(0, 0, 0);
        let one = GradedSeries::constant(&c0, Rational::one());
        let q0 = LaurentPoly::constant(2, GradedSeries::symbol(&c0, Symbol::Q).unwrap());
        let m = LaurentPoly::monomial(2, &[1, -1], one.clone());
        let got = qpoch_inf(&m, &q0).unwrap();
        assert_eq!(got, LaurentPoly::constant(2, one) - m);
    }

    #[test]
    fn nonzero_constant_rejected() {
        let c = Ctx::ab(0, 0, 4);
        let q = GradedSeries::symbol(&c, Symbol::Q).unwrap();
        let half = GradedSeries::constant(&c, Rational::new(1.into(), 2.into()));
        assert!(matches!(
            qpoch_inf(&half, &q),
            Err(Error::NonTerminating(_))
        ));
        assert!(matches!(
            inv_qpoch_inf(&half, &q),
            Err(Error::NonTerminating(_))
        ));
    }

    #[test]
    fn inverse_pochhammer_is_inverse() {
        // (x;q)_inf * 1/(x;q)_inf = 1 for x = a1 b1
        let c = Ctx::ab(1, 1, 6);
        let q = GradedSeries::symbol(&c, Symbol::Q).unwrap();
        let x = GradedSeries::symbol(&c, Symbol::A(1)).unwrap()
            * GradedSeries::symbol(&c, Symbol::B(1)).unwrap();
        let p = qpoch_inf(&x, &q).unwrap();
        let ip = inv_qpoch_inf(&x, &q).unwrap();
        assert!((p * ip).is_one());
    }
}
