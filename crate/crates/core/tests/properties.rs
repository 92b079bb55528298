//! Property-based invariants of the arithmetic substrate and the
//! combinatorial layer.

use num_traits::{One, Zero};
use proptest::prelude::*;
use std::sync::Arc;

use sqwhit_core::ring::qpoch::{qpoch_finite, qpoch_inf};
use sqwhit_core::ring::{Ctx, GradedSeries, LaurentPoly, Symbol};
use sqwhit_core::scalar::Scalar;
use sqwhit_core::shapes::{
    enumerate_box, enumerate_interlacing, interlaces, revlex_cmp, Partition,
};
use sqwhit_core::Rational;

fn ctx() -> Arc<Ctx> {
    Ctx::ab(1, 1, 4)
}

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=9).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

/// A small random series over {q, a1, b1} at cap 4.
fn series_strategy() -> impl Strategy<Value = GradedSeries> {
    let term = (0u16..=2, 0u16..=2, 0u16..=2, rational_strategy());
    proptest::collection::vec(term, 0..4).prop_map(|terms| {
        let c = ctx();
        let mut acc = GradedSeries::zero_in(&c);
        for (eq, ea, eb, coeff) in terms {
            let m = GradedSeries::monomial(
                &c,
                &[(Symbol::Q, eq), (Symbol::A(1), ea), (Symbol::B(1), eb)],
                coeff,
            )
            .unwrap();
            acc = acc + m;
        }
        acc
    })
}

fn unit_series_strategy() -> impl Strategy<Value = GradedSeries> {
    series_strategy().prop_map(|s| {
        let c = ctx();
        let base = GradedSeries::constant(&c, Rational::one());
        if s.constant_term().is_zero() {
            base + s
        } else {
            s
        }
    })
}

fn partition_strategy() -> impl Strategy<Value = Partition> {
    proptest::collection::vec(0u32..=4, 0..5).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new_unchecked(v)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_ring_axioms(a in series_strategy(), b in series_strategy(), c in series_strategy()) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(
            a.clone() * (b.clone() + c.clone()),
            a.clone() * b.clone() + a.clone() * c.clone()
        );
    }

    #[test]
    fn unit_inverse_round_trip(s in unit_series_strategy()) {
        let inv = s.inv().unwrap();
        prop_assert!((s * inv).is_one());
    }

    #[test]
    fn pochhammer_cocycle(s in series_strategy(), j in 0i64..4, k in 0i64..4) {
        // (x;q)_{j+k} = (x;q)_j (x q^j;q)_k
        let c = ctx();
        let q = GradedSeries::symbol(&c, Symbol::Q).unwrap();
        let lhs = qpoch_finite(&s, &q, j + k).unwrap();
        let shifted = s.clone() * q.pow_u(j as u64);
        let rhs = qpoch_finite(&s, &q, j).unwrap() * qpoch_finite(&shifted, &q, k).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn infinite_pochhammer_peeling(k in 0u64..3) {
        // (x;q)_inf = (x;q)_k (x q^k;q)_inf for x = a1 b1
        let c = ctx();
        let q = GradedSeries::symbol(&c, Symbol::Q).unwrap();
        let x = GradedSeries::symbol(&c, Symbol::A(1)).unwrap()
            * GradedSeries::symbol(&c, Symbol::B(1)).unwrap();
        let lhs = qpoch_inf(&x, &q).unwrap();
        let shifted = x.clone() * q.pow_u(k);
        let rhs = qpoch_finite(&x, &q, k as i64).unwrap() * qpoch_inf(&shifted, &q).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn constant_term_is_linear(
        a in rational_strategy(),
        b in rational_strategy(),
        e1 in proptest::collection::vec(-2i32..=2, 2),
        e2 in proptest::collection::vec(-2i32..=2, 2),
    ) {
        let c = ctx();
        let p1 = LaurentPoly::monomial(2, &e1, GradedSeries::constant(&c, a.clone()));
        let p2 = LaurentPoly::monomial(2, &e2, GradedSeries::constant(&c, b.clone()));
        let sum = p1.try_add(&p2).unwrap();
        let lhs = sum.constant_term();
        let rhs = p1.constant_term() + p2.constant_term();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn self_pairing_is_sum_of_squares(coeffs in proptest::collection::vec(rational_strategy(), 1..5)) {
        // constant_term(p(z) p(1/z)) = sum of squared coefficients for
        // parameter-free Laurent p
        let c = ctx();
        let mut p = LaurentPoly::zero_n(2);
        for (k, r) in coeffs.iter().enumerate() {
            let e = [k as i32 - 2, 1 - k as i32];
            p = p.try_add(&LaurentPoly::monomial(2, &e, GradedSeries::constant(&c, r.clone()))).unwrap();
        }
        let ct = p.try_mul(&p.invert_z()).unwrap().constant_term().constant_term();
        let expect: Rational = coeffs.iter().map(|r| r * r).sum();
        prop_assert_eq!(ct, expect);
    }

    #[test]
    fn exact_division_round_trip(
        ea in proptest::collection::vec(-2i32..=2, 2),
        eb in proptest::collection::vec(-2i32..=2, 2),
        ca in rational_strategy(),
        cb in rational_strategy(),
    ) {
        // (a*b)/b = a for Vandermonde-type b
        let c = ctx();
        let a = LaurentPoly::monomial(2, &ea, GradedSeries::constant(&c, ca))
            .try_add(&LaurentPoly::monomial(2, &eb, GradedSeries::constant(&c, cb)))
            .unwrap();
        let z1 = LaurentPoly::var(&c, 2, 0);
        let z2 = LaurentPoly::var(&c, 2, 1);
        let b = z1 - z2;
        let prod = a.try_mul(&b).unwrap();
        let quot = prod.exact_divide(&b).unwrap();
        prop_assert_eq!(quot, a);
    }

    #[test]
    fn conjugate_involution(lam in partition_strategy()) {
        prop_assert_eq!(lam.conjugate().conjugate(), lam.clone());
        prop_assert_eq!(lam.size(), lam.conjugate().size());
    }

    #[test]
    fn interlacing_enumeration_counts(lam in partition_strategy(), extra in 0usize..2) {
        let rows = lam.len() + extra;
        if rows >= 1 {
            let mus = enumerate_interlacing(&lam, rows);
            let expect: usize = (1..=rows)
                .map(|i| (lam.part(i) - lam.part(i + 1) + 1) as usize)
                .product();
            prop_assert_eq!(mus.len(), expect);
            for mu in &mus {
                prop_assert!(interlaces(mu, &lam));
            }
            // output is strictly revlex-descending
            for w in mus.windows(2) {
                prop_assert_eq!(revlex_cmp(&w[0], &w[1]), std::cmp::Ordering::Greater);
            }
        }
    }
}

#[test]
fn box_is_totally_ordered() {
    for (l, m) in [(2u32, 2u32), (3, 2), (1, 3)] {
        let b = enumerate_box(l, m);
        let expect = num_integer::binomial((l + m) as u64, m as u64) as usize;
        assert_eq!(b.len(), expect);
        for w in b.windows(2) {
            assert_eq!(revlex_cmp(&w[0], &w[1]), std::cmp::Ordering::Greater);
        }
    }
}
