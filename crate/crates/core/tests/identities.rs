//! Structural identities beyond the acceptance gate: conjugation forms of
//! the q-difference operators, commutation, mode agreements, specialization
//! oracles, and the skew/dual constructions.

use num_traits::{One, Zero};
use std::ops::Neg;

use sqwhit_core::qdiff::{
    apply_point, apply_symbolic, apply_symbolic_shifted, required_shift, OpKind,
};
use sqwhit_core::ring::aux::{AuxLaurent, DEFAULT_WINDOW};
use sqwhit_core::ring::qpoch::{qpoch_finite, qq_reciprocal};
use sqwhit_core::ring::{Ctx, GradedSeries, LaurentPoly, Symbol};
use sqwhit_core::rng::DetRng;
use sqwhit_core::scalar::Scalar;
use sqwhit_core::shapes::{enumerate_box, enumerate_interlacing, Partition};
use sqwhit_core::shl::{eval_shl, eval_shl_symbolic, eval_skew_shl, shl_pair, ShlSpec};
use sqwhit_core::special::{specialize, SpecialMode};
use sqwhit_core::sqw::{eval_sqw, eval_sqw_full, expand_monomial, ParamLists, SymPoly, Variant};
use sqwhit_core::torus::kernel_h;
use sqwhit_core::Rational;

fn p(parts: &[u32]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

fn rational_params(rng: &mut DetRng, len: usize) -> ParamLists<Rational> {
    ParamLists {
        a: (0..len).map(|_| rng.rational()).collect(),
        b: (0..len).map(|_| rng.rational()).collect(),
        q: rng.q_value(),
    }
}

/// Independent q-Whittaker branching oracle: skew weight
/// `x^{|lam|-|mu|} prod_r (q;q)_{lam_r-lam_{r+1}} /
///  ((q;q)_{lam_r-mu_r} (q;q)_{mu_r-lam_{r+1}})`.
fn qwhittaker_oracle(lam: &Partition, xs: &[Rational], q: &Rational) -> Rational {
    let n = xs.len();
    if lam.len() > n {
        return Rational::zero();
    }
    if n == 0 {
        return if lam.is_empty() {
            Rational::one()
        } else {
            Rational::zero()
        };
    }
    let mut acc = Rational::zero();
    for mu in enumerate_interlacing(lam, n - 1) {
        let mut w = xs[n - 1].pow_u(lam.size() - mu.size());
        for r in 1..n {
            let dd = (lam.part(r) - lam.part(r + 1)) as i64;
            let dl = (lam.part(r) - mu.part(r)) as i64;
            let dm = (mu.part(r) - lam.part(r + 1)) as i64;
            w *= qpoch_finite(q, q, dd).unwrap();
            w *= qq_reciprocal(q, dl).unwrap();
            w *= qq_reciprocal(q, dm).unwrap();
        }
        acc += w * qwhittaker_oracle(&mu, &xs[..n - 1], q);
    }
    acc
}

#[test]
fn qwhittaker_reduction_matches_oracle() {
    let mut rng = DetRng::new(31);
    for n in 1..=3usize {
        let q = rng.q_value();
        let params = ParamLists {
            a: vec![Rational::zero(); n],
            b: vec![Rational::zero(); n],
            q: q.clone(),
        };
        let pt = rng.distinct_point(n);
        for lam in enumerate_box(3, n as u32) {
            let got = eval_sqw_full(&lam, &pt, &params).unwrap();
            let expect = qwhittaker_oracle(&lam, &pt, &q);
            assert_eq!(got, expect, "lam={lam} n={n}");
        }
    }
}

#[test]
fn conjugation_identity_forward() {
    // H(z;b) * (Db f) = D1 [H(z;b) f] coefficientwise
    let n = 2usize;
    let ctx = Ctx::ab(0, 1, 5);
    let q = GradedSeries::symbol(&ctx, Symbol::Q).unwrap();
    let b1 = GradedSeries::symbol(&ctx, Symbol::B(1)).unwrap();
    let ql = LaurentPoly::constant(n, q.clone());
    let zs: Vec<LaurentPoly> = (0..n).map(|i| LaurentPoly::var(&ctx, n, i)).collect();
    let h = kernel_h(&zs, &[LaurentPoly::constant(n, b1.clone())], &ql).unwrap();
    let f =
        zs[0].clone() + zs[1].clone() + (zs[0].clone() * zs[1].clone()).scale_series(&q).unwrap();
    let (s1, img) = apply_symbolic(&OpKind::Db(vec![b1]), &f, &q, &ctx).unwrap();
    assert_eq!(s1, 0);
    let lhs = h.try_mul(&img).unwrap();
    let hf = h.try_mul(&f).unwrap();
    let (s2, rhs) = apply_symbolic(&OpKind::D1, &hf, &q, &ctx).unwrap();
    assert_eq!(s2, 0);
    assert_eq!(lhs, rhs);
}

#[test]
fn conjugation_identity_backward() {
    // H(1/z;a) * (Dbar_a f) = Dbar_1 [H(1/z;a) f], aligned at a common
    // q-power
    let n = 2usize;
    let ctx = Ctx::ab(1, 0, 6);
    let q = GradedSeries::symbol(&ctx, Symbol::Q).unwrap();
    let a1 = GradedSeries::symbol(&ctx, Symbol::A(1)).unwrap();
    let ql = LaurentPoly::constant(n, q.clone());
    let zbars: Vec<LaurentPoly> = (0..n)
        .map(|i| LaurentPoly::var(&ctx, n, i).invert_z())
        .collect();
    let h = kernel_h(&zbars, &[LaurentPoly::constant(n, a1.clone())], &ql).unwrap();
    let f = LaurentPoly::var(&ctx, n, 0) + LaurentPoly::var(&ctx, n, 1);
    let da = OpKind::DaBar(vec![a1]);
    let hf = h.try_mul(&f).unwrap();
    let s = required_shift(&da, &f).max(required_shift(&OpKind::D1Bar, &hf));
    let img = apply_symbolic_shifted(&da, &f, &q, &ctx, s).unwrap();
    let lhs = h.try_mul(&img).unwrap();
    let rhs = apply_symbolic_shifted(&OpKind::D1Bar, &hf, &q, &ctx, s).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn operators_commute_symbolically() {
    // [D_b, Dbar_a] annihilates symmetric Laurent polynomials
    let n = 2usize;
    let ctx = Ctx::ab(1, 1, 7);
    let q = GradedSeries::symbol(&ctx, Symbol::Q).unwrap();
    let params = ParamLists::symbols(&ctx, 1).unwrap();
    let db = OpKind::Db(params.b.clone());
    let da = OpKind::DaBar(params.a.clone());
    let mut rng = DetRng::new(33);
    for _ in 0..3 {
        let mut sp = SymPoly::zero(n);
        for mu in enumerate_box(3, n as u32) {
            if rng.next_u64().is_multiple_of(2) {
                sp.insert(mu, GradedSeries::constant(&ctx, rng.rational()));
            }
        }
        let f = sp.to_laurent();
        if f.is_zero() {
            continue;
        }
        // both orders with one uniform shift budget
        let s = 2 * (required_shift(&da, &f) + 1);
        let ab = {
            let x = apply_symbolic_shifted(&da, &f, &q, &ctx, s).unwrap();
            apply_symbolic_shifted(&db, &x, &q, &ctx, s).unwrap()
        };
        let ba = {
            let x = apply_symbolic_shifted(&db, &f, &q, &ctx, s).unwrap();
            apply_symbolic_shifted(&da, &x, &q, &ctx, s).unwrap()
        };
        assert_eq!(ab, ba);
    }
}

#[test]
fn operators_compose_on_eigenfunctions_at_points() {
    // D_b then Dbar_a on the reduced family gives q^{lam_n - lam_1} times it
    let mut rng = DetRng::new(34);
    let n = 2usize;
    let params = rational_params(&mut rng, n - 1);
    let q = params.q.clone();
    let xs = rng.distinct_point(n);
    for lam in enumerate_box(2, n as u32) {
        let base = |pt: &[Rational]| eval_sqw(&lam, pt, &params);
        let db = OpKind::Db(params.b.clone());
        let da = OpKind::DaBar(params.a.clone());
        let inner = |pt: &[Rational]| apply_point(&db, &base, pt, &q);
        let both = apply_point(&da, &inner, &xs, &q).unwrap();
        let eig = q.pow_u(lam.part(n) as u64) * q.pow_i(-(lam.part(1) as i64)).unwrap();
        assert_eq!(both, eig * base(&xs).unwrap(), "lam={lam}");
    }
}

#[test]
fn symbolic_and_point_modes_agree() {
    // run the symbolic operator with a rational q embedded as a constant
    // series, then evaluate the image at a rational point
    let n = 2usize;
    let ctx = Ctx::ab(0, 1, 4);
    let mut rng = DetRng::new(35);
    let qv = rng.q_value();
    let q = GradedSeries::constant(&ctx, qv.clone());
    let bv = rng.rational();
    let b = GradedSeries::constant(&ctx, bv.clone());
    let f_sym = LaurentPoly::var(&ctx, n, 0)
        + LaurentPoly::var(&ctx, n, 1)
        + LaurentPoly::monomial(n, &[1, 1], GradedSeries::constant(&ctx, rng.rational()));
    let (s, img) = apply_symbolic(&OpKind::Db(vec![b]), &f_sym, &q, &ctx).unwrap();
    assert_eq!(s, 0);
    let pt = rng.distinct_point(n);
    let at_point = |poly: &LaurentPoly| -> Rational {
        let subs: Vec<Option<GradedSeries>> = pt
            .iter()
            .map(|x| Some(GradedSeries::constant(&ctx, x.clone())))
            .collect();
        poly.substitute(&subs)
            .unwrap()
            .constant_term()
            .constant_term()
    };
    let f_eval = |ys: &[Rational]| -> sqwhit_core::Result<Rational> {
        let subs: Vec<Option<GradedSeries>> = ys
            .iter()
            .map(|x| Some(GradedSeries::constant(&ctx, x.clone())))
            .collect();
        Ok(f_sym.substitute(&subs)?.constant_term().constant_term())
    };
    let direct = apply_point(&OpKind::Db(vec![bv]), &f_eval, &pt, &qv).unwrap();
    assert_eq!(at_point(&img), direct);
}

#[test]
fn shl_functions_live_in_v_space() {
    // degree at most 1 in each variable as a rational function: the scaled
    // limit eps * F(.., u_i/eps, ..) stays finite
    let mut rng = DetRng::new(36);
    let m = 2usize;
    let spec = ShlSpec::new(
        vec![rng.rational(), rng.rational()],
        vec![rng.rational(), rng.rational()],
        rng.q_value(),
    );
    let aux_spec = ShlSpec::new(
        spec.a
            .iter()
            .map(|r| AuxLaurent::constant(r.clone()))
            .collect(),
        spec.b
            .iter()
            .map(|r| AuxLaurent::constant(r.clone()))
            .collect(),
        AuxLaurent::constant(spec.q.clone()),
    );
    let us = rng.distinct_point(m);
    for lam in enumerate_box(2, m as u32) {
        for slot in 0..m {
            let mut point: Vec<AuxLaurent> = us
                .iter()
                .map(|u| AuxLaurent::seed(u.clone(), DEFAULT_WINDOW))
                .collect();
            point[slot] = AuxLaurent::eps_power(-1, DEFAULT_WINDOW)
                * AuxLaurent::seed(us[slot].clone(), DEFAULT_WINDOW);
            let val = eval_shl(&lam, &point, &aux_spec).unwrap();
            let scaled = AuxLaurent::eps_power(1, DEFAULT_WINDOW) * val;
            assert!(
                scaled.min_order().map(|o| o >= 0).unwrap_or(true),
                "lam={lam} slot={slot}"
            );
        }
    }
}

#[test]
fn skew_shl_identity_and_vanishing() {
    let ctx = Ctx::new(2, 2, 1, 0, 4);
    let spec = ShlSpec::symbols(&ctx, 2).unwrap();
    // k=0: the ratio collapses to the indicator at mu = lam
    let one = eval_skew_shl(&p(&[1]), &p(&[1]), 0, 1, &spec, &ctx).unwrap();
    assert!(one.is_one());
    let zero = eval_skew_shl(&p(&[1]), &Partition::empty(), 0, 1, &spec, &ctx).unwrap();
    assert!(zero.is_zero());

    // one-variable reduction: the skew function from the pairing ratio is
    // the plain function with the torus variable replaced by the u symbol
    let skew = eval_skew_shl(&p(&[1]), &Partition::empty(), 1, 1, &spec, &ctx).unwrap();
    let direct = eval_shl_symbolic(&p(&[1]), 1, &spec, &ctx).unwrap();
    let u = GradedSeries::symbol(&ctx, Symbol::U(1)).unwrap();
    let direct_u = direct.substitute(&[Some(u)]).unwrap().constant_term();
    assert_eq!(skew, direct_u);
}

#[test]
fn skew_shl_matches_direct_expansion() {
    // expand F(u, z) over the F_nu(z) basis directly (m=1 torus variable,
    // shapes in Box(1,2)) and compare coefficients with the pairing ratio
    let ctx = Ctx::new(2, 2, 1, 0, 4);
    let spec = ShlSpec::symbols(&ctx, 2).unwrap();
    let u = GradedSeries::symbol(&ctx, Symbol::U(1)).unwrap();
    let n_z = 1usize;
    for lam in [p(&[1]), p(&[1, 1])] {
        let big = eval_shl_symbolic(&lam, 1 + n_z, &spec, &ctx).unwrap();
        let with_u = big.substitute(&[Some(u.clone()), None]).unwrap();
        // coefficients against F_nu(z) via the orthogonality pairing
        let swapped = ShlSpec::new(spec.b.clone(), spec.a.clone(), spec.q.clone());
        let mut reconstructed = LaurentPoly::zero_n(n_z);
        for nu in enumerate_box(2, n_z as u32) {
            let f_nu = eval_shl_symbolic(&nu, n_z, &spec, &ctx).unwrap();
            let f_nu_swapped = eval_shl_symbolic(&nu, n_z, &swapped, &ctx).unwrap();
            let num = shl_pair(&with_u, &f_nu_swapped, n_z, &ctx).unwrap();
            let den = shl_pair(&f_nu, &f_nu_swapped, n_z, &ctx).unwrap();
            let coeff = num.try_mul(&den.inv().unwrap()).unwrap();
            let skew = eval_skew_shl(&lam, &nu, 1, n_z, &spec, &ctx).unwrap();
            assert_eq!(coeff, skew, "lam={lam} nu={nu}");
            reconstructed = reconstructed
                .try_add(&f_nu.scale_series(&coeff).unwrap())
                .unwrap();
        }
        // the expansion reconstructs the substituted function
        assert_eq!(reconstructed, with_u, "reconstruction at {lam}");
    }
}

#[test]
fn dual_cauchy_needs_the_zero_flag() {
    // n=1, m=1: with a_1 left nonzero the displayed identity fails; with the
    // flag it holds (the flag is the documented resolution)
    let mut rng = DetRng::new(37);
    let q = rng.q_value();
    let a1 = rng.rational();
    let b1 = rng.rational();
    let x = rng.rational();
    let u = rng.rational();
    let rhs = Rational::one() - x.clone() * u.clone();
    let lhs = |spec: &ShlSpec<Rational>| -> Rational {
        let params = ParamLists::<Rational> {
            a: vec![],
            b: vec![],
            q: q.clone(),
        };
        let mut acc = Rational::zero();
        for lam in enumerate_box(1, 1) {
            let shl_val = eval_shl(&lam.conjugate(), std::slice::from_ref(&u), spec).unwrap();
            acc += shl_val * eval_sqw(&lam, std::slice::from_ref(&x), &params).unwrap();
        }
        acc
    };
    let with_flag = ShlSpec::new(vec![a1.clone()], vec![b1.clone()], q.clone()).with_a_zeroed(1);
    assert_eq!(lhs(&with_flag), rhs);
    let without = ShlSpec::new(vec![a1], vec![b1], q.clone());
    assert_ne!(lhs(&without), rhs);
}

#[test]
fn interpolation_two_row_example() {
    // closed form of the two-variable interpolation polynomial for (2,0):
    // m_2 + (1+q) m_11 - b1(1+q) m_21 + q b1^2 m_22
    let ctx = Ctx::ab(0, 1, 6);
    let got = specialize(SpecialMode::Interpolation, &p(&[2]), 2, &ctx).unwrap();
    let q = GradedSeries::symbol(&ctx, Symbol::Q).unwrap();
    let b1 = GradedSeries::symbol(&ctx, Symbol::B(1)).unwrap();
    let one = GradedSeries::constant(&ctx, Rational::one());
    assert!(got.coeff(&p(&[2])).is_one());
    assert_eq!(got.coeff(&p(&[1, 1])), one.clone() + q.clone());
    assert_eq!(
        got.coeff(&p(&[2, 1])),
        (b1.clone() * (one + q.clone())).neg()
    );
    assert_eq!(got.coeff(&p(&[2, 2])), q * b1.clone() * b1);
}

#[test]
fn full_family_from_reduced_by_zero_variable() {
    // coefficientwise: the reduced family with one variable set to zero is
    // the full family
    let ctx = Ctx::ab(2, 2, 4);
    let n = 2usize;
    let params = ParamLists::symbols(&ctx, n).unwrap();
    for lam in enumerate_box(2, n as u32) {
        let reduced = expand_monomial(Variant::Reduced, &lam, n + 1, &params, &ctx).unwrap();
        let full = expand_monomial(Variant::Full, &lam, n, &params, &ctx).unwrap();
        // substitute x_{n+1} = 0 into the reduced expansion
        let dropped = reduced
            .to_laurent()
            .substitute(&[None, None, Some(GradedSeries::zero_in(&ctx))])
            .unwrap();
        assert_eq!(SymPoly::from_laurent(&dropped).unwrap(), full, "lam={lam}");
    }
}
