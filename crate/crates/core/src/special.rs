//! Specializations: inhomogeneous symmetric Grothendieck polynomials via
//! bialternants, interpolation q-Whittaker polynomials, the q-Whittaker
//! reduction, and their dedicated scalar products.
//!
//! Every specialization is reachable through two independent routes: the
//! determinant formulas here, and the branching evaluator with zeroed
//! parameters (`q = 0` is realized by passing the zero series for q through
//! the shared engine; no separate polynomial type exists).

use std::sync::Arc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::ring::{Ctx, GradedSeries, LaurentPoly, Symbol};
use crate::scalar::Scalar;
use crate::shapes::Partition;
use crate::sqw::{expand_monomial, ParamLists, SymPoly, Variant};
use crate::torus::{scalar_product, DensityKind};
use crate::Rational;

/// Which determinant formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BialternantVariant {
    /// Rows `x_i^{lam_j + n - j} prod_{k<j} (1 - x_i b_k)`.
    G,
    /// Rows `x_i^{lam_j} prod_{k=1}^{n-j} (x_i - b_{n-k})`.
    GBar,
}

/// Data for a bialternant evaluation.
#[derive(Debug, Clone)]
pub struct BialternantSpec {
    pub lam: Partition,
    pub n: usize,
    pub b: Vec<GradedSeries>,
    pub variant: BialternantVariant,
}

/// The symmetric Grothendieck polynomial (or its bar variant) as a ratio of
/// an alternant by the Vandermonde, divided exactly.
pub fn grothendieck(spec: &BialternantSpec, ctx: &Arc<Ctx>) -> Result<SymPoly> {
    let n = spec.n;
    if spec.lam.len() > n {
        return Err(Error::InvalidInput(format!(
            "shape {} too long for {n} variables",
            spec.lam
        )));
    }
    if spec.b.len() + 1 != n {
        return Err(Error::InvalidInput(format!(
            "bialternant over {n} variables needs {} parameters, got {}",
            n - 1,
            spec.b.len()
        )));
    }
    let one = GradedSeries::constant(ctx, Rational::one());
    let var = |i: usize| LaurentPoly::var(ctx, n, i);
    let entry = |i: usize, j: usize| -> Result<LaurentPoly> {
        // i = row (variable), j = column (1-based shape index)
        match spec.variant {
            BialternantVariant::G => {
                let e = spec.lam.part(j) as i64 + (n - j) as i64;
                let mut acc = var(i).pow_u(e as u64);
                for k in 1..j {
                    let f = LaurentPoly::constant(n, one.clone())
                        .try_add(&var(i).scale_series(&spec.b[k - 1])?.negated())?;
                    acc = acc.try_mul(&f)?;
                }
                Ok(acc)
            }
            BialternantVariant::GBar => {
                let mut acc = var(i).pow_u(spec.lam.part(j) as u64);
                for k in 1..=(n - j) {
                    let f = var(i)
                        .try_add(&LaurentPoly::constant(n, spec.b[n - k - 1].clone()).negated())?;
                    acc = acc.try_mul(&f)?;
                }
                Ok(acc)
            }
        }
    };
    // determinant by Leibniz over permutations (n is small at desk scale)
    let mut det = LaurentPoly::zero_n(n);
    for (perm, odd) in crate::shl::permutations_with_sign(n) {
        let mut term = LaurentPoly::one_in(ctx, n);
        for (i, &j) in perm.iter().enumerate() {
            term = term.try_mul(&entry(i, j + 1)?)?;
        }
        det = if odd {
            det.try_add(&term.negated())?
        } else {
            det.try_add(&term)?
        };
    }
    let mut vmd = LaurentPoly::one_in(ctx, n);
    for i in 0..n {
        for j in i + 1..n {
            vmd = vmd.try_mul(&(var(i) - var(j)))?;
        }
    }
    let quotient = det.exact_divide(&vmd)?;
    SymPoly::from_laurent(&quotient)
}

trait Negated {
    fn negated(&self) -> Self;
}

impl Negated for LaurentPoly {
    fn negated(&self) -> Self {
        use std::ops::Neg;
        self.clone().neg()
    }
}

/// The specialization routes through the branching evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialMode {
    /// q = 0, a = 0: symmetric Grothendieck.
    Grothendieck,
    /// q = 0, a = 0 with swapped lists: the bar variant.
    GrothendieckBar,
    /// a = 0: interpolation q-Whittaker.
    Interpolation,
    /// a = 0 with swapped lists.
    InterpolationBar,
    /// a = b = 0: classical q-Whittaker.
    QWhittaker,
}

impl SpecialMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "grothendieck" | "G" => Ok(SpecialMode::Grothendieck),
            "grothendieck-bar" | "Gbar" => Ok(SpecialMode::GrothendieckBar),
            "interpolation" | "P" => Ok(SpecialMode::Interpolation),
            "interpolation-bar" | "Pbar" => Ok(SpecialMode::InterpolationBar),
            "qwhittaker" | "qW" => Ok(SpecialMode::QWhittaker),
            other => Err(Error::InvalidInput(format!(
                "unknown specialization {other:?}"
            ))),
        }
    }
}

/// Monomial expansion of the reduced family under the indicated parameter
/// substitutions: `b` symbols stay, `a`'s and/or `q` are zeroed, bar modes
/// swap the lists.
pub fn specialize(mode: SpecialMode, lam: &Partition, n: usize, ctx: &Arc<Ctx>) -> Result<SymPoly> {
    let zeros = vec![GradedSeries::zero_in(ctx); n - 1];
    let q_sym = GradedSeries::symbol(ctx, Symbol::Q)?;
    let q_zero = GradedSeries::zero_in(ctx);
    let bs = || -> Result<Vec<GradedSeries>> {
        (1..=n - 1)
            .map(|i| GradedSeries::symbol(ctx, Symbol::B(i as u16)))
            .collect()
    };
    let params = match mode {
        SpecialMode::Grothendieck => ParamLists {
            a: zeros,
            b: bs()?,
            q: q_zero,
        },
        SpecialMode::GrothendieckBar => ParamLists {
            a: bs()?,
            b: zeros,
            q: q_zero,
        },
        SpecialMode::Interpolation => ParamLists {
            a: zeros,
            b: bs()?,
            q: q_sym,
        },
        SpecialMode::InterpolationBar => ParamLists {
            a: bs()?,
            b: zeros,
            q: q_sym,
        },
        SpecialMode::QWhittaker => ParamLists {
            a: zeros.clone(),
            b: zeros,
            q: q_sym,
        },
    };
    expand_monomial(Variant::Reduced, lam, n, &params, ctx)
}

/// Grothendieck scalar product: constant term against the q=0 density
/// `(1/n!) prod_{i!=j}(1 - z_i/z_j) / prod (1 - z_i b_j)`.
pub fn scalar_grothendieck(
    f: &LaurentPoly,
    g: &LaurentPoly,
    n: usize,
    ctx: &Arc<Ctx>,
) -> Result<GradedSeries> {
    let b: Vec<GradedSeries> = (1..=n - 1)
        .map(|i| GradedSeries::symbol(ctx, Symbol::B(i as u16)))
        .collect::<Result<Vec<_>>>()?;
    scalar_product(&DensityKind::Grothendieck { b }, f, g, n, ctx)
}

/// Interpolation scalar product: q-graded density
/// `(1/n!) prod (z_i/z_j;q)_inf / prod (z_i b_j;q)_inf`.
pub fn scalar_interpolation(
    f: &LaurentPoly,
    g: &LaurentPoly,
    n: usize,
    ctx: &Arc<Ctx>,
) -> Result<GradedSeries> {
    let b: Vec<GradedSeries> = (1..=n - 1)
        .map(|i| GradedSeries::symbol(ctx, Symbol::B(i as u16)))
        .collect::<Result<Vec<_>>>()?;
    scalar_product(&DensityKind::Interpolation { b }, f, g, n, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn bialternant_row_one() {
        // G_(1)(x1,x2|b1) = m_(1) - b1 m_(1,1)
        let ctx = Ctx::ab(0, 1, 6);
        let b1 = GradedSeries::symbol(&ctx, Symbol::B(1)).unwrap();
        let spec = BialternantSpec {
            lam: p(&[1]),
            n: 2,
            b: vec![b1.clone()],
            variant: BialternantVariant::G,
        };
        let g = grothendieck(&spec, &ctx).unwrap();
        assert!(g.coeff(&p(&[1])).is_one());
        assert_eq!(g.coeff(&p(&[1, 1])), b1.clone().neg());
        assert_eq!(g.iter_terms().count(), 2);

        // GBar_(1)(x1,x2|b1) = x1 + x2 - b1 = m_(1) - b1 m_()
        let spec = BialternantSpec {
            lam: p(&[1]),
            n: 2,
            b: vec![b1.clone()],
            variant: BialternantVariant::GBar,
        };
        let gb = grothendieck(&spec, &ctx).unwrap();
        assert!(gb.coeff(&p(&[1])).is_one());
        assert_eq!(gb.coeff(&Partition::empty()), b1.neg());
        assert_eq!(gb.iter_terms().count(), 2);
    }

    #[test]
    fn bialternant_matches_branching() {
        let ctx = Ctx::ab(0, 2, 6);
        for n in [2usize, 3] {
            let b: Vec<GradedSeries> = (1..=n - 1)
                .map(|i| GradedSeries::symbol(&ctx, Symbol::B(i as u16)).unwrap())
                .collect();
            for lam in crate::shapes::enumerate_box(2, n as u32) {
                let via_det = grothendieck(
                    &BialternantSpec {
                        lam: lam.clone(),
                        n,
                        b: b.clone(),
                        variant: BialternantVariant::G,
                    },
                    &ctx,
                )
                .unwrap();
                let via_branch = specialize(SpecialMode::Grothendieck, &lam, n, &ctx).unwrap();
                assert_eq!(via_det, via_branch, "G at {lam}, n={n}");
                let via_det = grothendieck(
                    &BialternantSpec {
                        lam: lam.clone(),
                        n,
                        b: b.clone(),
                        variant: BialternantVariant::GBar,
                    },
                    &ctx,
                )
                .unwrap();
                let via_branch = specialize(SpecialMode::GrothendieckBar, &lam, n, &ctx).unwrap();
                assert_eq!(via_det, via_branch, "GBar at {lam}, n={n}");
            }
        }
    }

    #[test]
    fn schur_at_zero_parameters() {
        // G at b=0 collapses to the Schur bialternant; s_(2,1)(x1,x2) = m_(2,1)
        let ctx = Ctx::ab(0, 1, 4);
        let spec = BialternantSpec {
            lam: p(&[2, 1]),
            n: 2,
            b: vec![GradedSeries::zero_in(&ctx)],
            variant: BialternantVariant::G,
        };
        let g = grothendieck(&spec, &ctx).unwrap();
        assert!(g.coeff(&p(&[2, 1])).is_one());
        assert_eq!(g.iter_terms().count(), 1);
    }

    #[test]
    fn qwhittaker_mode_small() {
        // mode qwhittaker, lam=(1,1), n=2 -> m_(1,1)
        let ctx = Ctx::ab(0, 0, 5);
        let sp = specialize(SpecialMode::QWhittaker, &p(&[1, 1]), 2, &ctx).unwrap();
        assert!(sp.coeff(&p(&[1, 1])).is_one());
        assert_eq!(sp.iter_terms().count(), 1);
    }

    #[test]
    fn interpolation_at_b_zero_is_qwhittaker() {
        // dropping the b symbols from the interpolation mode leaves the
        // q-Whittaker expansion; compare coefficients with b set to zero
        let ctx = Ctx::ab(0, 1, 4);
        let lam = p(&[2]);
        let interp = specialize(SpecialMode::Interpolation, &lam, 2, &ctx).unwrap();
        let qw = specialize(SpecialMode::QWhittaker, &lam, 2, &ctx).unwrap();
        for (mu, c) in qw.iter_terms() {
            // the b-free part of the interpolation coefficient
            let ic = interp.coeff(mu);
            let b_free: Vec<_> = ic
                .iter_terms()
                .filter(|(e, _)| e.len() <= 1) // only q-powers survive
                .map(|(e, v)| (e.clone(), v.clone()))
                .collect();
            let expect: Vec<_> = c
                .iter_terms()
                .map(|(e, v)| (e.clone(), v.clone()))
                .collect();
            assert_eq!(b_free, expect, "at {mu}");
        }
    }

    use crate::shapes::Partition;
    use std::ops::Neg;
}
