//! Rational parameter files for `compute --params file.json`.
//!
//! Format: `{"q": "1/2", "a": ["1/3", "-2/5"], "b": ["1/7"]}` with every
//! value a decimal or `p/q` string. A missing `q` keeps the deformation
//! parameter symbolic; `a`/`b` default to empty lists.

use std::sync::Arc;

use sqwhit_core::scalar::parse_rational;
use sqwhit_core::shapes::Partition;
use sqwhit_core::shl::{eval_shl_symbolic, ShlSpec};
use sqwhit_core::sqw::{dual_norm_psi, expand_monomial, ParamLists, SymPoly, Variant};
use sqwhit_core::{Ctx, Error, GradedSeries, Rational, Symbol};

pub enum ParamsMode {
    Symbolic,
    File(ParamValues),
}

impl ParamsMode {
    pub fn parse(s: &str) -> Result<ParamsMode, Error> {
        if s == "symbolic" {
            return Ok(ParamsMode::Symbolic);
        }
        let text = std::fs::read_to_string(s)
            .map_err(|e| Error::InvalidInput(format!("cannot read params file {s:?}: {e}")))?;
        let raw: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("bad params JSON in {s:?}: {e}")))?;
        let list = |key: &str| -> Result<Vec<Rational>, Error> {
            raw.get(key)
                .and_then(|v| v.as_array())
                .map(|arr| {
                    arr.iter()
                        .map(|x| {
                            x.as_str()
                                .ok_or_else(|| {
                                    Error::InvalidInput(format!("{key} entries must be strings"))
                                })
                                .and_then(parse_rational)
                        })
                        .collect()
                })
                .unwrap_or_else(|| Ok(Vec::new()))
        };
        let q = raw
            .get("q")
            .map(|v| {
                v.as_str()
                    .ok_or_else(|| Error::InvalidInput("q must be a string".into()))
                    .and_then(parse_rational)
            })
            .transpose()?;
        Ok(ParamsMode::File(ParamValues {
            q,
            a: list("a")?,
            b: list("b")?,
            raw,
        }))
    }

    /// Stable cache-key component.
    pub fn fingerprint(&self) -> serde_json::Value {
        match self {
            ParamsMode::Symbolic => serde_json::json!("symbolic"),
            ParamsMode::File(v) => v.raw.clone(),
        }
    }
}

pub struct ParamValues {
    pub q: Option<Rational>,
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
    raw: serde_json::Value,
}

impl ParamValues {
    fn lists(
        &self,
        ctx: &Arc<Ctx>,
        len: usize,
        swap: bool,
        zero_a: bool,
    ) -> Result<ParamLists<GradedSeries>, Error> {
        let lift = |v: &[Rational], what: &str| -> Result<Vec<GradedSeries>, Error> {
            if v.len() < len {
                return Err(Error::InvalidInput(format!(
                    "params file needs at least {len} {what}-values, got {}",
                    v.len()
                )));
            }
            Ok(v[..len]
                .iter()
                .map(|r| GradedSeries::constant(ctx, r.clone()))
                .collect())
        };
        let q = match &self.q {
            Some(v) => GradedSeries::constant(ctx, v.clone()),
            None => GradedSeries::symbol(ctx, Symbol::Q)?,
        };
        let zeros = vec![GradedSeries::zero_in(ctx); len];
        let (a, b) = if zero_a {
            (zeros, lift(&self.b, "b")?)
        } else {
            (lift(&self.a, "a")?, lift(&self.b, "b")?)
        };
        Ok(if swap {
            ParamLists { a: b, b: a, q }
        } else {
            ParamLists { a, b, q }
        })
    }

    pub fn compute(
        &self,
        family: &str,
        lam: &Partition,
        n: usize,
        cap: u32,
    ) -> Result<(SymPoly, Arc<Ctx>), Error> {
        let ctx = Ctx::ab(0, 0, cap);
        match family {
            "f" => {
                let params = self.lists(&ctx, n - 1, false, false)?;
                Ok((
                    expand_monomial(Variant::Reduced, lam, n, &params, &ctx)?,
                    ctx,
                ))
            }
            "F" => {
                let params = self.lists(&ctx, n, false, false)?;
                Ok((expand_monomial(Variant::Full, lam, n, &params, &ctx)?, ctx))
            }
            "Fstar" => {
                let params = self.lists(&ctx, n, false, false)?;
                let sp = expand_monomial(Variant::Full, lam, n, &params, &ctx)?;
                let psi = dual_norm_psi(lam, &params)?;
                Ok((sp.scale_series(&psi)?, ctx))
            }
            "shl" => {
                let len = lam.part(1).max(1) as usize;
                let params = self.lists(&ctx, len, false, false)?;
                let spec = ShlSpec::new(params.a, params.b, params.q);
                let p = eval_shl_symbolic(lam, n, &spec, &ctx)?;
                Ok((SymPoly::from_laurent(&p)?, ctx))
            }
            "G" | "P" => {
                // q = 0 for the Grothendieck case regardless of the file
                let mut params = self.lists(&ctx, n - 1, false, true)?;
                if family == "G" {
                    params.q = GradedSeries::zero_in(&ctx);
                }
                Ok((
                    expand_monomial(Variant::Reduced, lam, n, &params, &ctx)?,
                    ctx,
                ))
            }
            "Gbar" | "Pbar" => {
                let mut params = self.lists(&ctx, n - 1, true, true)?;
                if family == "Gbar" {
                    params.q = GradedSeries::zero_in(&ctx);
                }
                Ok((
                    expand_monomial(Variant::Reduced, lam, n, &params, &ctx)?,
                    ctx,
                ))
            }
            "qW" => {
                let zeros = vec![GradedSeries::zero_in(&ctx); n - 1];
                let q = match &self.q {
                    Some(v) => GradedSeries::constant(&ctx, v.clone()),
                    None => GradedSeries::symbol(&ctx, Symbol::Q)?,
                };
                let params = ParamLists {
                    a: zeros.clone(),
                    b: zeros,
                    q,
                };
                Ok((
                    expand_monomial(Variant::Reduced, lam, n, &params, &ctx)?,
                    ctx,
                ))
            }
            other => Err(Error::InvalidInput(format!(
                "unknown family {other:?} (expected f, F, Fstar, shl, G, Gbar, P, Pbar, qW)"
            ))),
        }
    }
}
