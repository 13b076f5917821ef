use std::sync::Arc;

use super::Form;
use crate::bethe::ModelConfig;
use crate::error::Result;
use crate::laxrep::{DifferenceOperator, EntryName, ScalarFn, TrigPolynomial};
use crate::linalg::rel_vector_diff;
use crate::sampling::GenericSampler;
use crate::theta::C64;

/// The five exchange relations among `A1`, `B1`, `B2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    B1B1,
    A1B1,
    A1B2,
    B1B2,
    B2B1,
}

impl Relation {
    pub const ALL: [Relation; 5] = [
        Relation::B1B1,
        Relation::A1B1,
        Relation::A1B2,
        Relation::B1B2,
        Relation::B2B1,
    ];
}

fn sc(op: DifferenceOperator, f: impl Fn(C64) -> Result<C64> + Send + Sync + 'static) -> DifferenceOperator {
    let f: ScalarFn = Arc::new(f);
    op.scale(f)
}

/// Both sides of a relation as operators; `F_ab` means `F(u_a - u_b)`.
pub fn relation_sides(
    rel: Relation,
    u1: C64,
    u2: C64,
    config: &ModelConfig,
    form: Form,
) -> Result<(DifferenceOperator, DifferenceOperator)> {
    use EntryName::*;
    let cp = config.couplings().clone();
    let e = cp.eta();
    let x1 = |n| config.entry(n, u1);
    let x2 = |n| config.entry(n, u2);
    let u21 = u2 - u1;
    let u12 = u1 - u2;
    let lit = form == Form::Literal;
    Ok(match rel {
        Relation::B1B1 => {
            let lhs = x1(B1).compose(&x2(B1))?;
            let om = cp.ratio_omega(u21)?;
            let c1 = cp.clone();
            let c2 = cp.clone();
            let rhs = sc(x2(B1).compose(&x1(B1))?, move |_| Ok(om))
                .add(&sc(x2(B2).compose(&x1(A1))?, move |q| Ok(-om * c1.inv_ratio_y(q, u21)?)))?
                .add(&sc(x1(B2).compose(&x2(A1))?, move |q| c2.inv_ratio_y(q, u12)))?;
            (lhs, rhs)
        }
        Relation::A1B1 => {
            let lhs = x1(A1).compose(&x2(B1))?;
            let c1 = cp.clone();
            let c2 = cp.clone();
            let rhs = sc(x2(B1).compose(&x1(A1))?, move |q| c1.ratio_z(q, u21))
                .add(&sc(x1(B1).compose(&x2(A1))?, move |q| {
                    Ok(-c2.alpha(e, q, u21)? * c2.inv_beta(e, q, u21)?)
                }))?;
            (lhs, rhs)
        }
        Relation::A1B2 => {
            let lhs = x1(A1).compose(&x2(B2))?;
            let g = cp.g(u21)?;
            // literal: B2(u2) A1(u2), +gamma, delta term with A1(u1)
            let (first, bb_sign, last) = if lit {
                (x2(B2).compose(&x2(A1))?, 1.0, x1(B2).compose(&x1(A1))?)
            } else {
                (x2(B2).compose(&x1(A1))?, -1.0, x1(B2).compose(&x2(A1))?)
            };
            let c0 = cp.clone();
            let c1 = cp.clone();
            let c2 = cp.clone();
            let c3 = cp.clone();
            let rhs = sc(first, move |q| Ok(g * c0.inv_gamma(-q, q, u21)?))
                .add(&sc(x1(B1).compose(&x2(B1))?, move |q| {
                    Ok(bb_sign * c1.gamma(-q, e, u21)? * c1.inv_gamma(-q, q, u21)?)
                }))?
                .add(&sc(last, move |q| Ok(-c2.delta(-q, u21)? * c3.inv_gamma(-q, q, u21)?)))?;
            (lhs, rhs)
        }
        Relation::B1B2 => {
            let lhs = x2(B1).compose(&x1(B2))?;
            let ig = cp.inv_g(u21)?;
            let c1 = cp.clone();
            let c2 = cp.clone();
            let rhs = sc(x1(B2).compose(&x2(B1))?, move |q| Ok(ig * c1.beta(e, -q, u21)?))
                .add(&sc(x1(B1).compose(&x2(B2))?, move |q| Ok(ig * c2.alpha(e, -q, u21)?)))?;
            (lhs, rhs)
        }
        Relation::B2B1 => {
            let lhs = x2(B2).compose(&x1(B1))?;
            let ig = cp.inv_g(u21)?;
            let sign = if lit { -1.0 } else { 1.0 };
            let c1 = cp.clone();
            let c2 = cp.clone();
            let rhs = sc(x1(B1).compose(&x2(B2))?, move |q| Ok(sign * ig * c1.beta(-q, e, u21)?))
                .add(&sc(x1(B2).compose(&x2(B1))?, move |q| Ok(ig * c2.alpha(-q, e, u21)?)))?;
            (lhs, rhs)
        }
    })
}

/// Residuals of the five relations on one random trigonometric test function.
pub fn commutation_residuals(
    q: C64,
    u1: C64,
    u2: C64,
    config: &ModelConfig,
    form: Form,
    sampler: &mut GenericSampler,
) -> Result<[f64; 5]> {
    let test = TrigPolynomial::random(sampler, config.rep().space().dim(), 2, None);
    let mut out = [0.0; 5];
    for (slot, rel) in out.iter_mut().zip(Relation::ALL) {
        let (lhs, rhs) = relation_sides(rel, u1, u2, config, form)?;
        *slot = rel_vector_diff(&lhs.apply(&test, q)?, &rhs.apply(&test, q)?);
    }
    Ok(out)
}
