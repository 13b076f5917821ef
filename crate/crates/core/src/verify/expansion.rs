use std::sync::Arc;

use super::coefficients::{
    coef_d, coef_e, coef_f1, coef_f2, coef_g1, coef_g2, coef_g3, coef_h, coef_i, double_prefactor,
    single_prefactor, substitute, CoefficientFn,
};
use super::Form;
use crate::bethe::{creation_phi, pseudovacuum, wanted_a1, wanted_a2, wanted_a3_signed, ModelConfig};
use crate::error::{Error, Result};
use crate::laxrep::{DifferenceOperator, EntryName, ScalarFn};
use crate::linalg::norm;
use crate::theta::C64;

/// Diagonal entry whose action on the creation operator is expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Diagonal {
    A1,
    A2,
    A3,
}

impl Diagonal {
    pub const ALL: [Diagonal; 3] = [Diagonal::A1, Diagonal::A2, Diagonal::A3];

    pub fn entry(self) -> EntryName {
        match self {
            Diagonal::A1 => EntryName::A1,
            Diagonal::A2 => EntryName::A2,
            Diagonal::A3 => EntryName::A3,
        }
    }
}

/// Which root occupies each trailing diagonal factor of a double term.
#[derive(Clone, Copy)]
enum Slot {
    L,
    J,
}

fn scaled(op: DifferenceOperator, f: impl Fn(C64) -> Result<C64> + Send + Sync + 'static) -> DifferenceOperator {
    let f: ScalarFn = Arc::new(f);
    op.scale(f)
}

/// The right-hand side of the expansion of `A(u) Phi_n(roots)` as one operator.
pub fn expansion_rhs(
    which: Diagonal,
    u: C64,
    roots: &[C64],
    config: &ModelConfig,
    form: Form,
) -> Result<DifferenceOperator> {
    let n = roots.len();
    let cp = config.couplings().clone();
    let phi = |v: &[C64]| creation_phi(v.len(), v, config);
    let entry = |name, x| config.entry(name, x);

    let wanted = {
        let cp = cp.clone();
        let r = roots.to_vec();
        let a3_sign = match form {
            Form::Consistent => 1.0,
            Form::Literal => -1.0,
        };
        scaled(phi(roots)?.compose(&entry(which.entry(), u))?, move |q| match which {
            Diagonal::A1 => wanted_a1(&cp, q, u, &r),
            Diagonal::A2 => wanted_a2(&cp, q, u, &r),
            Diagonal::A3 => wanted_a3_signed(&cp, q, u, &r, a3_sign),
        })
    };
    let mut total = wanted;

    let single = |coef: CoefficientFn, b: EntryName, a: EntryName| -> Result<Vec<DifferenceOperator>> {
        let mut out = Vec::new();
        for j in 0..n {
            let pre = single_prefactor(&cp, roots, j)?;
            let v = substitute(roots, j, None);
            let op = entry(b, u).compose(&phi(&v[1..])?)?.compose(&entry(a, roots[j]))?;
            let cp = cp.clone();
            out.push(scaled(op, move |q| Ok(pre * coef(&cp, q, u, &v, form)?)));
        }
        Ok(out)
    };
    let double = |coef: CoefficientFn, order: [(EntryName, Slot); 2]| -> Result<Vec<DifferenceOperator>> {
        let mut out = Vec::new();
        for l in 0..n {
            for j in l + 1..n {
                let pre = double_prefactor(&cp, roots, l, j)?;
                let v = substitute(roots, l, Some(j));
                let mut op = entry(EntryName::B2, u).compose(&phi(&v[2..])?)?;
                for (name, slot) in order {
                    let x = match slot {
                        Slot::L => roots[l],
                        Slot::J => roots[j],
                    };
                    op = op.compose(&entry(name, x))?;
                }
                let cp = cp.clone();
                out.push(scaled(op, move |q| Ok(pre * coef(&cp, q, u, &v, form)?)));
            }
        }
        Ok(out)
    };

    use EntryName::*;
    let terms = match which {
        Diagonal::A1 => {
            let mut t = single(coef_d, B1, A1)?;
            t.extend(double(coef_e, [(A1, Slot::L), (A1, Slot::J)])?);
            t
        }
        Diagonal::A2 => {
            let mut t = single(coef_f1, B1, A2)?;
            t.extend(single(coef_f2, B3, A1)?);
            t.extend(double(coef_g1, [(A1, Slot::L), (A2, Slot::J)])?);
            t.extend(double(coef_g2, [(A1, Slot::J), (A2, Slot::L)])?);
            t.extend(double(coef_g3, [(A2, Slot::L), (A1, Slot::J)])?);
            t
        }
        Diagonal::A3 => {
            let mut t = single(coef_h, B3, A2)?;
            t.extend(double(coef_i, [(A2, Slot::L), (A2, Slot::J)])?);
            t
        }
    };
    for t in &terms {
        total = total.add(t)?;
    }
    Ok(total)
}

/// `|A(u) Phi_n |Omega> - RHS |Omega>| / |A(u) Phi_n |Omega>|` at `q`.
///
/// The roots must number `n`, the site count of `config`.
pub fn action_expansion_residual(
    which: Diagonal,
    u: C64,
    roots: &[C64],
    q: C64,
    config: &ModelConfig,
    form: Form,
) -> Result<f64> {
    if roots.len() != config.n() {
        return Err(Error::InvalidParameter(format!(
            "expansion needs {} roots, got {}",
            config.n(),
            roots.len()
        )));
    }
    let vac = pseudovacuum(config);
    let lhs = config
        .entry(which.entry(), u)
        .compose(&creation_phi(roots.len(), roots, config)?)?
        .apply(&vac, q)?;
    let rhs = expansion_rhs(which, u, roots, config, form)?.apply(&vac, q)?;
    let scale = norm(&lhs);
    if scale == 0.0 {
        return Err(Error::DenominatorNearZero { factor: "|A Phi Omega|" });
    }
    Ok(norm(&(lhs - rhs)) / scale)
}
