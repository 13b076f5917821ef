use std::fmt;

use super::Form;
use crate::bethe::{a1, a2, gauge_ratio, ModelConfig};
use crate::error::{Error, Result};
use crate::rmatrix::CouplingParams;
use crate::theta::C64;

/// Expansion coefficients and cancelation coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientName {
    D,
    E,
    F1,
    /// The explicit closed form of `F1` at a general index.
    F1Closed,
    F2,
    G1,
    G2,
    G3,
    H,
    I,
    K1,
    K2,
    K3,
}

impl CoefficientName {
    pub const ALL: [CoefficientName; 13] = [
        Self::D,
        Self::E,
        Self::F1,
        Self::F1Closed,
        Self::F2,
        Self::G1,
        Self::G2,
        Self::G3,
        Self::H,
        Self::I,
        Self::K1,
        Self::K2,
        Self::K3,
    ];

    /// Number of root indices the coefficient carries.
    pub fn arity(self) -> usize {
        match self {
            Self::E | Self::G1 | Self::G2 | Self::G3 | Self::I | Self::K2 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CoefficientName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A coefficient value at zero-based root indices.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedCoefficient {
    pub name: CoefficientName,
    pub indices: Vec<usize>,
    pub value: C64,
}

/// Roots reordered as `(u_l, u_j, rest...)`; the substitution `u_1 -> u_l, u_2 -> u_j`.
pub fn substitute(roots: &[C64], l: usize, j: Option<usize>) -> Vec<C64> {
    let mut v = vec![roots[l]];
    if let Some(j) = j {
        v.push(roots[j]);
    }
    v.extend(
        roots
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != l && Some(k) != j)
            .map(|(_, &x)| x),
    );
    v
}

/// `prod_{k<j} omega(u_j - u_k)`: the factor picked up moving `u_j` to the front.
pub fn single_prefactor(cp: &CouplingParams, roots: &[C64], j: usize) -> Result<C64> {
    (0..j).try_fold(C64::new(1.0, 0.0), |acc, k| Ok(acc * cp.ratio_omega(roots[j] - roots[k])?))
}

/// `prod_{k<l} omega_lk prod_{k<j, k != l} omega_jk` for `l < j`.
pub fn double_prefactor(cp: &CouplingParams, roots: &[C64], l: usize, j: usize) -> Result<C64> {
    let mut p = single_prefactor(cp, roots, l)?;
    for k in (0..j).filter(|&k| k != l) {
        p *= cp.ratio_omega(roots[j] - roots[k])?;
    }
    Ok(p)
}

/// Signature shared by the reduced (index-1 or index-12) coefficient formulas.
pub type CoefficientFn = fn(&CouplingParams, C64, C64, &[C64], Form) -> Result<C64>;

fn prod_from(start: usize, v: &[C64], f: impl Fn(usize) -> Result<C64>) -> Result<C64> {
    (start..v.len()).try_fold(C64::new(1.0, 0.0), |acc, k| Ok(acc * f(k)?))
}

fn ab(cp: &CouplingParams, q1: C64, q2: C64, b1: C64, b2: C64, x: C64) -> Result<C64> {
    Ok(cp.alpha(q1, q2, x)? * cp.inv_beta(b1, b2, x)?)
}

pub fn coef_d(cp: &CouplingParams, q: C64, u: C64, v: &[C64], form: Form) -> Result<C64> {
    let e = cp.eta();
    let sign = match form {
        Form::Consistent => -1.0,
        Form::Literal => 1.0,
    };
    let p = prod_from(1, v, |k| cp.ratio_z(q, v[k] - v[0]))?;
    Ok(sign * ab(cp, e, q, e, q, v[0] - u)? * p)
}

pub fn coef_e(cp: &CouplingParams, q: C64, u: C64, v: &[C64], _form: Form) -> Result<C64> {
    let e = cp.eta();
    let (a, b) = (v[0], v[1]);
    let pre = cp.delta(-q, a - u)? * cp.inv_gamma(-q, q, a - u)? * cp.inv_ratio_y(q - 2.0 * e, a - b)?
        + cp.ratio_z(q, a - u)? * ab(cp, e, q, e, q, b - u)? * cp.ratio_omega(u - a)? * cp.inv_ratio_y(q, u - a)?;
    Ok(pre * prod_from(2, v, |k| Ok(cp.ratio_z(q + 2.0 * e, v[k] - a)? * cp.ratio_z(q, v[k] - b)?))?)
}

pub fn coef_f1(cp: &CouplingParams, q: C64, u: C64, v: &[C64], _form: Form) -> Result<C64> {
    let e = cp.eta();
    let p = prod_from(1, v, |k| {
        Ok(cp.ratio_z(q - 2.0 * e * k as f64, v[0] - v[k])? * cp.inv_ratio_omega(v[0] - v[k])?)
    })?;
    Ok(-ab(cp, q, e, e, q, u - v[0])? * p)
}

/// Closed form of `F1` at root `l`; the literal form takes `u_1 - u_k` in the product.
pub fn coef_f1_closed(
    cp: &CouplingParams,
    q: C64,
    u: C64,
    roots: &[C64],
    l: usize,
    form: Form,
) -> Result<C64> {
    let e = cp.eta();
    let n = roots.len() as f64;
    let r = cp.th(q - 3.0 * e)? * cp.th(q - 2.0 * e * n + e)?
        / (cp.den(q - e, "theta(q-eta)")? * cp.den(q - 2.0 * e * n - e, "theta(q-2eta n-eta)")?);
    let anchor = match form {
        Form::Consistent => roots[l],
        Form::Literal => roots[0],
    };
    let mut p = C64::new(1.0, 0.0);
    for (k, &uk) in roots.iter().enumerate() {
        if k == l {
            continue;
        }
        let x = anchor - uk;
        p *= cp.th(x - 2.0 * e)? * cp.th(x + 0.5 + e)?
            / (cp.den(x + 0.5 - e, "theta(x+1/2-eta)")? * cp.den(x, "theta(u_l-u_k)")?);
    }
    Ok(-ab(cp, q, e, e, q, u - roots[l])? * cp.sqrt(r, "F1 radicand")? * p)
}

pub fn coef_f2(cp: &CouplingParams, q: C64, u: C64, v: &[C64], _form: Form) -> Result<C64> {
    let e = cp.eta();
    Ok(cp.inv_ratio_y(q, u - v[0])? * prod_from(1, v, |k| cp.ratio_z(q + 2.0 * e, v[k] - v[0]))?)
}

pub fn coef_g1(cp: &CouplingParams, q: C64, u: C64, v: &[C64], _form: Form) -> Result<C64> {
    let e = cp.eta();
    let (u1, u2) = (v[0], v[1]);
    let qm = q - 2.0 * e;
    let bracket = cp.ratio_z(q, u - u1)? * ab(cp, qm, e, e, qm, u - u2)?
        - ab(cp, q, e, e, q, u - u1)? * ab(cp, qm, e, e, qm, u1 - u2)?;
    let p = prod_from(2, v, |k| {
        Ok(cp.ratio_z(q + 2.0 * e, v[k] - u1)?
            * cp.ratio_z(q - 2.0 * e * k as f64, u2 - v[k])?
            * cp.inv_ratio_omega(u2 - v[k])?)
    })?;
    Ok(cp.inv_ratio_y(q, u - u1)? * bracket * p)
}

/// The literal form takes `alpha(q - 2eta, eta, u_1 - u_2)`.
pub fn coef_g2(cp: &CouplingParams, q: C64, u: C64, v: &[C64], form: Form) -> Result<C64> {
    let e = cp.eta();
    let (u1, u2) = (v[0], v[1]);
    let qa = match form {
        Form::Consistent => q + 2.0 * e,
        Form::Literal => q - 2.0 * e,
    };
    let pre = ab(cp, q, e, e, q, u - u1)?
        * cp.alpha(qa, e, u1 - u2)?
        * cp.inv_ratio_y(q, u - u1)?
        * cp.inv_beta(e, q - 2.0 * e, u1 - u2)?;
    let p = prod_from(2, v, |k| {
        Ok(cp.ratio_z(q + 2.0 * e, v[k] - u2)?
            * cp.ratio_z(q - 2.0 * e * k as f64, u1 - v[k])?
            * cp.inv_ratio_omega(u1 - v[k])?)
    })?;
    Ok(pre * p)
}

/// The literal form carries an overall minus sign.
pub fn coef_g3(cp: &CouplingParams, q: C64, u: C64, v: &[C64], form: Form) -> Result<C64> {
    let e = cp.eta();
    let (u1, u2) = (v[0], v[1]);
    let sign = match form {
        Form::Consistent => 1.0,
        Form::Literal => -1.0,
    };
    let bracket = cp.ratio_z(q, u - u1)? * cp.inv_ratio_omega(u - u1)? * cp.inv_ratio_y(q, u - u2)?
        - cp.alpha(e, -q, u - u1)? * cp.inv_ratio_y(q, u1 - u2)? * cp.inv_beta(e, q, u - u1)?;
    let p = prod_from(2, v, |k| {
        Ok(cp.ratio_z(q + 2.0 * e, v[k] - u2)?
            * cp.ratio_z(q - 2.0 * e * (k - 1) as f64, u1 - v[k])?
            * cp.inv_ratio_omega(u1 - v[k])?)
    })?;
    Ok(sign * ab(cp, q, e, -q, e, u - u1)? * bracket * p)
}

pub fn coef_h(cp: &CouplingParams, q: C64, u: C64, v: &[C64], _form: Form) -> Result<C64> {
    let e = cp.eta();
    let p = prod_from(1, v, |k| {
        Ok(cp.ratio_z(q - 2.0 * e * (k - 1) as f64, v[0] - v[k])? * cp.inv_ratio_omega(v[0] - v[k])?)
    })?;
    Ok(-cp.inv_ratio_y(q, u - v[0])? * p)
}

/// The literal form evaluates `gamma` and `delta` at `u - u_2` and the product at `u_a - u`.
pub fn coef_i(cp: &CouplingParams, q: C64, u: C64, v: &[C64], form: Form) -> Result<C64> {
    let e = cp.eta();
    let (u1, u2) = (v[0], v[1]);
    let x = match form {
        Form::Consistent => u - u1,
        Form::Literal => u - u2,
    };
    let pre = cp.inv_gamma(-q, q, x)?
        * (cp.delta(q, x)? * cp.inv_ratio_y(q - 2.0 * e, u1 - u2)?
            - cp.alpha(q, e, u - u1)? * cp.inv_ratio_y(q - 2.0 * e, u - u2)?);
    let p = prod_from(2, v, |k| {
        let qk = q - 2.0 * e * (k - 1) as f64;
        let (b2, b1) = match form {
            Form::Consistent => (u2 - v[k], u1 - v[k]),
            Form::Literal => (u2 - u, u1 - u),
        };
        Ok(cp.ratio_z(qk, b2)?
            * cp.ratio_z(qk, b1)?
            * cp.inv_ratio_omega(u1 - v[k])?
            * cp.inv_ratio_omega(u2 - v[k])?)
    })?;
    Ok(pre * p)
}

/// Reduced formula for an expansion coefficient name.
pub fn reduced(name: CoefficientName) -> Option<CoefficientFn> {
    Some(match name {
        CoefficientName::D => coef_d,
        CoefficientName::E => coef_e,
        CoefficientName::F1 => coef_f1,
        CoefficientName::F2 => coef_f2,
        CoefficientName::G1 => coef_g1,
        CoefficientName::G2 => coef_g2,
        CoefficientName::G3 => coef_g3,
        CoefficientName::H => coef_h,
        CoefficientName::I => coef_i,
        _ => return None,
    })
}

fn check_indices(name: CoefficientName, indices: &[usize], n: usize) -> Result<()> {
    let ok = indices.len() == name.arity()
        && indices.iter().all(|&i| i < n)
        && (indices.len() == 1 || indices[0] < indices[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} needs {} increasing indices below {n}, got {indices:?}",
            name.arity()
        )))
    }
}

/// Coefficient at general indices by substitution, including the `omega`
/// prefactor from reordering the creation operator.
pub fn coefficient(
    name: CoefficientName,
    indices: &[usize],
    u: C64,
    roots: &[C64],
    q: C64,
    config: &ModelConfig,
    form: Form,
) -> Result<IndexedCoefficient> {
    check_indices(name, indices, roots.len())?;
    let cp = config.couplings();
    let value = match name {
        CoefficientName::F1Closed => {
            single_prefactor(cp, roots, indices[0])? * coef_f1_closed(cp, q, u, roots, indices[0], form)?
        }
        CoefficientName::K1 | CoefficientName::K2 | CoefficientName::K3 => {
            k_value(name, indices, u, roots, q, config, form)?
        }
        _ => {
            let f = reduced(name).expect("expansion coefficient");
            if indices.len() == 1 {
                let v = substitute(roots, indices[0], None);
                single_prefactor(cp, roots, indices[0])? * f(cp, q, u, &v, form)?
            } else {
                let (l, j) = (indices[0], indices[1]);
                if (roots[l] - roots[j]).norm() < crate::bethe::PHI_COLLISION {
                    return Err(Error::RootCollision {
                        i: l,
                        j,
                        distance: (roots[l] - roots[j]).norm(),
                    });
                }
                let v = substitute(roots, l, Some(j));
                double_prefactor(cp, roots, l, j)? * f(cp, q, u, &v, form)?
            }
        }
    };
    Ok(IndexedCoefficient {
        name,
        indices: indices.to_vec(),
        value,
    })
}

fn k_value(
    name: CoefficientName,
    indices: &[usize],
    u: C64,
    roots: &[C64],
    q: C64,
    config: &ModelConfig,
    form: Form,
) -> Result<C64> {
    let cp = config.couplings();
    let e = cp.eta();
    let c = |n: CoefficientName| Ok::<_, Error>(coefficient(n, indices, u, roots, q, config, form)?.value);
    let qp = q + 2.0 * e;
    match name {
        CoefficientName::K1 => {
            let uj = roots[indices[0]];
            Ok(c(CoefficientName::D)? * a1(config, uj)? * gauge_ratio(config, q - 2.0 * e, q)?
                + c(CoefficientName::F1)? * a2(config, q, uj)?)
        }
        CoefficientName::K3 => {
            let uj = roots[indices[0]];
            Ok(c(CoefficientName::F2)? * a1(config, uj)? * gauge_ratio(config, q, qp)?
                + c(CoefficientName::H)? * a2(config, qp, uj)?)
        }
        CoefficientName::K2 => {
            let (ul, uj) = (roots[indices[0]], roots[indices[1]]);
            let r0 = gauge_ratio(config, q, qp)?;
            Ok(c(CoefficientName::E)? * a1(config, ul)? * a1(config, uj)? * gauge_ratio(config, q - 2.0 * e, qp)?
                + c(CoefficientName::G1)? * a1(config, ul)? * a2(config, q, uj)? * r0
                + c(CoefficientName::G2)? * a1(config, uj)? * a2(config, q, ul)? * r0
                + c(CoefficientName::G3)? * a2(config, qp, ul)? * a1(config, uj)? * r0
                + c(CoefficientName::I)? * a2(config, qp, ul)? * a2(config, qp, uj)?)
        }
        _ => unreachable!("not a K coefficient"),
    }
}

/// All `K1_j`, `K2_lj` (l < j) and `K3_j` at `(q, u)`.
pub fn k_coefficients(
    u: C64,
    roots: &[C64],
    q: C64,
    config: &ModelConfig,
    form: Form,
) -> Result<Vec<IndexedCoefficient>> {
    let n = roots.len();
    let mut out = Vec::new();
    for j in 0..n {
        out.push(coefficient(CoefficientName::K1, &[j], u, roots, q, config, form)?);
    }
    for l in 0..n {
        for j in l + 1..n {
            out.push(coefficient(CoefficientName::K2, &[l, j], u, roots, q, config, form)?);
        }
    }
    for j in 0..n {
        out.push(coefficient(CoefficientName::K3, &[j], u, roots, q, config, form)?);
    }
    Ok(out)
}
