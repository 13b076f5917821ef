use crate::error::Result;
use crate::rmatrix::CouplingParams;
use crate::theta::C64;

fn normalized(terms: &[C64]) -> f64 {
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    terms.iter().sum::<C64>().norm() / scale
}

/// The two scalar identities behind the symmetry of the creation operator.
///
/// Identity 1 uses `u[0..3]`, identity 2 uses `u[0..4]`; both residuals are
/// normalized by the largest term.
pub fn gather_identity_residuals(cp: &CouplingParams, q: C64, u: [C64; 4]) -> Result<[f64; 2]> {
    let e = cp.eta();
    let d = |a: usize, b: usize| u[a] - u[b];
    let om = |a, b| cp.ratio_omega(d(a, b));
    let iy = |x: C64, a, b| cp.inv_ratio_y(x, d(a, b));
    let z = |x: C64, a, b| cp.ratio_z(x, d(a, b));
    let qp = q + 2.0 * e;

    let l1 = -om(0, 1)? * cp.g(d(1, 0))? * iy(q, 1, 2)? * cp.inv_beta(-q, e, d(1, 0))?;
    let l2 = cp.alpha(e, -q, d(1, 0))? * cp.inv_beta(-q, e, d(1, 0))? * iy(q, 0, 2)?;
    let r1 = -om(2, 0)? * z(qp, 0, 2)? * iy(q, 1, 2)?;
    let r2 = -cp.alpha(e, qp, d(2, 0))? * cp.inv_beta(e, qp, d(2, 0))? * iy(q, 1, 0)?;
    let id1 = normalized(&[l1, l2, -r1, -r2]);

    let t1 = om(0, 1)?
        * (om(3, 1)? * z(qp, 1, 3)? * z(qp, 2, 3)? * iy(q, 0, 3)? * iy(qp, 1, 2)?
            + om(2, 3)? * om(2, 1)? * z(qp, 1, 2)? * z(qp, 3, 2)? * iy(q, 0, 2)? * iy(qp, 1, 3)?);
    let t2 = -(om(3, 0)? * z(qp, 0, 3)? * z(qp, 2, 3)? * iy(q, 1, 3)? * iy(qp, 0, 2)?
        + om(2, 3)? * om(2, 0)? * z(qp, 0, 2)? * z(qp, 3, 2)? * iy(q, 1, 2)? * iy(qp, 0, 3)?);
    let inner = |a: usize| -> Result<C64> {
        Ok(cp.delta(-qp, d(3, a))? * cp.inv_gamma(-qp, qp, d(3, a))? * iy(q, 3, 2)?
            + z(qp, 3, a)? * cp.alpha(e, qp, d(2, a))? * om(a, 3)? * cp.inv_beta(e, qp, d(2, a))? * iy(qp, a, 3)?)
    };
    let t3 = om(0, 1)? * iy(q, 0, 1)? * inner(1)?;
    let t4 = -iy(q, 1, 0)? * inner(0)?;
    let id2 = normalized(&[t1, t2, t3, t4]);
    Ok([id1, id2])
}

/// The six-term cancelation identity behind the double unwanted terms.
pub fn k2_identity_terms(cp: &CouplingParams, q: C64, u: C64, u1: C64, u2: C64) -> Result<[C64; 5]> {
    let e = cp.eta();
    let ab = |a1: C64, a2: C64, b1: C64, b2: C64, x: C64| -> Result<C64> {
        Ok(cp.alpha(a1, a2, x)? * cp.inv_beta(b1, b2, x)?)
    };
    let qm = q - 2.0 * e;
    let l1 = cp.delta(-q, u1 - u)? * cp.inv_gamma(-q, q, u1 - u)? * cp.inv_ratio_y(qm, u1 - u2)?
        + cp.ratio_z(q, u1 - u)? * ab(e, q, e, q, u2 - u)? * cp.ratio_omega(u - u1)? * cp.inv_ratio_y(q, u - u1)?;
    let l2 = cp.inv_gamma(-q, q, u - u1)?
        * (cp.delta(q, u - u1)? * cp.inv_ratio_y(qm, u1 - u2)? - cp.alpha(q, e, u - u1)? * cp.inv_ratio_y(qm, u - u2)?);
    let l3 = cp.inv_ratio_y(q, u - u1)?
        * (cp.ratio_z(q, u - u1)? * ab(qm, e, e, qm, u - u2)? - ab(q, e, e, q, u - u1)? * ab(qm, e, e, qm, u1 - u2)?);
    let l4 = ab(q, e, e, q, u - u1)?
        * cp.alpha(q + 2.0 * e, e, u1 - u2)?
        * cp.inv_ratio_y(q, u - u1)?
        * cp.inv_beta(e, qm, u1 - u2)?;
    let l5 = ab(q, e, -q, e, u - u1)?
        * (cp.ratio_z(q, u - u1)? * cp.inv_ratio_omega(u - u1)? * cp.inv_ratio_y(q, u - u2)?
            - ab(e, -q, e, q, u - u1)? * cp.inv_ratio_y(q, u1 - u2)?);
    let th = |x: C64| cp.th(x);
    let r1 = th(q - 3.0 * e)? / cp.den(q - e, "theta(q-eta)")?;
    let s1 = cp.sqrt(
        th(q - e)? * th(q - 5.0 * e)? / (cp.den(q + e, "theta(q+eta)")? * cp.den(q - 3.0 * e, "theta(q-3eta)")?),
        "K2 radicand 1",
    )?;
    let tp = cp.den(q + e, "theta(q+eta)")?;
    let s2 = cp.sqrt(th(q + 3.0 * e)? * th(q - 3.0 * e)? * th(q - e)? / (tp * tp * tp), "K2 radicand 2")?;
    let x12 = cp.scattering(u1 - u2)?;
    let x21 = cp.scattering(u2 - u1)?;
    Ok([l1 * r1, l2 * r1, l3 * s1 * x12, l4 * s1 * x21, l5 * s2 * x21])
}

pub fn k2_identity_residual(cp: &CouplingParams, q: C64, u: C64, u1: C64, u2: C64) -> Result<f64> {
    Ok(normalized(&k2_identity_terms(cp, q, u, u1, u2)?))
}

/// `alpha(eta,q,u)/beta(eta,q,u) + alpha(q,eta,-u)/beta(eta,q,-u)`, relative.
pub fn alpha_beta_unitarity_residual(cp: &CouplingParams, q: C64, u: C64) -> Result<f64> {
    let e = cp.eta();
    let lhs = cp.alpha(e, q, u)? * cp.inv_beta(e, q, u)?;
    let rhs = -cp.alpha(q, e, -u)? * cp.inv_beta(e, q, -u)?;
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()))
}

/// Closed-form `omega(u)` against its defining ratio at `q1` and at `q2`.
pub fn omega_residual(cp: &CouplingParams, q1: C64, q2: C64, u: C64) -> Result<f64> {
    let w = cp.ratio_omega(u)?;
    let a = cp.omega_defining_ratio(q1, u)?;
    let b = cp.omega_defining_ratio(q2, u)?;
    Ok(((a - w).norm().max((b - w).norm())) / w.norm())
}
