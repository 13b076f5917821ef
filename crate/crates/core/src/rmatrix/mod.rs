//! The dynamical R-matrix on `V (x) V`, `V = C^3`, and its residual checks.
//!
//! Basis order is `e1 (x) e1, e1 (x) e2, ..., e3 (x) e3`; `e_a (x) e_b` sits at
//! index `3a + b` (zero-based letters).

mod weights;

pub use weights::{
    BranchSigns, CouplingParams, BRANCH_GUARD, DENOMINATOR_GUARD, G_EXACT_WINDOW, G_REJECT_WINDOW,
};

use crate::error::Result;
use crate::linalg::{frobenius, identity, rel_matrix_diff, zeros, CMatrix};
use crate::theta::C64;

/// h-weights of `e1, e2, e3`.
pub const WEIGHTS: [i32; 3] = [1, 0, -1];

/// A 9x9 R-matrix evaluated at `(q, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    pub entries: CMatrix,
    pub q: C64,
    pub u: C64,
}

impl RMatrix {
    /// Entry `((i,j),(k,l))` with one-based letters.
    pub fn entry(&self, row: (usize, usize), col: (usize, usize)) -> C64 {
        self.entries[[3 * (row.0 - 1) + row.1 - 1, 3 * (col.0 - 1) + col.1 - 1]]
    }
}

/// Number of structurally nonzero entries.
pub const STRUCTURAL_NONZEROS: usize = 19;

/// Assembles the 19 weighted terms.
pub fn build_r(cp: &CouplingParams, q: C64, u: C64) -> Result<RMatrix> {
    let e = cp.eta();
    let mut m = zeros(9);
    // E_ij (x) E_kl lands at row (i,k), column (j,l); one-based letters
    let mut put = |i: usize, j: usize, k: usize, l: usize, v: C64| {
        m[[3 * (i - 1) + k - 1, 3 * (j - 1) + l - 1]] = v;
    };
    let g = cp.g(u)?;
    put(1, 1, 1, 1, g);
    put(3, 3, 3, 3, g);
    put(2, 2, 2, 2, cp.epsilon(q, u)?);
    put(1, 2, 2, 1, cp.alpha(e, q, u)?);
    put(2, 1, 1, 2, cp.alpha(q, e, u)?);
    put(2, 3, 3, 2, cp.alpha(-q, e, u)?);
    put(3, 2, 2, 3, cp.alpha(e, -q, u)?);
    put(2, 2, 1, 1, cp.beta(e, q, u)?);
    put(1, 1, 2, 2, cp.beta(q, e, u)?);
    put(3, 3, 2, 2, cp.beta(-q, e, u)?);
    put(2, 2, 3, 3, cp.beta(e, -q, u)?);
    put(3, 3, 1, 1, cp.gamma(-q, q, u)?);
    put(2, 3, 2, 1, cp.gamma(-q, e, u)?);
    put(3, 2, 1, 2, cp.gamma(e, q, u)?);
    put(1, 1, 3, 3, cp.gamma(q, -q, u)?);
    put(2, 1, 2, 3, cp.gamma(q, e, u)?);
    put(1, 2, 3, 2, cp.gamma(e, -q, u)?);
    put(3, 1, 1, 3, cp.delta(q, u)?);
    put(1, 3, 3, 1, cp.delta(-q, u)?);
    Ok(RMatrix { entries: m, q, u })
}

/// The flip `e_a (x) e_b -> e_b (x) e_a`.
pub fn permutation() -> CMatrix {
    let mut p = zeros(9);
    for a in 0..3 {
        for b in 0..3 {
            p[[3 * b + a, 3 * a + b]] = C64::new(1.0, 0.0);
        }
    }
    p
}

/// Diagonal of `h (x) 1 + 1 (x) h`.
fn total_weight(index: usize) -> i32 {
    WEIGHTS[index / 3] + WEIGHTS[index % 3]
}

/// `|[h (x) 1 + 1 (x) h, R]|`.
pub fn zero_weight_residual(r: &RMatrix) -> f64 {
    let mut acc = 0.0;
    for ((i, j), v) in r.entries.indexed_iter() {
        let d = (total_weight(i) - total_weight(j)) as f64;
        acc += (v * d).norm_sqr();
    }
    acc.sqrt()
}

/// Count of entries that are not exactly zero.
pub fn structural_nonzeros(r: &RMatrix) -> usize {
    r.entries.iter().filter(|v| **v != C64::new(0.0, 0.0)).count()
}

/// `|R(q,0) - P|`.
pub fn permutation_residual(cp: &CouplingParams, q: C64) -> Result<f64> {
    let r = build_r(cp, q, C64::new(0.0, 0.0))?;
    Ok(frobenius(&(&r.entries - &permutation())))
}

/// `|R12(q,u) R21(q,-u) - g(u) g(-u)|`, relative to `max(|g(u) g(-u) 1|, |R12| |R21|)`.
///
/// The second scale keeps the residual meaningful where `g(-u)` vanishes.
pub fn unitarity_residual(cp: &CouplingParams, q: C64, u: C64) -> Result<f64> {
    let p = permutation();
    let r12 = build_r(cp, q, u)?.entries;
    let r21 = p.dot(&build_r(cp, q, -u)?.entries).dot(&p);
    let gg = cp.g(u)? * cp.g(-u)?;
    let scale = (3.0 * gg.norm()).max(frobenius(&r12) * frobenius(&r21));
    let lhs = r12.dot(&r21);
    let rhs = identity(9).mapv(|v| v * gg);
    Ok(frobenius(&(lhs - rhs)) / scale)
}

/// Lifts `R_ab` to `V (x) V (x) V` with the dynamical shift `q - 2 eta h_c`.
///
/// `slots = (a, b, c)` with `a` the first tensor factor of `R`. When `shifted`
/// is false the spectator weight is ignored.
fn lift(
    cp: &CouplingParams,
    q: C64,
    u: C64,
    slots: (usize, usize, usize),
    shifted: bool,
) -> Result<CMatrix> {
    let (a, b, c) = slots;
    let mut by_weight = Vec::with_capacity(3);
    for w in WEIGHTS {
        let shift = if shifted { 2.0 * cp.eta() * w as f64 } else { C64::new(0.0, 0.0) };
        by_weight.push(build_r(cp, q - shift, u)?.entries);
    }
    let mut m = zeros(27);
    for col in 0..27 {
        let x = [col / 9, (col / 3) % 3, col % 3];
        let r = &by_weight[x[c]];
        let rc = 3 * x[a] + x[b];
        for rr in 0..9 {
            let v = r[[rr, rc]];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let mut y = x;
            y[a] = rr / 3;
            y[b] = rr % 3;
            m[[9 * y[0] + 3 * y[1] + y[2], col]] = v;
        }
    }
    Ok(m)
}

/// Residual of
/// `R12(q-2eta h3, u12) R13(q,u1) R23(q-2eta h1, u2) = R23(q,u2) R13(q-2eta h2, u1) R12(q,u12)`.
pub fn dybe_residual(cp: &CouplingParams, q: C64, u1: C64, u2: C64) -> Result<f64> {
    let u12 = u1 - u2;
    let lhs = lift(cp, q, u12, (0, 1, 2), true)?
        .dot(&lift(cp, q, u1, (0, 2, 1), false)?)
        .dot(&lift(cp, q, u2, (1, 2, 0), true)?);
    let rhs = lift(cp, q, u2, (1, 2, 0), false)?
        .dot(&lift(cp, q, u1, (0, 2, 1), true)?)
        .dot(&lift(cp, q, u12, (0, 1, 2), false)?);
    Ok(rel_matrix_diff(&lhs, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp() -> CouplingParams {
        CouplingParams::with_tau(C64::new(0.11, 0.0), C64::new(0.0, 0.8)).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_spectral_parameter_gives_permutation() {
        assert!(permutation_residual(&cp(), c(0.4, 0.0)).unwrap() < 1e-12);
    }

    #[test]
    fn nineteen_terms_with_documented_placement() {
        let p = cp();
        let r = build_r(&p, c(0.4, 0.0), c(0.17, 0.0)).unwrap();
        assert_eq!(structural_nonzeros(&r), STRUCTURAL_NONZEROS);
        assert_eq!(r.entry((1, 2), (2, 1)), p.alpha(p.eta(), c(0.4, 0.0), c(0.17, 0.0)).unwrap());
        assert!(zero_weight_residual(&r) < 1e-12);
    }

    #[test]
    fn unitarity_at_reference_point_and_zero() {
        let p = cp();
        assert!(unitarity_residual(&p, c(0.4, 0.0), c(0.17, 0.0)).unwrap() < 1e-10);
        assert!(unitarity_residual(&p, c(0.4, 0.0), c(0.0, 0.0)).unwrap() < 1e-14);
    }

    #[test]
    fn dybe_special_points() {
        let p = cp();
        assert!(dybe_residual(&p, c(0.4, 0.0), c(0.2, 0.0), c(0.2, 0.0)).unwrap() < 1e-10);
        assert!(dybe_residual(&p, c(0.4, 0.0), c(0.23, 0.03), c(0.0, 0.0)).unwrap() < 1e-10);
        assert!(dybe_residual(&p, c(0.37, 0.02), c(0.21, 0.03), c(-0.09, 0.01)).unwrap() < 1e-10);
    }

    #[test]
    fn dropping_the_dynamical_shift_breaks_dybe() {
        let p = cp();
        let (q, u1, u2) = (c(0.37, 0.02), c(0.21, 0.03), c(-0.09, 0.01));
        let lhs = lift(&p, q, u1 - u2, (0, 1, 2), false)
            .unwrap()
            .dot(&lift(&p, q, u1, (0, 2, 1), false).unwrap())
            .dot(&lift(&p, q, u2, (1, 2, 0), false).unwrap());
        let rhs = lift(&p, q, u2, (1, 2, 0), false)
            .unwrap()
            .dot(&lift(&p, q, u1, (0, 2, 1), false).unwrap())
            .dot(&lift(&p, q, u1 - u2, (0, 1, 2), false).unwrap());
        assert!(rel_matrix_diff(&lhs, &rhs) > 1e-4);
    }
}
