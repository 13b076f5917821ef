//! Representations, the q-difference operator algebra of Lax entries, the
//! transfer matrix and the RLL check.
//!
//! A Lax entry `L_ij(u)` acts on `W`-valued functions as
//! `(L_ij f)(q) = L_ij(q,u) f(q - 2 eta w_j)`, with `w = (1, 0, -1)`.

mod operator;
mod rep;
mod space;

pub use operator::{
    compose, Applied, DifferenceOperator, FnWFunction, MatrixFn, ScalarFn, ShiftedOperator,
    TrigPolynomial, WFunction,
};
pub use rep::{
    chain_rep, fundamental_rep, lax_difference, lax_entries, lax_entry, rll_residual, tensor_rep,
    transfer_matrix, zero_weight_residual, EntryName, LaxFn, LaxRep, RllForm, TransferMatrix,
};
pub use space::WeightedSpace;

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::linalg::{frobenius, CVector};
    use crate::rmatrix::{permutation, CouplingParams};
    use crate::sampling::GenericSampler;
    use crate::theta::C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cp() -> Arc<CouplingParams> {
        Arc::new(CouplingParams::with_tau(c(0.11, 0.0), c(0.0, 0.8)).unwrap())
    }

    #[test]
    fn fundamental_at_evaluation_point_is_permutation() {
        let rep = fundamental_rep(cp(), c(0.07, 0.0));
        let l = rep.lax(c(0.3, 0.02), c(0.07, 0.0)).unwrap();
        assert!(frobenius(&(l - permutation())) < 1e-12);
    }

    #[test]
    fn shift_table_and_weight_changes() {
        use EntryName::*;
        let shifts: Vec<i32> = [A1, A2, A3, B1, B2, B3, C1, C2, C3].iter().map(|n| n.shift()).collect();
        assert_eq!(shifts, vec![-1, 0, 1, 0, 1, 1, -1, -1, 0]);
        assert_eq!(B2.weight_change(), -2);
        assert_eq!(B1.weight_change(), -1);
        assert_eq!(B3.weight_change(), -1);
        assert_eq!(C2.weight_change(), 2);
        assert_eq!(A3.weight_change(), 0);
    }

    #[test]
    fn tensor_is_associative_and_matches_chain() {
        let p = cp();
        let z = [c(0.07, 0.0), c(-0.13, 0.0), c(0.19, 0.0)];
        let v: Vec<_> = z.iter().map(|&zi| fundamental_rep(p.clone(), zi)).collect();
        let left = tensor_rep(&tensor_rep(&v[0], &v[1]).unwrap(), &v[2]).unwrap();
        let right = tensor_rep(&v[0], &tensor_rep(&v[1], &v[2]).unwrap()).unwrap();
        let direct = chain_rep(p, &z);
        let (q, u) = (c(0.37, 0.02), c(0.23, 0.05));
        assert!(lax_difference(&left, &right, q, u).unwrap() < 1e-12);
        assert!(lax_difference(&left, &direct, q, u).unwrap() < 1e-12);
    }

    #[test]
    fn zero_weight_for_products() {
        let rep = chain_rep(cp(), &[c(0.07, 0.0), c(-0.13, 0.0)]);
        assert!(zero_weight_residual(&rep, c(0.37, 0.02), c(0.23, 0.05)).unwrap() < 1e-12);
    }

    #[test]
    fn b2_shift_on_linear_function() {
        let rep = chain_rep(cp(), &[c(0.07, 0.0)]);
        let u = c(0.23, 0.05);
        let b2 = lax_entry(&rep, u, EntryName::B2);
        let v = CVector::from_vec(vec![c(1.0, 0.0), c(0.5, -0.2), c(-0.3, 0.1)]);
        let vv = v.clone();
        let f = FnWFunction::new(3, move |q: C64| Ok(vv.mapv(|x| x * q)));
        let q = c(0.31, 0.01);
        let got = b2.apply(&f, q).unwrap();
        let want = rep.block(q, u, 0, 2).unwrap().dot(&v.mapv(|x| x * (q + 0.22)));
        assert!(crate::linalg::rel_vector_diff(&got, &want) < 1e-15);
    }

    #[test]
    fn transfer_matrix_is_weight_block_diagonal() {
        let rep = chain_rep(cp(), &[c(0.07, 0.0), c(-0.13, 0.0)]);
        let t = transfer_matrix(&rep, c(0.23, 0.05));
        assert!(t.off_diagonal_weight_residual(c(0.37, 0.02)).unwrap() < 1e-12);
        let shifts: Vec<i32> = t.parts.iter().map(|p| p.shift()).collect();
        assert_eq!(shifts, vec![-1, 0, 1]);
    }

    #[test]
    fn rll_holds_only_with_conjugation() {
        let mut s = GenericSampler::new(3, 0);
        for z in [vec![c(0.07, 0.0)], vec![c(0.07, 0.0), c(-0.13, 0.0)]] {
            let rep = chain_rep(cp(), &z);
            let (q, u1, u2) = (c(0.37, 0.02), c(0.21, 0.03), c(-0.09, 0.01));
            assert!(rll_residual(&rep, q, u1, u2, RllForm::Conjugated, &mut s).unwrap() < 1e-10);
            assert!(rll_residual(&rep, q, u1, u2, RllForm::Unconjugated, &mut s).unwrap() > 1e-3);
            assert!(rll_residual(&rep, q, u1, u1, RllForm::Conjugated, &mut s).unwrap() < 1e-10);
        }
    }
}
