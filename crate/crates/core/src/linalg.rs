//! Small dense complex helpers on top of `ndarray`.

use ndarray::{Array1, Array2};

use crate::theta::C64;

pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros((n, n))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::from_diag_elem(n, C64::new(1.0, 0.0))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `sum conj(a_i) b_i`.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `|a - b| / max(|a|, |b|)` for matrices, zero when both vanish.
pub fn rel_matrix_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let s = frobenius(a).max(frobenius(b));
    if s == 0.0 {
        0.0
    } else {
        frobenius(&(a - b)) / s
    }
}

pub fn rel_vector_diff(a: &CVector, b: &CVector) -> f64 {
    let s = norm(a).max(norm(b));
    if s == 0.0 {
        0.0
    } else {
        norm(&(a - b)) / s
    }
}
