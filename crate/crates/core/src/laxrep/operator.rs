use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::laxrep::WeightedSpace;
use crate::linalg::{identity, CMatrix, CVector};
use crate::sampling::GenericSampler;
use crate::theta::C64;

/// A vector-valued function of the dynamical variable.
pub trait WFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, q: C64) -> Result<CVector>;
}

impl<T: WFunction + ?Sized> WFunction for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, q: C64) -> Result<CVector> {
        (**self).eval(q)
    }
}

/// `q -> sum_k c_k exp(2 pi i k q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    coeffs: Vec<CVector>,
}

impl TrigPolynomial {
    pub fn new(coeffs: Vec<CVector>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    /// Random coefficients of frequencies `0..=degree`, zero outside `support`.
    pub fn random(
        sampler: &mut GenericSampler,
        dim: usize,
        degree: usize,
        support: Option<&[usize]>,
    ) -> Self {
        let mask: Vec<bool> = match support {
            Some(idx) => {
                let mut m = vec![false; dim];
                for &i in idx {
                    m[i] = true;
                }
                m
            }
            None => vec![true; dim],
        };
        let coeffs = (0..=degree)
            .map(|_| {
                CVector::from_iter((0..dim).map(|i| {
                    let v = C64::new(sampler.unit(), sampler.unit());
                    if mask[i] {
                        v
                    } else {
                        C64::new(0.0, 0.0)
                    }
                }))
            })
            .collect();
        Self { coeffs }
    }
}

impl WFunction for TrigPolynomial {
    fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    fn eval(&self, q: C64) -> Result<CVector> {
        let mut out = CVector::zeros(self.dim());
        for (k, c) in self.coeffs.iter().enumerate() {
            let phase = (C64::new(0.0, 2.0 * PI * k as f64) * q).exp();
            out.scaled_add(phase, c);
        }
        Ok(out)
    }
}

/// A [`WFunction`] backed by a closure.
pub struct FnWFunction<F> {
    dim: usize,
    f: F,
}

impl<F> FnWFunction<F>
where
    F: Fn(C64) -> Result<CVector> + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> WFunction for FnWFunction<F>
where
    F: Fn(C64) -> Result<CVector> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, q: C64) -> Result<CVector> {
        (self.f)(q)
    }
}

pub type MatrixFn = Arc<dyn Fn(C64) -> Result<CMatrix> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(C64) -> Result<C64> + Send + Sync>;

/// `(X f)(q) = M(q) f(q + step * shift)` with a declared h-weight change.
#[derive(Clone)]
pub struct ShiftedOperator {
    space: Arc<WeightedSpace>,
    step: C64,
    shift: i32,
    weight_change: i32,
    matrix_fn: MatrixFn,
}

impl fmt::Debug for ShiftedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShiftedOperator")
            .field("dim", &self.space.dim())
            .field("shift", &self.shift)
            .field("weight_change", &self.weight_change)
            .finish()
    }
}

impl ShiftedOperator {
    pub fn new(
        space: Arc<WeightedSpace>,
        step: C64,
        shift: i32,
        weight_change: i32,
        matrix_fn: MatrixFn,
    ) -> Self {
        Self {
            space,
            step,
            shift,
            weight_change,
            matrix_fn,
        }
    }

    pub fn identity(space: Arc<WeightedSpace>, step: C64) -> Self {
        let d = space.dim();
        Self::new(space, step, 0, 0, Arc::new(move |_| Ok(identity(d))))
    }

    pub fn space(&self) -> &Arc<WeightedSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn step(&self) -> C64 {
        self.step
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn weight_change(&self) -> i32 {
        self.weight_change
    }

    pub fn matrix(&self, q: C64) -> Result<CMatrix> {
        (self.matrix_fn)(q)
    }

    fn check_compatible(&self, other: &ShiftedOperator) -> Result<()> {
        if self.step != other.step || *self.space != *other.space {
            return Err(Error::SpaceMismatch(format!(
                "dim {} (step {}) vs dim {} (step {})",
                self.dim(),
                self.step,
                other.dim(),
                other.step
            )));
        }
        Ok(())
    }

    /// `self` after `other`: shifts and weight changes add, matrices multiply
    /// as `M_self(q) M_other(q + step * shift_self)`.
    pub fn compose(&self, other: &ShiftedOperator) -> Result<ShiftedOperator> {
        self.check_compatible(other)?;
        let (a, b) = (self.matrix_fn.clone(), other.matrix_fn.clone());
        let offset = self.step * self.shift as f64;
        Ok(ShiftedOperator::new(
            self.space.clone(),
            self.step,
            self.shift + other.shift,
            self.weight_change + other.weight_change,
            Arc::new(move |q| Ok(a(q)?.dot(&b(q + offset)?))),
        ))
    }

    /// Left multiplication by a scalar function: `(c X f)(q) = c(q) (X f)(q)`.
    pub fn scale(&self, c: ScalarFn) -> ShiftedOperator {
        let m = self.matrix_fn.clone();
        ShiftedOperator {
            matrix_fn: Arc::new(move |q| {
                let s = c(q)?;
                Ok(m(q)?.mapv(|v| v * s))
            }),
            ..self.clone()
        }
    }

    /// Replaces the matrix part by `P M P` for a diagonal 0/1 mask.
    pub fn projected(&self, mask: Arc<Vec<bool>>) -> ShiftedOperator {
        let m = self.matrix_fn.clone();
        ShiftedOperator {
            matrix_fn: Arc::new(move |q| {
                let mut a = m(q)?;
                for ((i, j), v) in a.indexed_iter_mut() {
                    if !(mask[i] && mask[j]) {
                        *v = C64::new(0.0, 0.0);
                    }
                }
                Ok(a)
            }),
            ..self.clone()
        }
    }

    pub fn apply(&self, f: &dyn WFunction, q: C64) -> Result<CVector> {
        let v = f.eval(q + self.step * self.shift as f64)?;
        Ok(self.matrix(q)?.dot(&v))
    }
}

/// Composition of shifted operators.
pub fn compose(x: &ShiftedOperator, y: &ShiftedOperator) -> Result<ShiftedOperator> {
    x.compose(y)
}

/// A finite sum of shifted operators.
#[derive(Clone, Debug)]
pub struct DifferenceOperator {
    space: Arc<WeightedSpace>,
    step: C64,
    terms: Vec<ShiftedOperator>,
}

impl From<ShiftedOperator> for DifferenceOperator {
    fn from(x: ShiftedOperator) -> Self {
        Self {
            space: x.space.clone(),
            step: x.step,
            terms: vec![x],
        }
    }
}

impl DifferenceOperator {
    pub fn zero(space: Arc<WeightedSpace>, step: C64) -> Self {
        Self {
            space,
            step,
            terms: Vec::new(),
        }
    }

    pub fn identity(space: Arc<WeightedSpace>, step: C64) -> Self {
        ShiftedOperator::identity(space, step).into()
    }

    pub fn terms(&self) -> &[ShiftedOperator] {
        &self.terms
    }

    pub fn space(&self) -> &Arc<WeightedSpace> {
        &self.space
    }

    /// Common weight change of all terms, `None` if empty or mixed.
    pub fn weight_change(&self) -> Option<i32> {
        let first = self.terms.first()?.weight_change;
        self.terms
            .iter()
            .all(|t| t.weight_change == first)
            .then_some(first)
    }

    fn check(&self, other: &DifferenceOperator) -> Result<()> {
        if self.step != other.step || *self.space != *other.space {
            return Err(Error::SpaceMismatch("difference operators on different spaces".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &DifferenceOperator) -> Result<DifferenceOperator> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self {
            terms,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &DifferenceOperator) -> Result<DifferenceOperator> {
        self.add(&other.scale(Arc::new(|_| Ok(C64::new(-1.0, 0.0)))))
    }

    /// `self` after `other`, distributed over terms.
    pub fn compose(&self, other: &DifferenceOperator) -> Result<DifferenceOperator> {
        self.check(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.compose(b)?);
            }
        }
        Ok(Self {
            terms,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: ScalarFn) -> DifferenceOperator {
        Self {
            terms: self.terms.iter().map(|t| t.scale(c.clone())).collect(),
            ..self.clone()
        }
    }

    pub fn projected(&self, mask: Arc<Vec<bool>>) -> DifferenceOperator {
        Self {
            terms: self.terms.iter().map(|t| t.projected(mask.clone())).collect(),
            ..self.clone()
        }
    }

    pub fn apply(&self, f: &dyn WFunction, q: C64) -> Result<CVector> {
        let mut out = CVector::zeros(self.space.dim());
        for t in &self.terms {
            out += &t.apply(f, q)?;
        }
        Ok(out)
    }

    /// Matrix parts grouped by shift, sorted by shift.
    pub fn matrices(&self, q: C64) -> Result<Vec<(i32, CMatrix)>> {
        let mut out: Vec<(i32, CMatrix)> = Vec::new();
        for t in &self.terms {
            let m = t.matrix(q)?;
            match out.iter_mut().find(|(s, _)| *s == t.shift) {
                Some((_, acc)) => *acc += &m,
                None => out.push((t.shift, m)),
            }
        }
        out.sort_by_key(|(s, _)| *s);
        Ok(out)
    }
}

/// An operator applied to a function, itself a function of `q`.
#[derive(Clone)]
pub struct Applied {
    op: DifferenceOperator,
    f: Arc<dyn WFunction>,
}

impl Applied {
    pub fn new(op: DifferenceOperator, f: Arc<dyn WFunction>) -> Self {
        Self { op, f }
    }
}

impl WFunction for Applied {
    fn dim(&self) -> usize {
        self.op.space.dim()
    }

    fn eval(&self, q: C64) -> Result<CVector> {
        self.op.apply(self.f.as_ref(), q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rel_vector_diff;

    fn space() -> Arc<WeightedSpace> {
        Arc::new(WeightedSpace::new(vec![C64::new(0.0, 0.0)]))
    }

    fn op(shift: i32, seed: f64) -> ShiftedOperator {
        ShiftedOperator::new(
            space(),
            C64::new(0.22, 0.0),
            shift,
            0,
            Arc::new(move |q| {
                Ok(CMatrix::from_shape_fn((3, 3), |(i, j)| {
                    C64::new(seed + i as f64, j as f64) * (q + seed * (i + 2 * j) as f64)
                }))
            }),
        )
    }

    #[test]
    fn identity_is_neutral() {
        let x = op(1, 0.3);
        let id = ShiftedOperator::identity(space(), C64::new(0.22, 0.0));
        let c = id.compose(&x).unwrap();
        let q = C64::new(0.1, 0.2);
        assert_eq!(c.shift(), 1);
        assert_eq!(c.matrix(q).unwrap(), x.matrix(q).unwrap());
    }

    #[test]
    fn composition_law() {
        let (x, y) = (op(-1, 0.3), op(1, 0.7));
        let xy = x.compose(&y).unwrap();
        let q = C64::new(0.31, -0.05);
        let want = x.matrix(q).unwrap().dot(&y.matrix(q - 0.22).unwrap());
        assert_eq!(xy.shift(), 0);
        assert!((xy.matrix(q).unwrap() - want).iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn space_mismatch_is_reported() {
        let other = ShiftedOperator::identity(space(), C64::new(0.3, 0.0));
        assert!(matches!(op(0, 0.1).compose(&other), Err(Error::SpaceMismatch(_))));
    }

    #[test]
    fn scalar_acts_after_shift() {
        let x = op(1, 0.4);
        let c: ScalarFn = Arc::new(|q| Ok(q * q + 1.0));
        let f = FnWFunction::new(3, |q: C64| Ok(CVector::from_vec(vec![q, q * 2.0, C64::new(1.0, 0.0)])));
        let q = C64::new(0.2, 0.1);
        let got = x.scale(c.clone()).apply(&f, q).unwrap();
        let want = x.apply(&f, q).unwrap().mapv(|v| v * c(q).unwrap());
        assert!(rel_vector_diff(&got, &want) < 1e-15);
    }
}
