use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::laxrep::operator::{DifferenceOperator, ShiftedOperator, WFunction};
use crate::laxrep::WeightedSpace;
use crate::linalg::{frobenius, rel_vector_diff, zeros, CMatrix, CVector};
use crate::rmatrix::{build_r, CouplingParams, WEIGHTS};
use crate::sampling::GenericSampler;
use crate::theta::C64;

pub type LaxFn = Arc<dyn Fn(C64, C64) -> Result<CMatrix> + Send + Sync>;

/// A representation: the operator `L(q,u)` on `V (x) W`.
///
/// The auxiliary space is the most significant tensor factor, so block
/// `(i, j)` of the `3D x 3D` matrix is `L_ij`, a `D x D` matrix.
#[derive(Clone)]
pub struct LaxRep {
    space: Arc<WeightedSpace>,
    couplings: Arc<CouplingParams>,
    lax: LaxFn,
}

impl fmt::Debug for LaxRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LaxRep").field("space", &self.space).finish()
    }
}

impl LaxRep {
    pub fn new(space: Arc<WeightedSpace>, couplings: Arc<CouplingParams>, lax: LaxFn) -> Self {
        Self {
            space,
            couplings,
            lax,
        }
    }

    pub fn space(&self) -> &Arc<WeightedSpace> {
        &self.space
    }

    pub fn couplings(&self) -> &Arc<CouplingParams> {
        &self.couplings
    }

    /// The `2 eta` lattice step of the dynamical variable.
    pub fn step(&self) -> C64 {
        2.0 * self.couplings.eta()
    }

    pub fn lax(&self, q: C64, u: C64) -> Result<CMatrix> {
        (self.lax)(q, u)
    }

    /// Block `L_ij(q,u)`, zero-based auxiliary letters.
    pub fn block(&self, q: C64, u: C64, i: usize, j: usize) -> Result<CMatrix> {
        let d = self.space.dim();
        Ok(self
            .lax(q, u)?
            .slice(ndarray::s![i * d..(i + 1) * d, j * d..(j + 1) * d])
            .to_owned())
    }
}

/// `V(z)` with `L(q,u) = R(q, u - z)`.
pub fn fundamental_rep(couplings: Arc<CouplingParams>, z: C64) -> LaxRep {
    let cp = couplings.clone();
    LaxRep::new(
        Arc::new(WeightedSpace::new(vec![z])),
        couplings,
        Arc::new(move |q, u| Ok(build_r(&cp, q, u - z)?.entries)),
    )
}

/// `X (x) Y` with `L(q,u) = L_X(q - 2 eta h_Y, u) L_Y(q, u)`.
pub fn tensor_rep(x: &LaxRep, y: &LaxRep) -> Result<LaxRep> {
    if *x.couplings != *y.couplings {
        return Err(Error::SpaceMismatch("factors use different couplings".into()));
    }
    let space = Arc::new(x.space.tensor(&y.space));
    let (xr, yr) = (x.clone(), y.clone());
    let step = x.step();
    Ok(LaxRep::new(
        space,
        x.couplings.clone(),
        Arc::new(move |q, u| {
            let (dx, dy) = (xr.space.dim(), yr.space.dim());
            let d = 3 * dx * dy;
            let mut by_weight: HashMap<i32, CMatrix> = HashMap::new();
            for &w in yr.space.weights() {
                if let std::collections::hash_map::Entry::Vacant(e) = by_weight.entry(w) {
                    e.insert(xr.lax(q - step * w as f64, u)?);
                }
            }
            let ly = yr.lax(q, u)?;
            let mut first = zeros(d);
            let mut second = zeros(d);
            for a in 0..3 {
                for xi in 0..dx {
                    for yi in 0..dy {
                        let col = (a * dx + xi) * dy + yi;
                        let lx = &by_weight[&yr.space.weight(yi)];
                        for a2 in 0..3 {
                            for x2 in 0..dx {
                                first[[(a2 * dx + x2) * dy + yi, col]] = lx[[a2 * dx + x2, a * dx + xi]];
                            }
                            for y2 in 0..dy {
                                second[[(a2 * dx + xi) * dy + y2, col]] = ly[[a2 * dy + y2, a * dy + yi]];
                            }
                        }
                    }
                }
            }
            Ok(first.dot(&second))
        }),
    ))
}

/// `W = V(z_1) (x) ... (x) V(z_n)` built directly as
/// `R_01(q - 2 eta (h_2 + ... + h_n), u - z_1) ... R_0n(q, u - z_n)`.
pub fn chain_rep(couplings: Arc<CouplingParams>, z: &[C64]) -> LaxRep {
    let space = Arc::new(WeightedSpace::new(z.to_vec()));
    let sp = space.clone();
    let cp = couplings.clone();
    let z = z.to_vec();
    LaxRep::new(
        space,
        couplings,
        Arc::new(move |q, u| {
            let n = z.len();
            let d = sp.dim();
            let step = 2.0 * cp.eta();
            let mut acc: Option<CMatrix> = None;
            for s in 0..n {
                // weight carried by sites after s, per basis index
                let stride = 3usize.pow((n - 1 - s) as u32);
                let mut by_weight: HashMap<i32, CMatrix> = HashMap::new();
                let mut factor = zeros(3 * d);
                for a in 0..3 {
                    for idx in 0..d {
                        let tail: i32 = sp.letters(idx)[s + 1..].iter().map(|&l| WEIGHTS[l]).sum();
                        if let std::collections::hash_map::Entry::Vacant(e) = by_weight.entry(tail) {
                            e.insert(build_r(&cp, q - step * tail as f64, u - z[s])?.entries);
                        }
                        let r = &by_weight[&tail];
                        let xs = (idx / stride) % 3;
                        let base = idx - xs * stride;
                        let col = a * d + idx;
                        for a2 in 0..3 {
                            for x2 in 0..3 {
                                let v = r[[3 * a2 + x2, 3 * a + xs]];
                                if v != C64::new(0.0, 0.0) {
                                    factor[[a2 * d + base + x2 * stride, col]] = v;
                                }
                            }
                        }
                    }
                }
                acc = Some(match acc {
                    None => factor,
                    Some(m) => m.dot(&factor),
                });
            }
            Ok(acc.expect("at least one site"))
        }),
    )
}

/// `|[h_V (x) 1 + 1 (x) h_W, L(q,u)]|`.
pub fn zero_weight_residual(rep: &LaxRep, q: C64, u: C64) -> Result<f64> {
    let l = rep.lax(q, u)?;
    let d = rep.space.dim();
    let w = |i: usize| WEIGHTS[i / d] + rep.space.weight(i % d);
    let mut acc = 0.0;
    for ((i, j), v) in l.indexed_iter() {
        acc += (v * (w(i) - w(j)) as f64).norm_sqr();
    }
    Ok(acc.sqrt())
}

/// Names of the nine Lax entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryName {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
    C1,
    C2,
    C3,
}

impl EntryName {
    pub const ALL: [EntryName; 9] = [
        EntryName::A1,
        EntryName::A2,
        EntryName::A3,
        EntryName::B1,
        EntryName::B2,
        EntryName::B3,
        EntryName::C1,
        EntryName::C2,
        EntryName::C3,
    ];

    /// Zero-based auxiliary (row, column).
    pub fn position(self) -> (usize, usize) {
        match self {
            EntryName::A1 => (0, 0),
            EntryName::B1 => (0, 1),
            EntryName::B2 => (0, 2),
            EntryName::C1 => (1, 0),
            EntryName::A2 => (1, 1),
            EntryName::B3 => (1, 2),
            EntryName::C2 => (2, 0),
            EntryName::C3 => (2, 1),
            EntryName::A3 => (2, 2),
        }
    }

    /// Shift in units of `2 eta`: `-w_j` for column `j`.
    pub fn shift(self) -> i32 {
        -WEIGHTS[self.position().1]
    }

    /// Change of h_W-weight: `w_j - w_i`.
    pub fn weight_change(self) -> i32 {
        let (i, j) = self.position();
        WEIGHTS[j] - WEIGHTS[i]
    }
}

/// One Lax entry as a shifted operator on `Fun(W)`.
pub fn lax_entry(rep: &LaxRep, u: C64, name: EntryName) -> ShiftedOperator {
    let (i, j) = name.position();
    let r = rep.clone();
    ShiftedOperator::new(
        rep.space.clone(),
        rep.step(),
        name.shift(),
        name.weight_change(),
        Arc::new(move |q| r.block(q, u, i, j)),
    )
}

/// The nine entries in the order `A1, A2, A3, B1, B2, B3, C1, C2, C3`.
pub fn lax_entries(rep: &LaxRep, u: C64) -> [ShiftedOperator; 9] {
    EntryName::ALL.map(|n| lax_entry(rep, u, n))
}

/// `t(u) = A1(u) + A2(u) + A3(u)`, kept as three labeled parts.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    pub parts: [ShiftedOperator; 3],
}

impl TransferMatrix {
    /// The unrestricted difference operator on `Fun(W)`.
    pub fn operator(&self) -> DifferenceOperator {
        let mut op: DifferenceOperator = self.parts[0].clone().into();
        for p in &self.parts[1..] {
            op = op.add(&p.clone().into()).expect("parts share a space");
        }
        op
    }

    /// Domain and codomain projected onto `W[weight]`.
    pub fn restricted(&self, weight: i32) -> DifferenceOperator {
        let space = self.parts[0].space();
        let mask = Arc::new(space.weights().iter().map(|&w| w == weight).collect());
        self.operator().projected(mask)
    }

    /// Largest `|P_lambda t P_mu|` over `lambda != mu`, summed over the three parts.
    pub fn off_diagonal_weight_residual(&self, q: C64) -> Result<f64> {
        let space = self.parts[0].space();
        let mut worst: f64 = 0.0;
        for p in &self.parts {
            let m = p.matrix(q)?;
            let mut acc = 0.0;
            for ((i, j), v) in m.indexed_iter() {
                if space.weight(i) != space.weight(j) {
                    acc += v.norm_sqr();
                }
            }
            worst = worst.max(acc.sqrt());
        }
        Ok(worst)
    }
}

pub fn transfer_matrix(rep: &LaxRep, u: C64) -> TransferMatrix {
    TransferMatrix {
        parts: [
            lax_entry(rep, u, EntryName::A1),
            lax_entry(rep, u, EntryName::A2),
            lax_entry(rep, u, EntryName::A3),
        ],
    }
}

/// Whether the right-hand R-matrix of the RLL relation carries the
/// conjugation by `exp(2 eta (h_1 + h_2) d/dq)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RllForm {
    #[default]
    Conjugated,
    Unconjugated,
}

type VFn<'a> = Box<dyn Fn(C64) -> Result<CVector> + 'a>;

/// `L_slot(u)` acting on `V (x) V (x) W`-valued functions.
fn lax_on_slot<'a>(rep: &'a LaxRep, slot: usize, u: C64, g: VFn<'a>) -> VFn<'a> {
    let d = rep.space.dim();
    let step = rep.step();
    Box::new(move |q| {
        let l = rep.lax(q, u)?;
        let mut shifted: Vec<Option<CVector>> = vec![None, None, None];
        let mut out = CVector::zeros(9 * d);
        for a in 0..3 {
            for b in 0..3 {
                let j = if slot == 1 { a } else { b };
                if shifted[j].is_none() {
                    shifted[j] = Some(g(q - step * WEIGHTS[j] as f64)?);
                }
                let vals = shifted[j].as_ref().expect("filled above");
                for w in 0..d {
                    let v = vals[(3 * a + b) * d + w];
                    if v == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let col = j * d + w;
                    for i in 0..3 {
                        let row = if slot == 1 { 3 * i + b } else { 3 * a + i };
                        for w2 in 0..d {
                            out[row * d + w2] += v * l[[i * d + w2, col]];
                        }
                    }
                }
            }
        }
        Ok(out)
    })
}

/// `R_12(q + shift(a, b, w), u)` acting on slots 1, 2 with `W` index `w` fixed.
fn r_on_aux<'a>(
    rep: &'a LaxRep,
    u: C64,
    qshift: impl Fn(usize, usize, usize) -> C64 + 'a,
    g: VFn<'a>,
) -> VFn<'a> {
    let d = rep.space.dim();
    Box::new(move |q| {
        let gv = g(q)?;
        let mut cache: HashMap<(i64, i64), CMatrix> = HashMap::new();
        let mut out = CVector::zeros(9 * d);
        for a in 0..3 {
            for b in 0..3 {
                for w in 0..d {
                    let v = gv[(3 * a + b) * d + w];
                    if v == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let qq = q + qshift(a, b, w);
                    let key = (qq.re.to_bits() as i64, qq.im.to_bits() as i64);
                    if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(key) {
                        e.insert(build_r(&rep.couplings, qq, u)?.entries);
                    }
                    let r = &cache[&key];
                    for row in 0..9 {
                        let x = r[[row, 3 * a + b]];
                        if x != C64::new(0.0, 0.0) {
                            out[row * d + w] += x * v;
                        }
                    }
                }
            }
        }
        Ok(out)
    })
}

/// Residual of `R12(q - 2 eta h_W, u12) L1(u1) L2(u2) = L2(u2) L1(u1) R~12(q, u12)`
/// on a random trigonometric test function with frequencies 0, 1, 2.
pub fn rll_residual(
    rep: &LaxRep,
    q: C64,
    u1: C64,
    u2: C64,
    form: RllForm,
    sampler: &mut GenericSampler,
) -> Result<f64> {
    let d = rep.space.dim();
    let test = crate::laxrep::TrigPolynomial::random(sampler, 9 * d, 2, None);
    let f = |q: C64| test.eval(q);
    let step = rep.step();
    let space = rep.space.clone();
    let u12 = u1 - u2;
    let lhs = r_on_aux(
        rep,
        u12,
        move |_, _, w| -step * space.weight(w) as f64,
        lax_on_slot(rep, 1, u1, lax_on_slot(rep, 2, u2, Box::new(f))),
    )(q)?;
    let conj = move |a: usize, b: usize, _w: usize| match form {
        RllForm::Conjugated => step * (WEIGHTS[a] + WEIGHTS[b]) as f64,
        RllForm::Unconjugated => C64::new(0.0, 0.0),
    };
    let rhs = lax_on_slot(rep, 2, u2, lax_on_slot(rep, 1, u1, r_on_aux(rep, u12, conj, Box::new(f))))(q)?;
    Ok(rel_vector_diff(&lhs, &rhs))
}

/// `|L_X(q,u) - L_Y(q,u)|` relative, for comparing two constructions.
pub fn lax_difference(x: &LaxRep, y: &LaxRep, q: C64, u: C64) -> Result<f64> {
    let (a, b) = (x.lax(q, u)?, y.lax(q, u)?);
    Ok(frobenius(&(&a - &b)) / frobenius(&a).max(frobenius(&b)))
}
