//! Jacobi theta kernels in the normalization used throughout the crate.
//!
//! `theta1(u) = 2 p^{1/8} sin(pi u) prod_j (1 - 2 p^j cos(2 pi u) + p^{2j}) (1 - p^j)`
//! and `theta4(u) = prod_j (1 - 2 p^{j-1/2} cos(2 pi u) + p^{2j-1}) (1 - p^j)`
//! with nome `p = exp(2 pi i tau)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Values below this fraction of the partial-product scale count as exact zeros.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Modular parameter, nome and truncation of the product formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams {
    tau: C64,
    p: C64,
    truncation_terms: usize,
    precision_eps: f64,
}

impl ThetaParams {
    pub fn new(tau: C64) -> Result<Self> {
        Self::with_precision(tau, 1e-14)
    }

    pub fn with_precision(tau: C64, precision_eps: f64) -> Result<Self> {
        if !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::NonFinite("ThetaParams::new"));
        }
        if tau.im <= 0.0 {
            return Err(Error::NomeOutOfRange(tau.im));
        }
        if !(precision_eps > 0.0 && precision_eps < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "precision_eps must lie in (0, 1), got {precision_eps}"
            )));
        }
        let p = (2.0 * PI * I * tau).exp();
        let log_p = p.norm().ln();
        let terms = (precision_eps.ln() / log_p).ceil().max(0.0) as usize + 4;
        Ok(Self {
            tau,
            p,
            truncation_terms: terms,
            precision_eps,
        })
    }

    /// Parameters for the nome `p^2`, i.e. `tau -> 2 tau`.
    pub fn doubled(&self) -> Self {
        Self::with_precision(2.0 * self.tau, self.precision_eps)
            .expect("doubling tau keeps Im(tau) positive")
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn nome(&self) -> C64 {
        self.p
    }

    pub fn truncation_terms(&self) -> usize {
        self.truncation_terms
    }

    pub fn precision_eps(&self) -> f64 {
        self.precision_eps
    }

    /// `theta1(u)` together with a magnitude scale of its partial products.
    pub fn theta1_scaled(&self, u: C64) -> Result<(C64, f64)> {
        check_finite(u, "theta1")?;
        let (m, k, r) = self.reduce(u);
        let (v, s) = self.theta1_product(r);
        // theta1(r + k + m tau) = (-1)^(k+m) exp(-i pi m^2 tau - 2 i pi m r) theta1(r)
        let factor = self.quasi_factor(m, r) * sign(k + m);
        Ok((v * factor, s * factor.norm()))
    }

    /// `theta4(u)` together with a magnitude scale of its partial products.
    pub fn theta4_scaled(&self, u: C64) -> Result<(C64, f64)> {
        check_finite(u, "theta4")?;
        let (m, _k, r) = self.reduce(u);
        let (v, s) = self.theta4_product(r);
        let factor = self.quasi_factor(m, r) * sign(m);
        Ok((v * factor, s * factor.norm()))
    }

    pub fn theta1(&self, u: C64) -> Result<C64> {
        self.theta1_scaled(u).map(|(v, _)| v)
    }

    pub fn theta4(&self, u: C64) -> Result<C64> {
        self.theta4_scaled(u).map(|(v, _)| v)
    }

    /// Splits `u = r + k + m tau` with `|Im r| <= Im tau` and `|Re r| <= 1/2`.
    fn reduce(&self, u: C64) -> (i64, i64, C64) {
        let m = if u.im.abs() > self.tau.im {
            (u.im / self.tau.im).round() as i64
        } else {
            0
        };
        let shifted = u - self.tau * m as f64;
        let k = shifted.re.round() as i64;
        (m, k, shifted - k as f64)
    }

    fn quasi_factor(&self, m: i64, r: C64) -> C64 {
        if m == 0 {
            return C64::new(1.0, 0.0);
        }
        let m = m as f64;
        (-I * PI * m * m * self.tau - 2.0 * I * PI * m * r).exp()
    }

    fn theta1_product(&self, u: C64) -> (C64, f64) {
        let pre = 2.0 * (I * PI * self.tau / 4.0).exp();
        let s = (PI * u).sin();
        let c = (2.0 * PI * u).cos();
        let bound = (2.0 * PI * u.im.abs()).exp();
        let mut value = pre * s;
        let mut scale = pre.norm() * (PI * u.im).cosh();
        let mut pj = C64::new(1.0, 0.0);
        for _ in 0..self.truncation_terms {
            pj *= self.p;
            let a = 1.0 - 2.0 * pj * c + pj * pj;
            let b = 1.0 - pj;
            value *= a * b;
            scale *= (1.0 + pj.norm() * bound).powi(2) * b.norm();
        }
        (value, scale)
    }

    fn theta4_product(&self, u: C64) -> (C64, f64) {
        let c = (2.0 * PI * u).cos();
        let bound = (2.0 * PI * u.im.abs()).exp();
        let sqrt_p = (I * PI * self.tau).exp();
        let mut value = C64::new(1.0, 0.0);
        let mut scale = 1.0;
        let mut pj = C64::new(1.0, 0.0);
        for _ in 0..self.truncation_terms {
            let ph = pj * sqrt_p;
            pj *= self.p;
            let a = 1.0 - 2.0 * ph * c + ph * ph;
            let b = 1.0 - pj;
            value *= a * b;
            scale *= (1.0 + ph.norm() * bound).powi(2) * b.norm();
        }
        (value, scale)
    }
}

fn sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_finite(u: C64, op: &'static str) -> Result<()> {
    if u.re.is_finite() && u.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(op))
    }
}

pub fn theta1(u: C64, params: &ThetaParams) -> Result<C64> {
    params.theta1(u)
}

pub fn theta4(u: C64, params: &ThetaParams) -> Result<C64> {
    params.theta4(u)
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: C64, b: C64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

/// Which exponent to use for the `u -> u + tau` law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuasiperiodicityLaw {
    /// `theta(u + tau) = -exp(-i pi tau - 2 i pi u) theta(u)`.
    #[default]
    Standard,
    /// The u-independent exponent `-i pi tau - 2 i pi tau`.
    Literal,
}

/// Relative residuals of the four quasiperiodicity laws, in the order
/// `theta1(u+1)`, `theta1(u+tau)`, `theta4(u+1)`, `theta4(u+tau)`.
pub fn quasiperiodicity_residuals(u: C64, params: &ThetaParams) -> Result<[f64; 4]> {
    quasiperiodicity_residuals_with(u, params, QuasiperiodicityLaw::Standard)
}

pub fn quasiperiodicity_residuals_with(
    u: C64,
    params: &ThetaParams,
    law: QuasiperiodicityLaw,
) -> Result<[f64; 4]> {
    let tau = params.tau();
    let factor = match law {
        QuasiperiodicityLaw::Standard => -(-I * PI * tau - 2.0 * I * PI * u).exp(),
        QuasiperiodicityLaw::Literal => -(-I * PI * tau - 2.0 * I * PI * tau).exp(),
    };
    let (t1, s1) = params.theta1_scaled(u)?;
    let (t4, s4) = params.theta4_scaled(u)?;
    let guarded = |lhs: C64, rhs: C64, scale: f64| {
        if lhs.norm().max(rhs.norm()) < ZERO_THRESHOLD * scale {
            0.0
        } else {
            rel_diff(lhs, rhs)
        }
    };
    let (t1p, s1p) = params.theta1_scaled(u + 1.0)?;
    let (t1t, s1t) = params.theta1_scaled(u + tau)?;
    let t4p = params.theta4(u + 1.0)?;
    let t4t = params.theta4(u + tau)?;
    Ok([
        guarded(t1p, -t1, s1.max(s1p)),
        guarded(t1t, factor * t1, s1.max(s1t)),
        guarded(t4p, t4, s4),
        guarded(t4t, factor * t4, s4),
    ])
}

/// Residual of `theta4(u) = i exp(-i pi u + i pi tau / 4) theta1(u - tau/2)`.
pub fn cross_identity_residual(u: C64, params: &ThetaParams) -> Result<f64> {
    let tau = params.tau();
    let lhs = params.theta4(u)?;
    let rhs = I * (-I * PI * u + I * PI * tau / 4.0).exp() * params.theta1(u - tau / 2.0)?;
    Ok(rel_diff(lhs, rhs))
}

/// Exponent multiplying the theta1 ratio in the nome-square identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NomeSquareExponent {
    /// `exp(-2 i pi (u1 - u2))`, the form implied by the product formulas.
    #[default]
    Derived,
    /// `exp(-i pi (u1 - u2))`.
    Literal,
}

/// `theta4(2 u1, p^2) / theta4(2 u2, p^2)` rewritten through theta1 factors at nome `p`.
pub fn nome_square_ratio(
    u1: C64,
    u2: C64,
    params: &ThetaParams,
    exponent: NomeSquareExponent,
) -> Result<C64> {
    let h = params.tau() / 2.0;
    let num = params.theta1(u1 - h)? * params.theta1(u1 + 0.5 - h)?;
    let den = params.theta1(u2 - h)? * params.theta1(u2 + 0.5 - h)?;
    let k = match exponent {
        NomeSquareExponent::Derived => 2.0,
        NomeSquareExponent::Literal => 1.0,
    };
    Ok(num / den * (-I * PI * k * (u1 - u2)).exp())
}

/// Residual of the nome-square ratio identity.
pub fn nome_square_residual(
    u1: C64,
    u2: C64,
    params: &ThetaParams,
    exponent: NomeSquareExponent,
) -> Result<f64> {
    let sq = params.doubled();
    let lhs = sq.theta4(2.0 * u1)? / sq.theta4(2.0 * u2)?;
    Ok(rel_diff(lhs, nome_square_ratio(u1, u2, params, exponent)?))
}
