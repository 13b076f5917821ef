//! Pseudovacuum, creation operators, Bethe equations and eigenvalues for
//! `W = V(z_1) (x) ... (x) V(z_n)`.

mod solver;

use std::sync::Arc;

pub use solver::{solve_bethe, BetheSolution, SolverOptions};

use crate::error::{Error, Result};
use crate::laxrep::{
    chain_rep, lax_entry, transfer_matrix, Applied, DifferenceOperator, EntryName, LaxRep,
    ScalarFn, WFunction,
};
use crate::linalg::{inner, norm, CVector};
use crate::rmatrix::CouplingParams;
use crate::theta::{ThetaParams, C64};

/// Roots closer than this are treated as coinciding in `creation_phi`.
pub const PHI_COLLISION: f64 = 1e-10;

/// Model parameters: couplings, sites, gauge constant and seed.
#[derive(Clone, Debug)]
pub struct ModelConfig {
    couplings: Arc<CouplingParams>,
    z: Vec<C64>,
    c: C64,
    seed: u64,
    rep: LaxRep,
}

impl ModelConfig {
    pub fn new(eta: C64, tau: C64, z: Vec<C64>, c: C64) -> Result<Self> {
        Self::with_theta(eta, ThetaParams::new(tau)?, z, c)
    }

    pub fn with_theta(eta: C64, theta: ThetaParams, z: Vec<C64>, c: C64) -> Result<Self> {
        Self::from_couplings(Arc::new(CouplingParams::new(eta, theta)?), z, c)
    }

    pub fn from_couplings(couplings: Arc<CouplingParams>, z: Vec<C64>, c: C64) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidParameter("at least one site is required".into()));
        }
        if z.iter().chain([&c]).any(|x| !(x.re.is_finite() && x.im.is_finite())) {
            return Err(Error::NonFinite("ModelConfig::new"));
        }
        let e = couplings.eta();
        for i in 0..z.len() {
            for j in 0..z.len() {
                if i == j {
                    continue;
                }
                let d = z[i] - z[j];
                for x in [d, d + 2.0 * e, d - 2.0 * e] {
                    couplings.den(x, "").map_err(|_| {
                        Error::InvalidParameter(format!(
                            "sites z[{i}] and z[{j}] are not generic (theta of a derived argument vanishes)"
                        ))
                    })?;
                }
            }
        }
        let rep = chain_rep(couplings.clone(), &z);
        Ok(Self {
            couplings,
            z,
            c,
            seed: 0,
            rep,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Same model with different couplings policy (branch signs, strictness).
    pub fn with_couplings(&self, couplings: CouplingParams) -> Result<Self> {
        Ok(Self::from_couplings(Arc::new(couplings), self.z.clone(), self.c)?.with_seed(self.seed))
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self) -> &[C64] {
        &self.z
    }

    pub fn c(&self) -> C64 {
        self.c
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn eta(&self) -> C64 {
        self.couplings.eta()
    }

    pub fn tau(&self) -> C64 {
        self.couplings.theta().tau()
    }

    pub fn couplings(&self) -> &Arc<CouplingParams> {
        &self.couplings
    }

    pub fn rep(&self) -> &LaxRep {
        &self.rep
    }

    pub(crate) fn entry(&self, name: EntryName, u: C64) -> DifferenceOperator {
        lax_entry(&self.rep, u, name).into()
    }
}

/// `f(q) = exp(c q) exp((n/2) Log(theta(q - eta) / theta(q + eta)))`.
pub fn gauge_f(config: &ModelConfig, q: C64) -> Result<C64> {
    let cp = config.couplings();
    let e = cp.eta();
    let ratio = cp.th(q - e)? / cp.den(q + e, "theta(q+eta)")?;
    if ratio.norm() == 0.0 {
        return Err(Error::DenominatorNearZero { factor: "theta(q-eta)" });
    }
    Ok((config.c * q).exp() * (0.5 * config.n() as f64 * ratio.ln()).exp())
}

/// `f(a) / f(b)`.
pub fn gauge_ratio(config: &ModelConfig, a: C64, b: C64) -> Result<C64> {
    Ok(gauge_f(config, a)? / gauge_f(config, b)?)
}

/// `q -> f(q) e_1 (x) ... (x) e_1`.
#[derive(Clone, Debug)]
pub struct Pseudovacuum {
    config: ModelConfig,
}

impl WFunction for Pseudovacuum {
    fn dim(&self) -> usize {
        self.config.rep.space().dim()
    }

    fn eval(&self, q: C64) -> Result<CVector> {
        let mut v = CVector::zeros(self.dim());
        v[0] = gauge_f(&self.config, q)?;
        Ok(v)
    }
}

pub fn pseudovacuum(config: &ModelConfig) -> Pseudovacuum {
    Pseudovacuum {
        config: config.clone(),
    }
}

fn site_product(config: &ModelConfig, f: impl Fn(C64) -> Result<C64>) -> Result<C64> {
    config.z.iter().try_fold(C64::new(1.0, 0.0), |acc, &z| Ok(acc * f(z)?))
}

/// `a1(u) = prod_i g(u - z_i)`, the vacuum eigenvalue of `A1`.
pub fn a1(config: &ModelConfig, u: C64) -> Result<C64> {
    let cp = config.couplings();
    site_product(config, |z| cp.g(u - z))
}

/// The variant with `theta(u - z_i + 2 eta)`; not the vacuum eigenvalue.
pub fn a1_literal(config: &ModelConfig, u: C64) -> Result<C64> {
    let cp = config.couplings();
    let e = cp.eta();
    let c3 = 3.0 * e + 0.5;
    let den = cp.den(c3, "theta(3eta+1/2)")? * cp.den(-2.0 * e, "theta(-2eta)")?;
    site_product(config, |z| Ok(cp.th(c3 - u + z)? * cp.th(u - z + 2.0 * e)? / den))
}

pub fn a2(config: &ModelConfig, q: C64, u: C64) -> Result<C64> {
    let cp = config.couplings();
    let e = cp.eta();
    let n = config.n() as f64;
    let c3 = 3.0 * e + 0.5;
    let den = cp.den(-2.0 * e, "theta(-2eta)")? * cp.den(c3, "theta(3eta+1/2)")?;
    let p = site_product(config, |z| Ok(cp.th(c3 - u + z)? * cp.th(u - z)? / den))?;
    let r = cp.th(q + e)? * cp.th(q - 2.0 * e * n - e)?
        / (cp.den(q - e, "theta(q-eta)")? * cp.den(q - 2.0 * e * n + e, "theta(q-2eta n+eta)")?);
    Ok(p * cp.sqrt(r, "a2 radicand")?)
}

pub fn a3(config: &ModelConfig, q: C64, u: C64) -> Result<C64> {
    let cp = config.couplings();
    let e = cp.eta();
    let n = config.n() as f64;
    let c3 = 3.0 * e + 0.5;
    let den = cp.den(c3, "theta(3eta+1/2)")? * cp.den(-2.0 * e, "theta(-2eta)")?;
    let p = site_product(config, |z| Ok(cp.th(u - z)? * cp.th(e + 0.5 - u + z)? / den))?;
    let num = cp.th(q - 2.0 * e * n)?
        * cp.th(q + 2.0 * e)?
        * cp.thv2(2.0 * q - 4.0 * e * n)?
        * cp.thv2(2.0 * q + 4.0 * e)?;
    let d = cp.den(q, "theta(q)")?
        * cp.den(q - 2.0 * e * n + 2.0 * e, "theta(q-2eta n+2eta)")?
        * cp.den_v2(2.0 * q, "theta_v(2q,p^2)")?
        * cp.den_v2(2.0 * q - 4.0 * e * n + 4.0 * e, "theta_v(2q-4eta n+4eta,p^2)")?;
    Ok(p * cp.sqrt(num / d, "a3 radicand")?)
}

fn check_distinct(u: &[C64], threshold: f64) -> Result<()> {
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let distance = (u[i] - u[j]).norm();
            if distance < threshold {
                return Err(Error::RootCollision { i, j, distance });
            }
        }
    }
    Ok(())
}

/// The creation operator `Phi_m(u_1, ..., u_m)` from its recurrence.
pub fn creation_phi(m: usize, u: &[C64], config: &ModelConfig) -> Result<DifferenceOperator> {
    if u.len() != m {
        return Err(Error::InvalidParameter(format!(
            "creation_phi: m = {m} but {} spectral parameters given",
            u.len()
        )));
    }
    check_distinct(u, PHI_COLLISION)?;
    phi_rec(u, config)
}

fn phi_rec(u: &[C64], config: &ModelConfig) -> Result<DifferenceOperator> {
    let rep = config.rep();
    let m = u.len();
    if m == 0 {
        return Ok(DifferenceOperator::identity(rep.space().clone(), rep.step()));
    }
    let b1 = config.entry(EntryName::B1, u[0]);
    if m == 1 {
        return Ok(b1);
    }
    let mut out = b1.compose(&phi_rec(&u[1..], config)?)?;
    let b2 = config.entry(EntryName::B2, u[0]);
    for j in 1..m {
        let rest: Vec<C64> = u[1..].iter().enumerate().filter(|(k, _)| k + 1 != j).map(|(_, &x)| x).collect();
        let term = b2
            .compose(&phi_rec(&rest, config)?)?
            .compose(&config.entry(EntryName::A1, u[j]))?;
        let cp = config.couplings().clone();
        let us = u.to_vec();
        let coef: ScalarFn = Arc::new(move |q| {
            let e = cp.eta();
            let mut c = cp.inv_ratio_y(q, us[0] - us[j])?;
            for k in 1..j {
                c *= cp.ratio_omega(us[j] - us[k])?;
            }
            for (k, &uk) in us.iter().enumerate().skip(1) {
                if k != j {
                    c *= cp.ratio_z(q + 2.0 * e, uk - us[j])?;
                }
            }
            Ok(-c)
        });
        out = out.add(&term.scale(coef))?;
    }
    Ok(out)
}

/// `q -> (Phi_n(u) |Omega>)(q)`.
pub fn bethe_vector(u: &[C64], config: &ModelConfig) -> Result<Applied> {
    let phi = creation_phi(u.len(), u, config)?;
    Ok(Applied::new(phi, Arc::new(pseudovacuum(config))))
}

/// Which form of the Bethe equations to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetheForm {
    /// `prod_k theta(u_j - z_k - 2eta) / theta(u_j - z_k)` on the left.
    #[default]
    Consistent,
    /// `prod_k theta(u_j - z_k + 2eta) / theta(u_j - z_k)` on the left.
    Literal,
}

/// `LHS_j - RHS_j` of the Bethe equations.
pub fn bethe_residuals(u: &[C64], config: &ModelConfig) -> Result<Vec<C64>> {
    bethe_residuals_with(u, config, BetheForm::Consistent)
}

pub fn bethe_residuals_with(u: &[C64], config: &ModelConfig, form: BetheForm) -> Result<Vec<C64>> {
    let cp = config.couplings();
    let e = cp.eta();
    let s = match form {
        BetheForm::Consistent => -2.0 * e,
        BetheForm::Literal => 2.0 * e,
    };
    let rhs_pre = (2.0 * config.c * e).exp();
    let mut out = Vec::with_capacity(u.len());
    for (j, &uj) in u.iter().enumerate() {
        let lhs = site_product(config, |z| Ok(cp.th(uj - z + s)? / cp.den(uj - z, "theta(u_j-z_k)")?))?;
        let mut rhs = rhs_pre;
        for (k, &uk) in u.iter().enumerate() {
            if k != j {
                rhs *= cp.scattering(uj - uk)?;
            }
        }
        out.push(lhs - rhs);
    }
    Ok(out)
}

/// `prod_k z(q, u_k - u)`.
pub fn wanted_a1(cp: &CouplingParams, q: C64, u: C64, roots: &[C64]) -> Result<C64> {
    roots.iter().try_fold(C64::new(1.0, 0.0), |acc, &uk| Ok(acc * cp.ratio_z(q, uk - u)?))
}

/// `prod_k z(q - 2eta(k-1), u - u_k) / omega(u - u_k)`.
pub fn wanted_a2(cp: &CouplingParams, q: C64, u: C64, roots: &[C64]) -> Result<C64> {
    let e = cp.eta();
    roots.iter().enumerate().try_fold(C64::new(1.0, 0.0), |acc, (k, &uk)| {
        Ok(acc * cp.ratio_z(q - 2.0 * e * k as f64, u - uk)? * cp.inv_ratio_omega(u - uk)?)
    })
}

/// `prod_k sign beta(-q, eta, u - u_k) / gamma(x_k, -x_k, u - u_k)` with
/// `x_k = -q + 2eta(k-1)`; `sign = +1` is the consistent form.
pub fn wanted_a3_signed(cp: &CouplingParams, q: C64, u: C64, roots: &[C64], sign: f64) -> Result<C64> {
    let e = cp.eta();
    roots.iter().enumerate().try_fold(C64::new(1.0, 0.0), |acc, (k, &uk)| {
        let x = -q + 2.0 * e * k as f64;
        Ok(acc * sign * cp.beta(-q, e, u - uk)? * cp.inv_gamma(x, -x, u - uk)?)
    })
}

pub fn wanted_a3(cp: &CouplingParams, q: C64, u: C64, roots: &[C64]) -> Result<C64> {
    wanted_a3_signed(cp, q, u, roots, 1.0)
}

/// The eigenvalue assembled from wanted terms and vacuum eigenvalues at `q`.
pub fn lambda_general(config: &ModelConfig, q: C64, u: C64, roots: &[C64]) -> Result<C64> {
    let cp = config.couplings();
    let e = cp.eta();
    Ok(wanted_a1(cp, q, u, roots)? * a1(config, u)? * gauge_ratio(config, q - 2.0 * e, q)?
        + wanted_a2(cp, q, u, roots)? * a2(config, q, u)?
        + wanted_a3(cp, q, u, roots)? * a3(config, q, u)? * gauge_ratio(config, q + 2.0 * e, q)?)
}

/// Which closed form of the eigenvalue to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LambdaForm {
    /// Reduction of [`lambda_general`] on solutions of the consistent Bethe equations.
    #[default]
    Consistent,
    /// First term with `theta(u - z_k + 2eta)` and no root factor in the second.
    Literal,
}

/// Closed-form, q-independent transfer-matrix eigenvalue.
pub fn lambda_eigenvalue(u: C64, roots: &[C64], config: &ModelConfig) -> Result<C64> {
    lambda_eigenvalue_with(u, roots, config, LambdaForm::Consistent)
}

pub fn lambda_eigenvalue_with(
    u: C64,
    roots: &[C64],
    config: &ModelConfig,
    form: LambdaForm,
) -> Result<C64> {
    if roots.len() != config.n() {
        return Err(Error::InvalidParameter(format!(
            "expected {} roots, got {}",
            config.n(),
            roots.len()
        )));
    }
    let cp = config.couplings();
    let e = cp.eta();
    let c3 = 3.0 * e + 0.5;
    let base = cp.den(c3, "theta(3eta+1/2)")? * cp.den(-2.0 * e, "theta(-2eta)")?;
    let s1 = match form {
        LambdaForm::Consistent => -2.0 * e,
        LambdaForm::Literal => 2.0 * e,
    };
    let mut t1 = (-2.0 * e * config.c).exp();
    let mut t2 = C64::new(1.0, 0.0);
    let mut t3 = (2.0 * e * config.c).exp();
    for (&uk, &zk) in roots.iter().zip(config.z()) {
        t1 *= cp.th(uk - u - 2.0 * e)? * cp.th(c3 - u + zk)? * cp.th(u - zk + s1)?
            / (cp.den(uk - u, "theta(u_k-u)")? * base);
        t2 *= cp.th(c3 - u + zk)? * cp.th(u - zk)? / base;
        t3 *= cp.th(c3 - u + uk)? * cp.th(u - zk)? * cp.th(e + 0.5 - u + zk)?
            / (cp.den(e + 0.5 - u + uk, "theta(eta+1/2-u+u_k)")? * base);
    }
    if form == LambdaForm::Consistent {
        for &uk in roots {
            let v = u - uk;
            t2 *= cp.th(v - 2.0 * e)? * cp.th(v + 0.5 + e)?
                / (cp.den(v, "theta(u-u_k)")? * cp.den(v + 0.5 - e, "theta(u-u_k+1/2-eta)")?);
        }
    }
    Ok(t1 + t2 + t3)
}

/// `max_q |t(u) Psi(q) - Lambda(u) Psi(q)| / |Psi(q)|` for the Bethe vector of `roots`.
pub fn eigen_check(u: C64, roots: &[C64], config: &ModelConfig, q_samples: &[C64]) -> Result<f64> {
    let lambda = lambda_eigenvalue(u, roots, config)?;
    eigen_check_against(u, roots, config, q_samples, lambda)
}

/// As [`eigen_check`] with an explicitly supplied eigenvalue.
pub fn eigen_check_against(
    u: C64,
    roots: &[C64],
    config: &ModelConfig,
    q_samples: &[C64],
    lambda: C64,
) -> Result<f64> {
    let psi = bethe_vector(roots, config)?;
    let t = transfer_matrix(config.rep(), u).operator();
    let mut worst: f64 = 0.0;
    for &q in q_samples {
        let p = psi.eval(q)?;
        let tp = t.apply(&psi, q)?;
        let pn = norm(&p);
        if pn == 0.0 {
            return Err(Error::InvalidParameter("Bethe vector vanishes".into()));
        }
        worst = worst.max(norm(&(tp - p.mapv(|x| x * lambda))) / pn);
    }
    Ok(worst)
}

/// `<Psi, t Psi> / <Psi, Psi>` at one `q`.
pub fn rayleigh_eigenvalue(u: C64, roots: &[C64], config: &ModelConfig, q: C64) -> Result<C64> {
    let psi = bethe_vector(roots, config)?;
    let t = transfer_matrix(config.rep(), u).operator();
    let p = psi.eval(q)?;
    Ok(inner(&p, &t.apply(&psi, q)?) / inner(&p, &p))
}

#[cfg(test)]
mod tests;
