use crate::error::{Error, Result};
use crate::theta::{ThetaParams, C64};

/// Denominators below this fraction of their partial-product scale are rejected.
pub const DENOMINATOR_GUARD: f64 = 1e-8;
/// Radicands this close (relatively) to the negative real axis are flagged.
pub const BRANCH_GUARD: f64 = 1e-6;
/// `G(q)` takes the value 1 inside this distance from `eta`.
pub const G_EXACT_WINDOW: f64 = 1e-10;
/// Between the exact window and this distance `G(q)` is refused.
pub const G_REJECT_WINDOW: f64 = 1e-6;

/// Per-factor sign overrides for the square roots in `beta` and `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSigns {
    pub beta: f64,
    pub gamma: f64,
}

impl Default for BranchSigns {
    fn default() -> Self {
        Self {
            beta: 1.0,
            gamma: 1.0,
        }
    }
}

/// The crossing parameter `eta` together with the theta parameters.
///
/// All weight functions are methods so that guards and branch policy live in
/// one place.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingParams {
    eta: C64,
    theta: ThetaParams,
    theta_sq: ThetaParams,
    branch: BranchSigns,
    strict_branches: bool,
}

impl CouplingParams {
    pub fn new(eta: C64, theta: ThetaParams) -> Result<Self> {
        if !(eta.re.is_finite() && eta.im.is_finite()) {
            return Err(Error::NonFinite("CouplingParams::new"));
        }
        if eta.norm() < 1e-12 {
            return Err(Error::InvalidParameter("eta must be nonzero".into()));
        }
        let cp = Self {
            eta,
            theta,
            theta_sq: theta.doubled(),
            branch: BranchSigns::default(),
            strict_branches: false,
        };
        let half = C64::new(0.5, 0.0);
        for (arg, what) in [
            (2.0 * eta, "2 eta"),
            (3.0 * eta + half, "3 eta + 1/2"),
            (6.0 * eta, "6 eta"),
        ] {
            cp.den(arg, "")
                .map_err(|_| Error::InvalidParameter(format!("theta({what}) vanishes")))?;
        }
        Ok(cp)
    }

    pub fn with_tau(eta: C64, tau: C64) -> Result<Self> {
        Self::new(eta, ThetaParams::new(tau)?)
    }

    pub fn with_branch_signs(mut self, branch: BranchSigns) -> Self {
        self.branch = branch;
        self
    }

    /// When true, radicands near the cut raise `BranchSuspect` instead of
    /// being evaluated. Sampled sweeps run strict; direct evaluation does not.
    pub fn with_strict_branches(mut self, strict: bool) -> Self {
        self.strict_branches = strict;
        self
    }

    pub fn eta(&self) -> C64 {
        self.eta
    }

    pub fn theta(&self) -> &ThetaParams {
        &self.theta
    }

    pub fn strict_branches(&self) -> bool {
        self.strict_branches
    }

    pub fn branch_signs(&self) -> BranchSigns {
        self.branch
    }

    /// `theta1(x)` for numerator use.
    pub fn th(&self, x: C64) -> Result<C64> {
        self.theta.theta1(x)
    }

    /// `theta1(x)` checked for use as a denominator.
    pub fn den(&self, x: C64, factor: &'static str) -> Result<C64> {
        let (v, s) = self.theta.theta1_scaled(x)?;
        if v.norm() < DENOMINATOR_GUARD * s {
            return Err(Error::DenominatorNearZero { factor });
        }
        Ok(v)
    }

    /// `theta4(x, p^2)` checked for use as a denominator.
    pub fn den_v2(&self, x: C64, factor: &'static str) -> Result<C64> {
        let (v, s) = self.theta_sq.theta4_scaled(x)?;
        if v.norm() < DENOMINATOR_GUARD * s {
            return Err(Error::DenominatorNearZero { factor });
        }
        Ok(v)
    }

    /// `theta4(x, p^2)` for numerator use.
    pub fn thv2(&self, x: C64) -> Result<C64> {
        self.theta_sq.theta4(x)
    }

    /// Principal square root, flagging radicands close to the negative real axis.
    pub fn sqrt(&self, r: C64, factor: &'static str) -> Result<C64> {
        if self.strict_branches && r.re < 0.0 && r.im.abs() < BRANCH_GUARD * r.norm() {
            return Err(Error::BranchSuspect { factor });
        }
        Ok(r.sqrt())
    }

    fn c3(&self) -> C64 {
        3.0 * self.eta + 0.5
    }

    pub fn g(&self, u: C64) -> Result<C64> {
        let e = self.eta;
        Ok(self.th(self.c3() - u)? * self.th(u - 2.0 * e)?
            / (self.den(self.c3(), "theta(3eta+1/2)")? * self.den(-2.0 * e, "theta(-2eta)")?))
    }

    pub fn inv_g(&self, u: C64) -> Result<C64> {
        let e = self.eta;
        Ok(self.th(self.c3())? * self.th(-2.0 * e)?
            / (self.den(self.c3() - u, "theta(3eta+1/2-u)")? * self.den(u - 2.0 * e, "theta(u-2eta)")?))
    }

    pub fn alpha(&self, q1: C64, q2: C64, u: C64) -> Result<C64> {
        let q = q1 - q2;
        Ok(self.th(self.c3() - u)? * self.th(q - u)?
            / (self.den(self.c3(), "theta(3eta+1/2)")? * self.den(q, "theta(q12)")?))
    }

    fn beta_sqrt(&self, q: C64) -> Result<C64> {
        let e = self.eta;
        let d = self.den(q, "theta(q12)")?;
        let r = self.th(q - 2.0 * e)? * self.th(q + 2.0 * e)? / (d * d);
        Ok(self.branch.beta * self.sqrt(r, "beta radicand")?)
    }

    pub fn beta(&self, q1: C64, q2: C64, u: C64) -> Result<C64> {
        let e = self.eta;
        Ok(self.th(self.c3() - u)? * self.th(u)?
            / (self.den(-2.0 * e, "theta(-2eta)")? * self.den(self.c3(), "theta(3eta+1/2)")?)
            * self.beta_sqrt(q1 - q2)?)
    }

    pub fn inv_beta(&self, q1: C64, q2: C64, u: C64) -> Result<C64> {
        let e = self.eta;
        let q = q1 - q2;
        let s = self.beta_sqrt(q)?;
        // the radicand's numerator factors must not vanish either
        self.den(q - 2.0 * e, "theta(q12-2eta)")?;
        self.den(q + 2.0 * e, "theta(q12+2eta)")?;
        Ok(self.th(-2.0 * e)? * self.th(self.c3())?
            / (self.den(self.c3() - u, "theta(3eta+1/2-u)")? * self.den(u, "theta(u)")? * s))
    }

    /// The piecewise function `G(q)`.
    pub fn big_g(&self, q: C64) -> Result<C64> {
        let e = self.eta;
        let d = (q - e).norm();
        if d < G_EXACT_WINDOW {
            return Ok(C64::new(1.0, 0.0));
        }
        if d < G_REJECT_WINDOW {
            return Err(Error::IllConditioned);
        }
        Ok(self.th(q - 2.0 * e)? * self.thv2(2.0 * q - 4.0 * e)?
            / (self.den(q, "theta(q)")? * self.den_v2(2.0 * q, "theta_v(2q,p^2)")?))
    }

    fn gamma_sqrt(&self, q1: C64, q2: C64) -> Result<C64> {
        let r = self.big_g(q1)? * self.big_g(q2)?;
        Ok(self.branch.gamma * self.sqrt(r, "gamma radicand")?)
    }

    pub fn gamma(&self, q1: C64, q2: C64, u: C64) -> Result<C64> {
        let e = self.eta;
        let s = q1 + q2;
        Ok(self.th(u)? * self.th(s + e + 0.5 - u)?
            / (self.den(self.c3(), "theta(3eta+1/2)")? * self.den(s - 2.0 * e, "theta(q1+q2-2eta)")?)
            * self.gamma_sqrt(q1, q2)?)
    }

    pub fn inv_gamma(&self, q1: C64, q2: C64, u: C64) -> Result<C64> {
        let e = self.eta;
        let s = q1 + q2;
        let root = self.gamma_sqrt(q1, q2)?;
        for qi in [q1, q2] {
            if (qi - e).norm() >= G_EXACT_WINDOW {
                self.den(qi - 2.0 * e, "theta(q-2eta) in G")?;
                self.den_v2(2.0 * qi - 4.0 * e, "theta_v(2q-4eta,p^2) in G")?;
            }
        }
        Ok(self.th(self.c3())? * self.th(s - 2.0 * e)?
            / (self.den(u, "theta(u)")? * self.den(s + e + 0.5 - u, "theta(q1+q2+eta+1/2-u)")? * root))
    }

    pub fn delta(&self, q: C64, u: C64) -> Result<C64> {
        let e = self.eta;
        let c3 = self.den(self.c3(), "theta(3eta+1/2)")?;
        let d = self.den(2.0 * q - 2.0 * e, "theta(2q-2eta)")?;
        let first = self.th(self.c3() - u)? * self.th(2.0 * q - 2.0 * e - u)? / (c3 * d);
        let second = self.th(u)? * self.th(2.0 * q + e + 0.5 - u)? / (c3 * d) * self.big_g(q)?;
        Ok(first + second)
    }

    pub fn epsilon(&self, q: C64, u: C64) -> Result<C64> {
        let e = self.eta;
        let c3 = self.den(self.c3(), "theta(3eta+1/2)")?;
        let d6 = self.den(6.0 * e, "theta(6eta)")?;
        let first = self.th(self.c3() + u)? * self.th(6.0 * e - u)? / (c3 * d6);
        let inner = self.th(q + 5.0 * e)? / self.den(q - e, "theta(q-eta)")? * self.big_g(q)?
            + self.th(q - 5.0 * e)? / self.den(q + e, "theta(q+eta)")? * self.big_g(-q)?;
        Ok(first - self.th(u)? * self.th(self.c3() - u)? / (c3 * d6) * inner)
    }

    /// `y(q,u) = gamma(-q,q,u) / gamma(eta,q,u)`.
    pub fn ratio_y(&self, q: C64, u: C64) -> Result<C64> {
        Ok(self.gamma(-q, q, u)? * self.inv_gamma(self.eta, q, u)?)
    }

    pub fn inv_ratio_y(&self, q: C64, u: C64) -> Result<C64> {
        Ok(self.gamma(self.eta, q, u)? * self.inv_gamma(-q, q, u)?)
    }

    /// `z(q,u) = g(u) / beta(eta,q,u)`.
    pub fn ratio_z(&self, q: C64, u: C64) -> Result<C64> {
        Ok(self.g(u)? * self.inv_beta(self.eta, q, u)?)
    }

    /// `omega(u) = theta(u+1/2-eta) / theta(u+1/2+eta)`.
    pub fn ratio_omega(&self, u: C64) -> Result<C64> {
        let e = self.eta;
        Ok(self.th(u + 0.5 - e)? / self.den(u + 0.5 + e, "theta(u+1/2+eta)")?)
    }

    pub fn inv_ratio_omega(&self, u: C64) -> Result<C64> {
        let e = self.eta;
        Ok(self.th(u + 0.5 + e)? / self.den(u + 0.5 - e, "theta(u+1/2-eta)")?)
    }

    /// The defining ratio `g gamma(q,-q) / (eps gamma(q,-q) - gamma(q,eta) gamma(eta,-q))`.
    pub fn omega_defining_ratio(&self, q: C64, u: C64) -> Result<C64> {
        let e = self.eta;
        let gqq = self.gamma(q, -q, u)?;
        let a = self.epsilon(q, u)? * gqq;
        let b = self.gamma(q, e, u)? * self.gamma(e, -q, u)?;
        let den = a - b;
        if den.norm() < DENOMINATOR_GUARD * (a.norm() + b.norm()) {
            return Err(Error::DenominatorNearZero {
                factor: "omega defining denominator",
            });
        }
        Ok(self.g(u)? * gqq / den)
    }

    /// `X(v) = theta(v-2eta) theta(v+1/2+eta) / (theta(v+2eta) theta(v+1/2-eta))`.
    pub fn scattering(&self, v: C64) -> Result<C64> {
        let e = self.eta;
        Ok(self.th(v - 2.0 * e)? * self.th(v + 0.5 + e)?
            / (self.den(v + 2.0 * e, "theta(v+2eta)")? * self.den(v + 0.5 - e, "theta(v+1/2-eta)")?))
    }
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
    fn trivial_values_at_zero_spectral_parameter() {
        let p = cp();
        let e = p.eta();
        let q = c(0.23, 0.0);
        assert!((p.g(c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        assert_eq!(p.beta(e, q, c(0.0, 0.0)).unwrap().norm(), 0.0);
        assert!((p.delta(q, c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        assert!((p.epsilon(q, c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        assert!((p.alpha(e, q, c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        assert_eq!(p.gamma(c(0.29, 0.0), c(-0.29, 0.0), c(0.0, 0.0)).unwrap().norm(), 0.0);
    }

    #[test]
    fn big_g_windows() {
        let p = cp();
        let e = p.eta();
        assert_eq!(p.big_g(e).unwrap(), c(1.0, 0.0));
        assert_eq!(p.big_g(e + 1e-11).unwrap(), c(1.0, 0.0));
        assert_eq!(p.big_g(e + 1e-8), Err(Error::IllConditioned));
        assert!(p.big_g(e + 1e-4).is_ok());
    }

    #[test]
    fn big_g_matches_theta1_rewriting() {
        use crate::theta::{nome_square_ratio, NomeSquareExponent};
        let p = cp();
        let e = p.eta();
        let q = c(0.37, 0.0);
        // theta_v(2q-4eta,p^2)/theta_v(2q,p^2) through the nome-square identity
        let ratio = nome_square_ratio(q - 2.0 * e, q, p.theta(), NomeSquareExponent::Derived).unwrap();
        let oracle = p.th(q - 2.0 * e).unwrap() / p.th(q).unwrap() * ratio;
        assert!(crate::theta::rel_diff(p.big_g(q).unwrap(), oracle) < 1e-10);
    }

    #[test]
    fn ratio_z_rejects_zero_spectral_parameter() {
        let p = cp();
        assert!(matches!(
            p.ratio_z(c(0.3, 0.0), c(0.0, 0.0)),
            Err(Error::DenominatorNearZero { .. })
        ));
    }

    #[test]
    fn omega_closed_form_and_inversion() {
        let p = cp();
        let u = c(0.21, 0.05);
        let w = p.ratio_omega(u).unwrap() * p.ratio_omega(-u).unwrap();
        assert!((w - 1.0).norm() < 1e-13);
        for q in [c(0.31, 0.02), c(-0.17, 0.04)] {
            let d = p.omega_defining_ratio(q, u).unwrap();
            assert!(crate::theta::rel_diff(d, p.ratio_omega(u).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn inverse_helpers_are_reciprocals() {
        let p = cp();
        let e = p.eta();
        let (q, u) = (c(0.31, 0.02), c(0.17, -0.03));
        assert!((p.g(u).unwrap() * p.inv_g(u).unwrap() - 1.0).norm() < 1e-13);
        assert!((p.beta(e, q, u).unwrap() * p.inv_beta(e, q, u).unwrap() - 1.0).norm() < 1e-13);
        assert!((p.gamma(-q, q, u).unwrap() * p.inv_gamma(-q, q, u).unwrap() - 1.0).norm() < 1e-13);
        assert!((p.ratio_y(q, u).unwrap() * p.inv_ratio_y(q, u).unwrap() - 1.0).norm() < 1e-13);
    }

    #[test]
    fn strict_branch_flags_negative_radicand() {
        let p = cp().with_strict_branches(true);
        assert!(matches!(p.sqrt(c(-2.0, 0.0), "t"), Err(Error::BranchSuspect { .. })));
        let lax = cp();
        assert!((lax.sqrt(c(-4.0, 0.0), "t").unwrap() - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_eta() {
        assert!(CouplingParams::with_tau(c(0.0, 0.0), c(0.0, 0.8)).is_err());
        // 3 eta + 1/2 = 1 is a zero of theta
        assert!(CouplingParams::with_tau(c(1.0 / 6.0, 0.0), c(0.0, 0.8)).is_err());
    }
}
