use std::sync::Arc;

use ellbethe::bethe::{pseudovacuum, ModelConfig};
use ellbethe::laxrep::{rll_residual, EntryName, RllForm, WFunction};
use ellbethe::linalg::norm;
use ellbethe::rmatrix::{build_r, dybe_residual, unitarity_residual, zero_weight_residual, CouplingParams};
use ellbethe::sampling::GenericSampler;
use ellbethe::theta::{cross_identity_residual, quasiperiodicity_residuals, ThetaParams};
use ellbethe::verify::{alpha_beta_unitarity_residual, omega_residual};
use ellbethe::{Error, Result, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn point() -> impl Strategy<Value = C64> {
    (-0.5f64..0.5, -0.15f64..0.15).prop_map(|(a, b)| c(a, b))
}

fn tau() -> impl Strategy<Value = C64> {
    (-0.5f64..0.5, 0.6f64..1.5).prop_map(|(a, b)| c(a, b))
}

fn couplings(eta: f64) -> CouplingParams {
    CouplingParams::with_tau(c(eta, 0.0), c(0.0, 0.8)).unwrap().with_strict_branches(true)
}

/// Non-generic sample points are discarded rather than failed.
fn generic(r: Result<f64>) -> std::result::Result<f64, TestCaseError> {
    match r {
        Ok(v) => Ok(v),
        Err(e) if e.is_nongeneric() => Err(TestCaseError::reject(e.to_string())),
        Err(e) => Err(TestCaseError::fail(e.to_string())),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_quasiperiodicity(u in point(), t in tau()) {
        let th = ThetaParams::new(t).unwrap();
        let r = quasiperiodicity_residuals(u, &th).unwrap();
        prop_assert!(r.iter().all(|&x| x < 1e-10), "{r:?}");
        prop_assert!(cross_identity_residual(u, &th).unwrap() < 1e-10);
    }

    #[test]
    fn theta1_is_odd_and_theta4_even(u in point(), t in tau()) {
        let th = ThetaParams::new(t).unwrap();
        let (a, b) = (th.theta1(u).unwrap(), th.theta1(-u).unwrap());
        prop_assert!((a + b).norm() <= 1e-13 * a.norm().max(1.0));
        let (a, b) = (th.theta4(u).unwrap(), th.theta4(-u).unwrap());
        prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(1.0));
    }

    #[test]
    fn r_matrix_preserves_weight(q in point(), u in point(), eta in 0.05f64..0.2) {
        let r = generic(build_r(&couplings(eta), q, u).map(|r| zero_weight_residual(&r)))?;
        prop_assert!(r < 1e-12);
    }

    #[test]
    fn unitarity(q in point(), u in point(), eta in 0.05f64..0.2) {
        let r = generic(unitarity_residual(&couplings(eta), q, u))?;
        prop_assert!(r < 1e-9, "{r}");
    }

    #[test]
    fn scalar_identities(q1 in point(), q2 in point(), u in point()) {
        let cp = couplings(0.11);
        prop_assert!(generic(omega_residual(&cp, q1, q2, u))? < 1e-9);
        prop_assert!(generic(alpha_beta_unitarity_residual(&cp, q1, u))? < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dynamical_yang_baxter(q in point(), u1 in point(), u2 in point(), eta in 0.05f64..0.2) {
        let r = generic(dybe_residual(&couplings(eta), q, u1, u2))?;
        prop_assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn rll_on_two_sites(q in point(), u1 in point(), u2 in point(), seed in any::<u64>()) {
        let cfg = ModelConfig::from_couplings(Arc::new(couplings(0.11)), vec![c(0.0, 0.0), c(0.3, 0.0)], c(0.0, 0.0)).unwrap();
        let mut s = GenericSampler::new(seed, 0);
        let r = generic(rll_residual(cfg.rep(), q, u1, u2, RllForm::Conjugated, &mut s))?;
        prop_assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn pseudovacuum_is_highest_weight(q in point(), u in point(), z1 in -0.5f64..0.5) {
        let cfg = match ModelConfig::new(c(0.11, 0.0), c(0.0, 0.8), vec![c(0.0, 0.0), c(z1, 0.0)], c(0.0, 0.0)) {
            Ok(cfg) => cfg,
            Err(Error::DenominatorNearZero { .. }) | Err(Error::InvalidParameter(_)) => return Err(TestCaseError::reject("coincident sites")),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let vac = pseudovacuum(&cfg);
        let f = generic(vac.eval(q).map(|v| norm(&v)))?;
        for name in [EntryName::C1, EntryName::C2, EntryName::C3] {
            let lax = ellbethe::laxrep::lax_entry(cfg.rep(), u, name);
            let v = generic(lax.apply(&vac, q).map(|v| norm(&v)))?;
            prop_assert!(v <= 1e-12 * f, "{name:?}: {v}");
        }
    }
}
