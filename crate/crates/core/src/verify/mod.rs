//! Numerical certification of the exchange relations, expansion
//! coefficients, cancelation identities and transfer-matrix commutativity.
//!
//! Where a displayed formula and the operator algebra disagree, the form that
//! holds is [`Form::Consistent`] and the displayed one is [`Form::Literal`];
//! both can be evaluated, only the former is expected to pass.

mod coefficients;
mod commutation;
mod expansion;
mod identities;
mod suite;
mod transfer;

use std::collections::BTreeMap;

pub use coefficients::{
    coef_d, coef_e, coef_f1, coef_f1_closed, coef_f2, coef_g1, coef_g2, coef_g3, coef_h, coef_i,
    coefficient, double_prefactor, k_coefficients, reduced, single_prefactor, substitute,
    CoefficientFn, CoefficientName, IndexedCoefficient,
};
pub use commutation::{commutation_residuals, relation_sides, Relation};
pub use expansion::{action_expansion_residual, expansion_rhs, Diagonal};
pub use identities::{
    alpha_beta_unitarity_residual, gather_identity_residuals, k2_identity_residual,
    k2_identity_terms, omega_residual,
};
pub use suite::{
    dybe_sweep, run_suite, Diagnostic, SolveRecord, Suite, SuiteOutcome, SuiteSettings, SUITE_NAMES,
};
pub use transfer::transfer_commutativity_residual;

use crate::bethe::{wanted_a2, wanted_a3};
use crate::error::Result;
use crate::rmatrix::CouplingParams;
use crate::theta::C64;

/// Consistent (verified) or literal (as displayed) variant of a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Form {
    #[default]
    Consistent,
    Literal,
}

/// One residual evaluation at one sample point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub identity_id: String,
    pub sample_point: Vec<(String, C64)>,
    pub residual: f64,
    /// Reasons candidates were redrawn before this point was accepted.
    pub branch_flags: Vec<String>,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(
        identity_id: &str,
        sample_point: Vec<(String, C64)>,
        residual: f64,
        branch_flags: Vec<String>,
        tolerances: &Tolerances,
    ) -> Self {
        let pass = residual < tolerances.get(identity_id);
        Self {
            identity_id: identity_id.to_string(),
            sample_point,
            residual,
            branch_flags,
            pass,
        }
    }
}

/// Per-identity tolerance table with overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    table: BTreeMap<String, f64>,
}

/// Tolerances for identities without an entry.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

const DEFAULTS: &[(&str, f64)] = &[
    ("theta.quasiperiodicity", 1e-10),
    ("theta.cross_identity", 1e-10),
    ("theta.nome_square", 1e-10),
    ("rmatrix.permutation", 1e-12),
    ("rmatrix.zero_weight", 1e-12),
    ("rmatrix.unitarity", 1e-9),
    ("rmatrix.dybe", 1e-8),
    ("rmatrix.omega", 1e-9),
    ("rmatrix.alpha_beta_unitarity", 1e-10),
    ("laxrep.zero_weight", 1e-12),
    ("laxrep.rll.n1", 1e-8),
    ("laxrep.rll.n2", 1e-8),
    ("laxrep.commutation.n1", 1e-9),
    ("laxrep.commutation.n2", 1e-8),
    ("laxrep.highest_weight.n1", 1e-12),
    ("laxrep.highest_weight.n2", 1e-12),
    ("laxrep.transfer_commutativity.n2", 1e-8),
    ("expansions.symmetry.m2", 1e-9),
    ("expansions.symmetry.m3", 1e-9),
    ("expansions.gather_identity_1", 1e-8),
    ("expansions.gather_identity_2", 1e-8),
    ("expansions.f1_closed", 1e-9),
    ("expansions.substitution", 1e-10),
    ("expansions.a1", 1e-8),
    ("expansions.a2", 1e-8),
    ("expansions.a3", 1e-8),
    ("expansions.k2_identity", 1e-8),
    ("bethe.residual.n1", 1e-10),
    ("bethe.residual.n2", 1e-10),
    ("bethe.eigen.n1", 1e-9),
    ("bethe.eigen.n2", 1e-8),
    ("bethe.lambda_forms.n1", 1e-8),
    ("bethe.lambda_forms.n2", 1e-8),
    ("bethe.k_coefficients.n1", 1e-9),
    ("bethe.k_coefficients.n2", 1e-9),
];

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            table: DEFAULTS.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

impl Tolerances {
    pub fn with_overrides<'a>(mut self, overrides: impl IntoIterator<Item = (&'a String, &'a f64)>) -> Self {
        for (k, v) in overrides {
            self.table.insert(k.clone(), *v);
        }
        self
    }

    pub fn get(&self, identity_id: &str) -> f64 {
        self.table.get(identity_id).copied().unwrap_or(DEFAULT_TOLERANCE)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.table.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Relative change of the `A2` and `A3` wanted coefficients when the roots
/// are taken in reverse order.
pub fn wanted_order_residuals(cp: &CouplingParams, q: C64, u: C64, roots: &[C64]) -> Result<[f64; 2]> {
    let rev: Vec<C64> = roots.iter().rev().copied().collect();
    let a = wanted_a2(cp, q, u, roots)?;
    let b = wanted_a2(cp, q, u, &rev)?;
    let c = wanted_a3(cp, q, u, roots)?;
    let d = wanted_a3(cp, q, u, &rev)?;
    Ok([(a - b).norm() / a.norm(), (c - d).norm() / c.norm()])
}
