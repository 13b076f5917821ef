use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use super::{
    action_expansion_residual, alpha_beta_unitarity_residual, coefficient, commutation_residuals,
    gather_identity_residuals, k2_identity_residual, k_coefficients, omega_residual,
    transfer_commutativity_residual, wanted_order_residuals, CoefficientName, Diagonal, Form,
    ResidualReport, Tolerances,
};
use crate::bethe::{
    bethe_residuals_with, bethe_vector, eigen_check, eigen_check_against, lambda_eigenvalue,
    lambda_eigenvalue_with, lambda_general, pseudovacuum, solve_bethe, BetheForm, LambdaForm,
    ModelConfig, SolverOptions,
};
use crate::error::{Error, Result};
use crate::laxrep::{rll_residual, zero_weight_residual, EntryName, RllForm, WFunction};
use crate::linalg::{norm, rel_vector_diff};
use crate::rmatrix::{build_r, dybe_residual, permutation_residual, unitarity_residual};
use crate::sampling::{GenericSampler, Region, MAX_ATTEMPTS};
use crate::theta::{
    cross_identity_residual, nome_square_residual, quasiperiodicity_residuals,
    quasiperiodicity_residuals_with, NomeSquareExponent, QuasiperiodicityLaw, C64,
};

/// Registry names accepted by [`Suite::from_str`].
pub const SUITE_NAMES: [&str; 6] = ["theta", "rmatrix", "laxrep", "expansions", "bethe", "all"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Theta,
    RMatrix,
    LaxRep,
    Expansions,
    Bethe,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Theta, Suite::RMatrix, Suite::LaxRep, Suite::Expansions, Suite::Bethe];

    pub fn name(self) -> &'static str {
        SUITE_NAMES[self as usize]
    }

    /// Expands a registry name; `all` yields every suite.
    pub fn expand(name: &str) -> Result<Vec<Suite>> {
        if name == "all" {
            Ok(Suite::ALL.to_vec())
        } else {
            Ok(vec![name.parse()?])
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}; expected one of {SUITE_NAMES:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSettings {
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub solver: SolverOptions,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 0,
            tolerances: Tolerances::default(),
            solver: SolverOptions::default(),
        }
    }
}

/// A reported quantity that is not asserted: literal forms and negative controls.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub id: String,
    pub value: f64,
    pub note: String,
}

/// Outcome of one Bethe solve inside the `bethe` suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveRecord {
    pub n: usize,
    pub z: Vec<C64>,
    pub converged: bool,
    pub roots: Vec<C64>,
    pub residual_norm: f64,
    /// `(u, Lambda(u))` at the eigen-check spectral parameters.
    pub lambda: Vec<(C64, C64)>,
    pub eigen_residual: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteOutcome {
    pub reports: Vec<ResidualReport>,
    pub diagnostics: Vec<Diagnostic>,
    pub solves: Vec<SolveRecord>,
}

impl SuiteOutcome {
    fn extend(&mut self, other: SuiteOutcome) {
        self.reports.extend(other.reports);
        self.diagnostics.extend(other.diagnostics);
        self.solves.extend(other.solves);
    }

    fn diag(&mut self, id: &str, value: f64, note: &str) {
        self.diagnostics.push(Diagnostic {
            id: id.to_string(),
            value,
            note: note.to_string(),
        });
    }
}

type Point = Vec<(String, C64)>;

fn pt(names: &[&str], values: &[C64]) -> Point {
    names.iter().zip(values).map(|(n, v)| (n.to_string(), *v)).collect()
}

const THETA_REGION: Region = Region::new((-1.0, 1.0), (-0.6, 0.6));

struct Ctx<'a> {
    settings: &'a SuiteSettings,
    model: &'a ModelConfig,
}

impl Ctx<'_> {
    /// The model with `n` sites: its own sites, padded by steps of 0.3.
    fn sites(&self, n: usize) -> Result<ModelConfig> {
        let mut z: Vec<C64> = self.model.z().iter().take(n).copied().collect();
        while z.len() < n {
            let last = z.last().copied().unwrap_or_default();
            z.push(last + 0.3);
        }
        let strict = (**self.model.couplings()).clone().with_strict_branches(true);
        Ok(ModelConfig::from_couplings(Arc::new(strict), z, self.model.c())?.with_seed(self.model.seed()))
    }

    /// Evaluates `count` independently seeded generic points in parallel.
    fn sweep<P>(
        &self,
        id: &str,
        count: usize,
        draw: impl Fn(&mut GenericSampler) -> P + Sync,
        eval: impl Fn(&P, &mut GenericSampler) -> Result<(Point, f64)> + Sync,
    ) -> Result<Vec<ResidualReport>> {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut s = GenericSampler::new(self.settings.seed, GenericSampler::stream_for(&format!("{id}/{i}")));
                let mut flags: Vec<String> = Vec::new();
                for _ in 0..MAX_ATTEMPTS {
                    let p = draw(&mut s);
                    match eval(&p, &mut s) {
                        Ok((point, r)) => {
                            return Ok(ResidualReport::new(id, point, r, flags, &self.settings.tolerances));
                        }
                        Err(e) if e.is_nongeneric() => {
                            let msg = e.to_string();
                            if !flags.contains(&msg) {
                                flags.push(msg);
                            }
                        }
                        Err(e) => return Err(e),
                    }
                }
                Err(Error::InvalidParameter(format!("{id}: no generic sample point found")))
            })
            .collect()
    }

    fn sweep_max<P>(
        &self,
        count: usize,
        id: &str,
        draw: impl Fn(&mut GenericSampler) -> P + Sync,
        eval: impl Fn(&P, &mut GenericSampler) -> Result<f64> + Sync,
    ) -> Result<f64> {
        let reports = self.sweep(id, count, draw, |p, s| Ok((Vec::new(), eval(p, s)?)))?;
        Ok(reports.iter().map(|r| r.residual).fold(0.0, f64::max))
    }
}

fn generic(s: &mut GenericSampler, k: usize) -> Vec<C64> {
    s.complexes(Region::GENERIC, k)
}

/// `q` strip away from the segment `[-eta, eta]` joining branch points of the
/// half-integer theta powers, followed by `k` generic spectral parameters.
fn branch_safe(s: &mut GenericSampler, eta: f64, k: usize) -> Vec<C64> {
    let mut v = vec![s.complex(Region::new((2.0 * eta, 1.0 - 2.0 * eta), Region::GENERIC.im))];
    v.extend(generic(s, k));
    v
}

/// Runs one suite for the given model.
pub fn run_suite(suite: Suite, model: &ModelConfig, settings: &SuiteSettings) -> Result<SuiteOutcome> {
    let ctx = Ctx { settings, model };
    match suite {
        Suite::Theta => theta_suite(&ctx),
        Suite::RMatrix => rmatrix_suite(&ctx),
        Suite::LaxRep => laxrep_suite(&ctx),
        Suite::Expansions => expansions_suite(&ctx),
        Suite::Bethe => bethe_suite(&ctx),
    }
}

/// DYBE, unitarity and RLL sweeps only.
pub fn dybe_sweep(model: &ModelConfig, settings: &SuiteSettings) -> Result<SuiteOutcome> {
    let ctx = Ctx { settings, model };
    let mut out = SuiteOutcome::default();
    let cp = ctx.sites(1)?.couplings().clone();
    let n = settings.samples;
    out.reports.extend(ctx.sweep("rmatrix.dybe", n, |s| generic(s, 3), |p, _| {
        Ok((pt(&["q", "u1", "u2"], p), dybe_residual(&cp, p[0], p[1], p[2])?))
    })?);
    out.reports.extend(ctx.sweep("rmatrix.unitarity", n, |s| generic(s, 2), |p, _| {
        Ok((pt(&["q", "u"], p), unitarity_residual(&cp, p[0], p[1])?))
    })?);
    for sites in [1, 2] {
        out.extend(rll(&ctx, sites, n.min(20))?);
    }
    Ok(out)
}

fn theta_suite(ctx: &Ctx) -> Result<SuiteOutcome> {
    let th = *ctx.model.couplings().theta();
    let n = ctx.settings.samples;
    let mut out = SuiteOutcome::default();
    let draw = |s: &mut GenericSampler| s.complexes(THETA_REGION, 2);
    out.reports.extend(ctx.sweep("theta.quasiperiodicity", n, draw, |p, _| {
        let r = quasiperiodicity_residuals(p[0], &th)?;
        Ok((pt(&["u"], p), r.into_iter().fold(0.0, f64::max)))
    })?);
    out.reports.extend(ctx.sweep("theta.cross_identity", n, draw, |p, _| {
        Ok((pt(&["u"], p), cross_identity_residual(p[0], &th)?))
    })?);
    out.reports.extend(ctx.sweep("theta.nome_square", n, draw, |p, _| {
        Ok((pt(&["u1", "u2"], p), nome_square_residual(p[0], p[1], &th, NomeSquareExponent::Derived)?))
    })?);
    let lit = ctx.sweep_max(n.min(20), "theta.quasiperiodicity.literal", draw, |p, _| {
        let r = quasiperiodicity_residuals_with(p[0], &th, QuasiperiodicityLaw::Literal)?;
        Ok(r[1].max(r[3]))
    })?;
    out.diag("theta.quasiperiodicity.literal", lit, "u-independent exponent for the tau shift");
    let lit = ctx.sweep_max(n.min(20), "theta.nome_square.literal", draw, |p, _| {
        nome_square_residual(p[0], p[1], &th, NomeSquareExponent::Literal)
    })?;
    out.diag("theta.nome_square.literal", lit, "exponent exp(-i pi (u1 - u2))");
    Ok(out)
}

fn rmatrix_suite(ctx: &Ctx) -> Result<SuiteOutcome> {
    let cp = ctx.sites(1)?.couplings().clone();
    let n = ctx.settings.samples;
    let mut out = SuiteOutcome::default();
    out.reports.extend(ctx.sweep("rmatrix.permutation", n, |s| generic(s, 1), |p, _| {
        Ok((pt(&["q"], p), permutation_residual(&cp, p[0])?))
    })?);
    out.reports.extend(ctx.sweep("rmatrix.zero_weight", n, |s| generic(s, 2), |p, _| {
        let r = build_r(&cp, p[0], p[1])?;
        Ok((pt(&["q", "u"], p), crate::rmatrix::zero_weight_residual(&r)))
    })?);
    out.reports.extend(ctx.sweep("rmatrix.unitarity", n, |s| generic(s, 2), |p, _| {
        Ok((pt(&["q", "u"], p), unitarity_residual(&cp, p[0], p[1])?))
    })?);
    out.reports.extend(ctx.sweep("rmatrix.dybe", n, |s| generic(s, 3), |p, _| {
        Ok((pt(&["q", "u1", "u2"], p), dybe_residual(&cp, p[0], p[1], p[2])?))
    })?);
    out.reports.extend(ctx.sweep("rmatrix.omega", n, |s| generic(s, 3), |p, _| {
        Ok((pt(&["q1", "q2", "u"], p), omega_residual(&cp, p[0], p[1], p[2])?))
    })?);
    out.reports.extend(ctx.sweep("rmatrix.alpha_beta_unitarity", n, |s| generic(s, 2), |p, _| {
        Ok((pt(&["q", "u"], p), alpha_beta_unitarity_residual(&cp, p[0], p[1])?))
    })?);
    Ok(out)
}

fn rll(ctx: &Ctx, sites: usize, count: usize) -> Result<SuiteOutcome> {
    let cfg = ctx.sites(sites)?;
    let mut out = SuiteOutcome::default();
    let id = format!("laxrep.rll.n{sites}");
    out.reports.extend(ctx.sweep(&id, count, |s| generic(s, 3), |p, s| {
        Ok((pt(&["q", "u1", "u2"], p), rll_residual(cfg.rep(), p[0], p[1], p[2], RllForm::Conjugated, s)?))
    })?);
    let lit = ctx.sweep_max(count.min(5), &format!("{id}.unconjugated"), |s| generic(s, 3), |p, s| {
        rll_residual(cfg.rep(), p[0], p[1], p[2], RllForm::Unconjugated, s)
    })?;
    out.diag(&format!("{id}.unconjugated"), lit, "right-hand R-matrix without the weight conjugation");
    Ok(out)
}

fn laxrep_suite(ctx: &Ctx) -> Result<SuiteOutcome> {
    let n = ctx.settings.samples;
    let mut out = SuiteOutcome::default();
    let two = ctx.sites(2)?;
    out.reports.extend(ctx.sweep("laxrep.zero_weight", n.min(20), |s| generic(s, 2), |p, _| {
        Ok((pt(&["q", "u"], p), zero_weight_residual(two.rep(), p[0], p[1])?))
    })?);
    for sites in [1, 2] {
        out.extend(rll(ctx, sites, n.min(20))?);
        let cfg = ctx.sites(sites)?;
        let id = format!("laxrep.commutation.n{sites}");
        out.reports.extend(ctx.sweep(&id, n.min(20), |s| generic(s, 3), |p, s| {
            let r = commutation_residuals(p[0], p[1], p[2], &cfg, Form::Consistent, s)?;
            Ok((pt(&["q", "u1", "u2"], p), r.into_iter().fold(0.0, f64::max)))
        })?);
        let id = format!("laxrep.highest_weight.n{sites}");
        let vac = pseudovacuum(&cfg);
        out.reports.extend(ctx.sweep(&id, n.min(20), |s| generic(s, 2), |p, _| {
            let f = vac.eval(p[0])?;
            let mut worst: f64 = 0.0;
            for name in [EntryName::C1, EntryName::C2, EntryName::C3] {
                let v = cfg.entry(name, p[1]).apply(&vac, p[0])?;
                worst = worst.max(norm(&v) / norm(&f));
            }
            Ok((pt(&["q", "u"], p), worst))
        })?);
    }
    let lit = ctx.sweep_max(n.min(5), "laxrep.commutation.n2.literal", |s| generic(s, 3), |p, s| {
        let r = commutation_residuals(p[0], p[1], p[2], &two, Form::Literal, s)?;
        Ok(r[2].max(r[4]))
    })?;
    out.diag("laxrep.commutation.n2.literal", lit, "displayed A1B2 and B2B1 relations");
    out.reports.extend(ctx.sweep("laxrep.transfer_commutativity.n2", n.min(10), |s| generic(s, 3), |p, s| {
        Ok((pt(&["u", "v", "q"], p), transfer_commutativity_residual(p[0], p[1], p[2], 0, &two, s)?))
    })?);
    let w1 = ctx.sweep_max(n.min(5), "laxrep.transfer_commutativity.n2.w1", |s| generic(s, 3), |p, s| {
        transfer_commutativity_residual(p[0], p[1], p[2], 1, &two, s)
    })?;
    out.diag("laxrep.transfer_commutativity.n2.w1", w1, "weight-1 subspace; commutativity not claimed");
    Ok(out)
}

fn symmetry_residual(cfg: &ModelConfig, q: C64, u: &[C64]) -> Result<f64> {
    let v = bethe_vector(u, cfg)?.eval(q)?;
    let mut worst: f64 = 0.0;
    for i in 0..u.len() - 1 {
        let mut w = u.to_vec();
        w.swap(i, i + 1);
        let om = cfg.couplings().ratio_omega(u[i + 1] - u[i])?;
        let vw = bethe_vector(&w, cfg)?.eval(q)?.mapv(|x| x * om);
        worst = worst.max(rel_vector_diff(&v, &vw));
    }
    Ok(worst)
}

fn expansions_suite(ctx: &Ctx) -> Result<SuiteOutcome> {
    let n = ctx.settings.samples;
    let mut out = SuiteOutcome::default();
    let two = ctx.sites(2)?;
    let three = ctx.sites(3)?;
    let cp = two.couplings().clone();
    for (m, cfg) in [(2, &two), (3, &three)] {
        let id = format!("expansions.symmetry.m{m}");
        out.reports.extend(ctx.sweep(&id, n.min(10), |s| generic(s, m + 1), |p, _| {
            let names = ["q", "u1", "u2", "u3"];
            Ok((pt(&names[..=m], p), symmetry_residual(cfg, p[0], &p[1..])?))
        })?);
    }
    let gather = ctx.sweep("expansions.gather_identity", n, |s| generic(s, 5), |p, _| {
        let r = gather_identity_residuals(&cp, p[0], [p[1], p[2], p[3], p[4]])?;
        Ok((pt(&["q", "u1", "u2", "u3", "u4"], p), r[0].max(r[1])))
    })?;
    // split the combined sweep into the two identity ids
    for (k, id) in ["expansions.gather_identity_1", "expansions.gather_identity_2"].into_iter().enumerate() {
        for r in &gather {
            let v: Vec<C64> = r.sample_point.iter().map(|x| x.1).collect();
            let res = gather_identity_residuals(&cp, v[0], [v[1], v[2], v[3], v[4]])?[k];
            out.reports.push(ResidualReport::new(id, r.sample_point.clone(), res, r.branch_flags.clone(), &ctx.settings.tolerances));
        }
    }
    let eta = cp.eta().re.abs();
    out.reports.extend(ctx.sweep("expansions.f1_closed", n.min(20), |s| branch_safe(s, eta, 4), |p, _| {
        let roots = &p[2..5];
        let mut worst: f64 = 0.0;
        for l in 0..3 {
            let a = coefficient(CoefficientName::F1, &[l], p[1], roots, p[0], &three, Form::Consistent)?.value;
            let b = coefficient(CoefficientName::F1Closed, &[l], p[1], roots, p[0], &three, Form::Consistent)?.value;
            worst = worst.max((a - b).norm() / a.norm());
        }
        Ok((pt(&["q", "u", "u1", "u2", "u3"], p), worst))
    })?);
    for which in Diagonal::ALL {
        let id = format!("expansions.{}", format!("{which:?}").to_lowercase());
        out.reports.extend(ctx.sweep(&id, n.min(10), |s| generic(s, 4), |p, _| {
            let r = action_expansion_residual(which, p[1], &p[2..4], p[0], &two, Form::Consistent)?;
            Ok((pt(&["q", "u", "u1", "u2"], p), r))
        })?);
        let lit = ctx.sweep_max(n.min(3), &format!("{id}.literal"), |s| generic(s, 4), |p, _| {
            action_expansion_residual(which, p[1], &p[2..4], p[0], &two, Form::Literal)
        })?;
        out.diag(&format!("{id}.literal"), lit, "displayed coefficients");
    }
    out.reports.extend(ctx.sweep("expansions.k2_identity", n, |s| branch_safe(s, eta, 3), |p, _| {
        Ok((pt(&["q", "u", "u1", "u2"], p), k2_identity_residual(&cp, p[0], p[1], p[2], p[3])?))
    })?);
    let order = ctx.sweep_max(n.min(20), "expansions.wanted_order", |s| generic(s, 5), |p, _| {
        let r = wanted_order_residuals(&cp, p[0], p[1], &p[2..5])?;
        Ok(r[0].max(r[1]))
    })?;
    out.diag("expansions.wanted_order", order, "A2/A3 wanted coefficients with reversed root order");
    Ok(out)
}

fn bethe_suite(ctx: &Ctx) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    let tol = &ctx.settings.tolerances;
    for n in [1usize, 2] {
        // solving and eigenvalue checks use the non-strict model
        let strict = ctx.sites(n)?;
        let cfg = ModelConfig::from_couplings(
            Arc::new((**ctx.model.couplings()).clone()),
            strict.z().to_vec(),
            ctx.model.c(),
        )?
        .with_seed(ctx.settings.seed);
        let mut s = GenericSampler::labeled(ctx.settings.seed, &format!("bethe.n{n}"));
        let us: Vec<C64> = (0..3).map(|_| s.complex(Region::new((-0.4, 0.4), (-0.08, 0.08)))).collect();
        let qs: Vec<C64> = (0..5).map(|_| s.complex(Region::new((0.05, 0.55), (-0.08, 0.08)))).collect();
        let site_point: Point = cfg.z().iter().enumerate().map(|(i, z)| (format!("z{}", i + 1), *z)).collect();
        let rep = |id: &str, r: f64| ResidualReport::new(id, site_point.clone(), r, Vec::new(), tol);
        let sol = match solve_bethe(&cfg, None, &ctx.settings.solver) {
            Ok(sol) => sol,
            Err(e) => {
                for id in ["residual", "eigen", "lambda_forms", "k_coefficients"] {
                    out.reports.push(rep(&format!("bethe.{id}.n{n}"), f64::INFINITY));
                }
                let (roots, residual_norm) = match &e {
                    Error::NoConvergence { best_roots, best_residual, .. } => (best_roots.clone(), *best_residual),
                    _ => (Vec::new(), f64::INFINITY),
                };
                out.solves.push(SolveRecord {
                    n,
                    z: cfg.z().to_vec(),
                    converged: false,
                    roots,
                    residual_norm,
                    lambda: Vec::new(),
                    eigen_residual: f64::INFINITY,
                    error: Some(e.to_string()),
                });
                continue;
            }
        };
        out.reports.push(rep(&format!("bethe.residual.n{n}"), sol.residual_norm));
        let mut eig: f64 = 0.0;
        let mut lambdas = Vec::new();
        let mut forms: f64 = 0.0;
        let mut lit_eig: f64 = 0.0;
        for &u in &us {
            eig = eig.max(eigen_check(u, &sol.roots, &cfg, &qs)?);
            let lam = lambda_eigenvalue(u, &sol.roots, &cfg)?;
            lambdas.push((u, lam));
            for &q in &qs[..2] {
                let g = lambda_general(&cfg, q, u, &sol.roots)?;
                forms = forms.max((g - lam).norm() / lam.norm());
            }
            let lit = lambda_eigenvalue_with(u, &sol.roots, &cfg, LambdaForm::Literal)?;
            lit_eig = lit_eig.max(eigen_check_against(u, &sol.roots, &cfg, &qs, lit)?);
        }
        out.reports.push(rep(&format!("bethe.eigen.n{n}"), eig));
        out.reports.push(rep(&format!("bethe.lambda_forms.n{n}"), forms));
        let mut kmax: f64 = 0.0;
        for &q in &qs[..2] {
            for k in k_coefficients(us[0], &sol.roots, q, &cfg, Form::Consistent)? {
                kmax = kmax.max(k.value.norm());
            }
        }
        out.reports.push(rep(&format!("bethe.k_coefficients.n{n}"), kmax));
        out.diag(&format!("bethe.eigen.n{n}.literal_lambda"), lit_eig, "displayed closed-form eigenvalue");
        let lit = bethe_residuals_with(&sol.roots, &cfg, BetheForm::Literal)?;
        out.diag(
            &format!("bethe.residual.n{n}.literal"),
            lit.iter().map(|x| x.norm()).fold(0.0, f64::max),
            "displayed Bethe equations at the solved roots",
        );
        let random: Vec<C64> = (0..n).map(|_| s.complex(Region::new((0.0, 1.0), (-0.2, 0.2)))).collect();
        let neg = eigen_check(us[0], &random, &cfg, &qs)?;
        out.diag(&format!("bethe.negative_control.n{n}"), neg, "random non-solution roots; expected O(1)");
        out.solves.push(SolveRecord {
            n,
            z: cfg.z().to_vec(),
            converged: sol.converged,
            roots: sol.roots,
            residual_norm: sol.residual_norm,
            lambda: lambdas,
            eigen_residual: eig,
            error: None,
        });
    }
    Ok(out)
}
