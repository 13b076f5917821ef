//! Command-line front end: configuration, commands and the TOML report.
//!
//! Exit codes: 0 pass, 1 verification or solve failure, 2 usage or
//! configuration error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bethe::{
    eigen_check, lambda_eigenvalue, solve_bethe, ModelConfig, SolverOptions,
};
use crate::error::Error;
use crate::sampling::{GenericSampler, Region};
use crate::theta::{ThetaParams, C64};
use crate::verify::{
    dybe_sweep, run_suite, Diagnostic, ResidualReport, SolveRecord, Suite, SuiteOutcome,
    SuiteSettings, Tolerances,
};

/// Environment variable overriding the configured seed.
pub const SEED_ENV: &str = "ELLBETHE_SEED";
pub const DEFAULT_OUTPUT: &str = "ellbethe-report.toml";
/// Site count above which `solve` warns about cost.
pub const SOLVE_WARN_SITES: usize = 4;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ellbethe", version, about = "Elliptic dynamical R-matrix and Bethe ansatz checks")]
pub struct Cli {
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Suite to run; repeatable. One of theta, rmatrix, laxrep, expansions, bethe, all.
    #[arg(long = "suite", global = true, value_name = "NAME")]
    pub suites: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Run the identity suites and write a report.
    Selftest,
    /// Solve the Bethe equations for the configured sites and check eigenvectors.
    Solve,
    /// Sweep the Yang-Baxter, unitarity and RLL residuals.
    Dybe,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Selftest => "selftest",
            Command::Solve => "solve",
            Command::Dybe => "dybe",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub eta: [f64; 2],
    pub tau: [f64; 2],
    pub z: Vec<[f64; 2]>,
    pub c: [f64; 2],
    pub precision_eps: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            eta: [0.11, 0.0],
            tau: [0.0, 0.8],
            z: vec![[0.0, 0.0], [0.3, 0.0]],
            c: [0.0, 0.0],
            precision_eps: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub max_restarts: usize,
    pub max_iters: usize,
    pub tolerance: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self {
            max_restarts: d.max_restarts,
            max_iters: d.max_iters,
            tolerance: d.tolerance,
        }
    }
}

/// The configuration file; every key is optional.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelSection,
    pub solver: SolverSection,
    pub suites: Vec<String>,
    pub samples_per_identity: usize,
    pub tolerance_overrides: BTreeMap<String, f64>,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelSection::default(),
            solver: SolverSection::default(),
            suites: vec!["all".into()],
            samples_per_identity: 100,
            tolerance_overrides: BTreeMap::new(),
            output_path: None,
            seed: 0,
        }
    }
}

fn c64(x: [f64; 2]) -> C64 {
    C64::new(x[0], x[1])
}

fn pair(x: C64) -> [f64; 2] {
    [x.re, x.im]
}

/// Residuals are written as strings so they keep scientific notation.
fn sci(x: f64) -> String {
    format!("{x:.5e}")
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn model(&self) -> Result<ModelConfig, String> {
        let m = &self.model;
        let theta = ThetaParams::with_precision(c64(m.tau), m.precision_eps).map_err(invalid)?;
        ModelConfig::with_theta(c64(m.eta), theta, m.z.iter().map(|&z| c64(z)).collect(), c64(m.c))
            .map(|cfg| cfg.with_seed(self.seed))
            .map_err(invalid)
    }

    pub fn suites(&self) -> Result<Vec<Suite>, String> {
        let mut out = Vec::new();
        for name in &self.suites {
            for s in Suite::expand(name).map_err(|e| e.to_string())? {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn settings(&self) -> SuiteSettings {
        SuiteSettings {
            samples: self.samples_per_identity,
            seed: self.seed,
            tolerances: Tolerances::default().with_overrides(&self.tolerance_overrides),
            solver: SolverOptions {
                max_restarts: self.solver.max_restarts,
                max_iters: self.solver.max_iters,
                tolerance: self.solver.tolerance,
                ..SolverOptions::default()
            },
        }
    }
}

fn invalid(e: Error) -> String {
    format!("invalid configuration: {e}")
}

/// Merges file, environment and flags; flags win over the environment, which wins over the file.
pub fn resolve_config(cli: &Cli, env_seed: Option<&str>) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = env_seed {
        cfg.seed = s
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV} must be a non-negative integer, got {s:?}"))?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.samples {
        cfg.samples_per_identity = n;
    }
    if let Some(p) = &cli.out {
        cfg.output_path = Some(p.clone());
    }
    if !cli.suites.is_empty() {
        cfg.suites = cli.suites.clone();
    }
    if cfg.samples_per_identity == 0 {
        return Err("samples_per_identity must be at least 1".into());
    }
    if cfg.model.tau[1] <= 0.0 {
        return Err(format!(
            "invalid configuration: Im(tau) = {} must be positive (nome |p| < 1)",
            cfg.model.tau[1]
        ));
    }
    Ok(cfg)
}

#[derive(Debug, Serialize)]
struct ConfigEcho {
    eta: [f64; 2],
    tau: [f64; 2],
    z: Vec<[f64; 2]>,
    c: [f64; 2],
    precision_eps: String,
    seed: u64,
    samples_per_identity: usize,
    suites: Vec<String>,
    max_restarts: usize,
    max_iters: usize,
    solver_tolerance: String,
}

#[derive(Debug, Serialize)]
struct IdentityEntry {
    id: String,
    max_residual: String,
    tolerance: String,
    samples: usize,
    rejected_candidates: usize,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct DiagnosticEntry {
    id: String,
    value: String,
    note: String,
}

#[derive(Debug, Serialize)]
struct LambdaEntry {
    u: [f64; 2],
    value: [f64; 2],
}

#[derive(Debug, Serialize)]
struct SolveEntry {
    n: usize,
    z: Vec<[f64; 2]>,
    converged: bool,
    roots: Vec<[f64; 2]>,
    residual_norm: String,
    eigen_residual: String,
    lambda: Vec<LambdaEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// The machine-readable run report.
#[derive(Debug, Serialize)]
pub struct Report {
    version: String,
    command: String,
    pass: bool,
    wall_time_seconds: f64,
    config: ConfigEcho,
    identity: Vec<IdentityEntry>,
    diagnostic: Vec<DiagnosticEntry>,
    solve: Vec<SolveEntry>,
}

impl Report {
    fn new(command: Command, cfg: &RunConfig, outcome: SuiteOutcome, started: Instant) -> Self {
        let mut by_id: BTreeMap<String, Vec<&ResidualReport>> = BTreeMap::new();
        for r in &outcome.reports {
            by_id.entry(r.identity_id.clone()).or_default().push(r);
        }
        let tolerances = cfg.settings().tolerances;
        let identity: Vec<IdentityEntry> = by_id
            .into_iter()
            .map(|(id, rs)| IdentityEntry {
                max_residual: sci(rs.iter().map(|r| r.residual).fold(0.0, f64::max)),
                tolerance: sci(tolerances.get(&id)),
                samples: rs.len(),
                rejected_candidates: rs.iter().filter(|r| !r.branch_flags.is_empty()).count(),
                pass: rs.iter().all(|r| r.pass),
                id,
            })
            .collect();
        let solve: Vec<SolveEntry> = outcome.solves.iter().map(solve_entry).collect();
        let pass = identity.iter().all(|i| i.pass) && solve.iter().all(|s| s.converged);
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.name().to_string(),
            pass,
            wall_time_seconds: started.elapsed().as_secs_f64(),
            config: ConfigEcho {
                eta: cfg.model.eta,
                tau: cfg.model.tau,
                z: cfg.model.z.clone(),
                c: cfg.model.c,
                precision_eps: sci(cfg.model.precision_eps),
                seed: cfg.seed,
                samples_per_identity: cfg.samples_per_identity,
                suites: cfg.suites.clone(),
                max_restarts: cfg.solver.max_restarts,
                max_iters: cfg.solver.max_iters,
                solver_tolerance: sci(cfg.solver.tolerance),
            },
            identity,
            diagnostic: outcome.diagnostics.iter().map(diagnostic_entry).collect(),
            solve,
        }
    }

    pub fn pass(&self) -> bool {
        self.pass
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report is serializable")
    }
}

fn diagnostic_entry(d: &Diagnostic) -> DiagnosticEntry {
    DiagnosticEntry {
        id: d.id.clone(),
        value: sci(d.value),
        note: d.note.clone(),
    }
}

fn solve_entry(s: &SolveRecord) -> SolveEntry {
    SolveEntry {
        n: s.n,
        z: s.z.iter().map(|&z| pair(z)).collect(),
        converged: s.converged,
        roots: s.roots.iter().map(|&r| pair(r)).collect(),
        residual_norm: sci(s.residual_norm),
        eigen_residual: sci(s.eigen_residual),
        lambda: s
            .lambda
            .iter()
            .map(|&(u, v)| LambdaEntry {
                u: pair(u),
                value: pair(v),
            })
            .collect(),
        error: s.error.clone(),
    }
}

fn solve_outcome(cfg: &RunConfig, model: &ModelConfig) -> Result<SuiteOutcome, Error> {
    let settings = cfg.settings();
    let mut out = SuiteOutcome::default();
    let tol = &settings.tolerances;
    let n = model.n();
    let record = match solve_bethe(model, None, &settings.solver) {
        Ok(sol) => {
            let mut s = GenericSampler::labeled(settings.seed, "solve");
            let us: Vec<C64> = (0..3).map(|_| s.complex(Region::new((-0.4, 0.4), (-0.08, 0.08)))).collect();
            let qs: Vec<C64> = (0..5).map(|_| s.complex(Region::new((0.05, 0.55), (-0.08, 0.08)))).collect();
            let mut eig: f64 = 0.0;
            let mut lambda = Vec::new();
            for &u in &us {
                eig = eig.max(eigen_check(u, &sol.roots, model, &qs)?);
                lambda.push((u, lambda_eigenvalue(u, &sol.roots, model)?));
            }
            let point: Vec<(String, C64)> = model.z().iter().enumerate().map(|(i, z)| (format!("z{}", i + 1), *z)).collect();
            let eig_id = if n == 1 { "bethe.eigen.n1".to_string() } else { format!("bethe.eigen.n{n}") };
            out.reports.push(ResidualReport::new(&format!("bethe.residual.n{n}"), point.clone(), sol.residual_norm, Vec::new(), tol));
            out.reports.push(ResidualReport::new(&eig_id, point, eig, Vec::new(), tol));
            SolveRecord {
                n,
                z: model.z().to_vec(),
                converged: true,
                roots: sol.roots,
                residual_norm: sol.residual_norm,
                lambda,
                eigen_residual: eig,
                error: None,
            }
        }
        Err(e @ Error::NoConvergence { .. }) => {
            let Error::NoConvergence { best_roots, best_residual, .. } = &e else { unreachable!() };
            SolveRecord {
                n,
                z: model.z().to_vec(),
                converged: false,
                roots: best_roots.clone(),
                residual_norm: *best_residual,
                lambda: Vec::new(),
                eigen_residual: f64::INFINITY,
                error: Some(e.to_string()),
            }
        }
        Err(e) => return Err(e),
    };
    out.solves.push(record);
    Ok(out)
}

/// Runs a parsed command line; returns the exit code.
pub fn run(cli: &Cli, env_seed: Option<&str>) -> i32 {
    let started = Instant::now();
    let cfg = match resolve_config(cli, env_seed) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let model = match cfg.model() {
        Ok(m) => m,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let settings = cfg.settings();
    let outcome = match cli.command {
        Command::Selftest => {
            let suites = match cfg.suites() {
                Ok(s) => s,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return EXIT_USAGE;
                }
            };
            let mut all = SuiteOutcome::default();
            let mut result = Ok(());
            for s in suites {
                match run_suite(s, &model, &settings) {
                    Ok(o) => {
                        all.reports.extend(o.reports);
                        all.diagnostics.extend(o.diagnostics);
                        all.solves.extend(o.solves);
                    }
                    Err(e) => {
                        result = Err(e);
                        break;
                    }
                }
            }
            result.map(|_| all)
        }
        Command::Solve => {
            if model.n() > SOLVE_WARN_SITES {
                eprintln!("warning: {} sites; solving and eigenvector checks grow as 9^n", model.n());
            }
            solve_outcome(&cfg, &model)
        }
        Command::Dybe => dybe_sweep(&model, &settings),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
    };
    let report = Report::new(cli.command, &cfg, outcome, started);
    let path = cfg.output_path.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    if let Err(e) = std::fs::write(&path, report.to_toml()) {
        eprintln!("error: cannot write report to {}: {e}", path.display());
        return EXIT_USAGE;
    }
    for i in report.identity.iter().filter(|i| !i.pass) {
        eprintln!("FAIL {} max residual {} (tolerance {})", i.id, i.max_residual, i.tolerance);
    }
    for s in report.solve.iter().filter(|s| !s.converged) {
        eprintln!("FAIL solve n = {}: {}", s.n, s.error.as_deref().unwrap_or("not converged"));
    }
    println!(
        "{} {}: {} identities ({})",
        cli.command.name(),
        if report.pass { "passed" } else { "failed" },
        report.identity.len(),
        path.display()
    );
    if report.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("ellbethe").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn seed_precedence_is_flag_then_env_then_file() {
        assert_eq!(resolve_config(&cli(&["selftest"]), None).unwrap().seed, 0);
        assert_eq!(resolve_config(&cli(&["selftest"]), Some("9")).unwrap().seed, 9);
        assert_eq!(resolve_config(&cli(&["selftest", "--seed", "4"]), Some("9")).unwrap().seed, 4);
        assert!(resolve_config(&cli(&["selftest"]), Some("x")).is_err());
    }

    #[test]
    fn repeated_suite_flags_replace_config_suites() {
        let c = resolve_config(&cli(&["selftest", "--suite", "bethe", "--suite", "theta", "--suite", "bethe"]), None).unwrap();
        assert_eq!(c.suites().unwrap(), vec![Suite::Theta, Suite::Bethe]);
        let all = RunConfig::default().suites().unwrap();
        assert_eq!(all, Suite::ALL.to_vec());
    }

    #[test]
    fn residual_strings_have_six_significant_digits() {
        assert_eq!(sci(2.0304e-13), "2.03040e-13");
        assert_eq!(sci(1.0), "1.00000e0");
    }
}
