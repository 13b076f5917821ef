use nalgebra::{DMatrix, DVector};

use super::{bethe_residuals, ModelConfig};
use crate::error::{Error, Result};
use crate::sampling::GenericSampler;
use crate::theta::C64;

/// Minimum separation (mod 1 in the real part) between accepted roots.
pub const ROOT_SEPARATION: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_restarts: usize,
    pub max_iters: usize,
    pub tolerance: f64,
    /// Maximum step halvings per Newton step.
    pub max_halvings: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_restarts: 32,
            max_iters: 80,
            tolerance: 1e-12,
            max_halvings: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetheSolution {
    /// Real parts reduced to `[0, 1)`.
    pub roots: Vec<C64>,
    pub residual_norm: f64,
    pub c: C64,
    pub converged: bool,
    /// Newton iterations of the accepted restart.
    pub iterations: usize,
    /// Index of the accepted restart.
    pub restart: usize,
}

fn residual_norm(u: &[C64], config: &ModelConfig) -> f64 {
    match bethe_residuals(u, config) {
        Ok(r) => r.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt(),
        Err(_) => f64::INFINITY,
    }
}

fn periodic_distance(a: C64, b: C64) -> f64 {
    let d = a - b;
    C64::new(d.re - d.re.round(), d.im).norm()
}

fn min_separation(u: &[C64]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let d = periodic_distance(u[i], u[j]);
            if best.is_none_or(|b| d < b.2) {
                best = Some((i, j, d));
            }
        }
    }
    best
}

struct Attempt {
    roots: Vec<C64>,
    residual: f64,
    iterations: usize,
}

fn newton(start: Vec<C64>, config: &ModelConfig, opts: &SolverOptions) -> Result<Attempt> {
    let n = start.len();
    let mut x = start;
    let mut fx = bethe_residuals(&x, config)?;
    let mut norm = fx.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut iterations = 0;
    while iterations < opts.max_iters && norm >= opts.tolerance {
        iterations += 1;
        let mut jac = DMatrix::<C64>::zeros(n, n);
        for k in 0..n {
            let h = 1e-7 * (1.0 + x[k].norm());
            let mut xp = x.clone();
            xp[k] += h;
            let fp = bethe_residuals(&xp, config)?;
            for i in 0..n {
                jac[(i, k)] = (fp[i] - fx[i]) / h;
            }
        }
        let rhs = DVector::from_iterator(n, fx.iter().map(|v| -v));
        let dx = jac.lu().solve(&rhs).ok_or(Error::IllConditioned)?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<C64> = x.iter().zip(dx.iter()).map(|(a, d)| a + d * lambda).collect();
            let tn = residual_norm(&trial, config);
            if tn < norm {
                accepted = Some((trial, tn));
                break;
            }
            lambda *= 0.5;
        }
        let Some((trial, tn)) = accepted else { break };
        x = trial;
        norm = tn;
        fx = bethe_residuals(&x, config)?;
    }
    Ok(Attempt {
        roots: x,
        residual: norm,
        iterations,
    })
}

/// Damped Newton with seeded restarts.
///
/// Restart 0 starts from `initial`, or from `z_k + eta` when none is given;
/// restart `r > 0` perturbs `z_k + eta` with a generator seeded by `seed + r`. A restart is
/// accepted when the residual norm is below tolerance and the roots are
/// pairwise separated mod 1.
pub fn solve_bethe(
    config: &ModelConfig,
    initial: Option<&[C64]>,
    opts: &SolverOptions,
) -> Result<BetheSolution> {
    let n = config.n();
    if let Some(init) = initial {
        if init.len() != n {
            return Err(Error::InvalidParameter(format!(
                "expected {n} initial roots, got {}",
                init.len()
            )));
        }
        if let Some((i, j, distance)) = min_separation(init) {
            if distance < ROOT_SEPARATION {
                return Err(Error::RootCollision { i, j, distance });
            }
        }
    }
    let base: Vec<C64> = config.z().iter().map(|z| z + config.eta()).collect();
    let mut best: Option<Attempt> = None;
    for restart in 0..opts.max_restarts.max(1) {
        let start = match (restart, initial) {
            (0, Some(init)) => init.to_vec(),
            (0, None) => base.clone(),
            _ => {
                let mut sampler = GenericSampler::new(config.seed().wrapping_add(restart as u64), 0);
                base.iter()
                    .map(|b| b + C64::new(0.3 * sampler.unit(), 0.4 * sampler.unit()))
                    .collect()
            }
        };
        let attempt = match newton(start, config, opts) {
            Ok(a) => a,
            Err(e) if e.is_nongeneric() => continue,
            Err(e) => return Err(e),
        };
        let separated = min_separation(&attempt.roots).is_none_or(|s| s.2 > ROOT_SEPARATION);
        if attempt.residual < opts.tolerance && separated {
            let roots = attempt
                .roots
                .iter()
                .map(|r| C64::new(r.re.rem_euclid(1.0), r.im))
                .collect();
            return Ok(BetheSolution {
                roots,
                residual_norm: attempt.residual,
                c: config.c(),
                converged: true,
                iterations: attempt.iterations,
                restart,
            });
        }
        if separated && best.as_ref().is_none_or(|b| attempt.residual < b.residual) {
            best = Some(attempt);
        }
    }
    let (best_residual, best_roots) = best.map_or((f64::INFINITY, Vec::new()), |b| (b.residual, b.roots));
    Err(Error::NoConvergence {
        restarts: opts.max_restarts,
        best_residual,
        best_roots,
    })
}
