use crate::bethe::ModelConfig;
use crate::error::{Error, Result};
use crate::laxrep::{transfer_matrix, TrigPolynomial};
use crate::linalg::norm;
use crate::sampling::GenericSampler;
use crate::theta::C64;

/// `|[t(u), t(v)] Psi(q)| / |t(u) t(v) Psi(q)|` with `t` restricted to the
/// weight-`weight` subspace and `Psi` a random trigonometric polynomial there.
///
/// Only `weight = 0` is claimed to commute; other weights serve as a control.
pub fn transfer_commutativity_residual(
    u: C64,
    v: C64,
    q: C64,
    weight: i32,
    config: &ModelConfig,
    sampler: &mut GenericSampler,
) -> Result<f64> {
    let space = config.rep().space();
    let support = space.indices_of_weight(weight);
    if support.is_empty() {
        return Err(Error::InvalidParameter(format!("weight {weight} subspace is empty")));
    }
    let psi = TrigPolynomial::random(sampler, space.dim(), 2, Some(&support));
    let tu = transfer_matrix(config.rep(), u).restricted(weight);
    let tv = transfer_matrix(config.rep(), v).restricted(weight);
    let a = tu.compose(&tv)?.apply(&psi, q)?;
    let b = tv.compose(&tu)?.apply(&psi, q)?;
    let scale = norm(&a);
    if scale == 0.0 {
        return Err(Error::DenominatorNearZero { factor: "|t(u) t(v) Psi|" });
    }
    Ok(norm(&(a - b)) / scale)
}
