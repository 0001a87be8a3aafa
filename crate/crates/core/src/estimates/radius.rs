use crate::error::{Error, Result};
use crate::functional::FunctionalCertificate;
use crate::roots::bisect_increasing;

/// Allowed residual of the radius equation, relative to its right side.
pub const ROOT_RTOL: f64 = 1e-12;

/// Positive root of `alpha1 R^gamma + b3 R^(gamma+mu) = a delta^gamma` on `[0, delta]`.
pub fn radius_root(alpha1: f64, b3: f64, a: f64, delta: f64, gamma: f64, mu: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Infeasible(format!(
            "lower-bound coefficient {a:e} <= 0"
        )));
    }
    if !(delta > 0.0 && alpha1 >= a && b3 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius equation needs delta > 0, alpha1 >= a, b3 >= 0 (delta = {delta:e}, alpha1 = {alpha1:e}, a = {a:e}, b3 = {b3:e})"
        )));
    }
    // Work in R = delta * u to keep the powers away from underflow.
    let rhs = a;
    let g = |u: f64| alpha1 * u.powf(gamma) + b3 * delta.powf(mu) * u.powf(gamma + mu) - rhs;
    let u = bisect_increasing(g, 0.0, 1.0);
    let root = delta * u;
    let residual = radius_residual(alpha1, b3, a, delta, gamma, mu, root);
    if residual > ROOT_RTOL {
        return Err(Error::InternalInconsistency(format!(
            "radius residual {residual:e} exceeds {ROOT_RTOL:e}"
        )));
    }
    Ok(root)
}

/// `|alpha1 R^gamma + b3 R^(gamma+mu) - a delta^gamma| / (a delta^gamma)`.
pub fn radius_residual(
    alpha1: f64,
    b3: f64,
    a: f64,
    delta: f64,
    gamma: f64,
    mu: f64,
    root: f64,
) -> f64 {
    let rhs = a * delta.powf(gamma);
    (alpha1 * root.powf(gamma) + b3 * root.powf(gamma + mu) - rhs).abs() / rhs
}

/// Radius of the attraction-region estimate on the whole `delta`-ball.
pub fn attraction_radius_classical(cert: &FunctionalCertificate) -> Result<f64> {
    let s = &cert.structure;
    radius_root(
        cert.constants.alpha1,
        cert.upper.b3,
        cert.lower.a1,
        cert.delta,
        s.gamma(),
        s.mu(),
    )
}

/// Radius of the attraction-region estimate using the `S_alpha` lower bound.
pub fn attraction_radius_razumikhin(cert: &FunctionalCertificate) -> Result<f64> {
    let sb = cert
        .set_bound
        .ok_or_else(|| Error::InvalidArgument("certificate has no S_alpha bound".into()))?;
    let s = &cert.structure;
    radius_root(
        cert.constants.alpha1,
        cert.upper.b3,
        sb.a1_tilde,
        cert.delta,
        s.gamma(),
        s.mu(),
    )
}
