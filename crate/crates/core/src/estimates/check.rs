use serde::{Deserialize, Serialize};

use super::comparison::ComparisonSolution;
use super::envelope::EstimateCertificate;
use crate::check::BoundCheck;
use crate::error::{Error, Result};
use crate::functional::{Variant, DERIVATIVE_RTOL, FD_BUDGET, QUADRATURE_RTOL};
use crate::sim::{hom_norm_series, Trajectory};

/// Checks of the comparison argument along one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `dv/dt <= -rho2 v^((gamma+mu)/gamma)`.
    pub differential: BoundCheck,
    /// `v(x_t) < u(t)`.
    pub majorant: BoundCheck,
    /// `u(t + theta) < alpha^gamma u(t)`, with `u = u0` before `t = 0`.
    pub ratio: BoundCheck,
    /// `a |x(t)|^gamma < u(t)` with the variant's lower coefficient.
    pub state_bound: BoundCheck,
}

impl ComparisonReport {
    pub fn checks(&self) -> [&BoundCheck; 4] {
        [
            &self.differential,
            &self.majorant,
            &self.ratio,
            &self.state_bound,
        ]
    }

    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed())
    }
}

const NAMES: [&str; 4] = [
    "comparison differential inequality",
    "functional below comparison solution",
    "comparison ratio over a delay",
    "state below comparison solution",
];

/// Evaluates the four comparison checks; `v_series` holds `v(x_t)` per solution node.
pub fn check_comparison_bounds(
    traj: &Trajectory,
    v_series: &[f64],
    cert: &EstimateCertificate,
    comparison: &ComparisonSolution,
    atol: f64,
) -> Result<ComparisonReport> {
    if v_series.len() != traj.len() {
        return Err(Error::InvalidArgument(
            "v series length differs from the trajectory".into(),
        ));
    }
    let s = &cert.functional.structure;
    let (gamma, mu) = (s.gamma(), s.mu());
    let norms = hom_norm_series(traj, s);
    let phi_norm = norms.segment_sup[0];
    let within = norms.segment_sup.iter().all(|&n| n <= cert.delta());
    let reason = if !cert.admits(phi_norm) {
        Some(format!(
            "|phi|_H = {phi_norm:e} not below the radius {:e}",
            cert.radius
        ))
    } else if !within {
        Some("trajectory leaves the delta-ball".to_string())
    } else {
        None
    };
    if let Some(r) = reason {
        let [a, b, c, d] = NAMES.map(|n| BoundCheck::not_applicable(n, r.clone()));
        return Ok(ComparisonReport {
            differential: a,
            majorant: b,
            ratio: c,
            state_bound: d,
        });
    }
    let [n0, n1, n2, n3] = NAMES;
    let mut differential = BoundCheck::new(n0);
    let mut majorant = BoundCheck::new(n1);
    let mut ratio = match (cert.variant, cert.alpha) {
        (Variant::Razumikhin, Some(_)) => BoundCheck::new(n2),
        _ => BoundCheck::not_applicable(n2, "no alpha for the classical variant"),
    };
    let mut state_bound = BoundCheck::new(n3);

    let u: Vec<f64> = (0..traj.len())
        .map(|k| comparison.eval(traj.time(k)))
        .collect();
    let vmax = v_series.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let rho2 = cert.connection.rho2;
    for k in 1..v_series.len().saturating_sub(1) {
        let dv = (v_series[k + 1] - v_series[k - 1]) / (2.0 * traj.dt);
        let rhs = -rho2 * v_series[k].max(0.0).powf((gamma + mu) / gamma);
        let tol = atol + FD_BUDGET * vmax + DERIVATIVE_RTOL * (dv.abs() + rhs.abs());
        differential.record(traj.time(k), dv, rhs, tol, false);
    }
    let lower = cert.functional.lower_coefficient();
    for (k, (&v, &uk)) in v_series.iter().zip(&u).enumerate() {
        let t = traj.time(k);
        majorant.record(t, v, uk, atol + QUADRATURE_RTOL * v.abs(), true);
        state_bound.record(t, lower * norms.pointwise[k].powf(gamma), uk, atol, true);
    }
    if let (true, Some(alpha)) = (ratio.applicable, cert.alpha) {
        let factor = alpha.powf(gamma);
        let big_n = traj.steps_per_delay;
        for k in 0..u.len() {
            let bound = factor * u[k];
            for j in 0..=big_n {
                let earlier = if j > k { comparison.u0 } else { u[k - j] };
                ratio.record(traj.time(k), earlier, bound, atol, true);
            }
        }
    }
    Ok(ComparisonReport {
        differential,
        majorant,
        ratio,
        state_bound,
    })
}
