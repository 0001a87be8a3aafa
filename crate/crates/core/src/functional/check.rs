//! Numerical validation of the functional bounds along a simulated solution.

use serde::{Deserialize, Serialize};

use super::certificate::FunctionalCertificate;
use super::evaluate::{functional_from_nodes, FunctionalParts, WeightSplit};
use crate::check::BoundCheck;
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::sim::{hom_norm_series, Trajectory};

/// Relative slack for quadrature error in the static bounds.
pub const QUADRATURE_RTOL: f64 = 1e-9;
/// Relative slack for the centred-difference truncation error.
pub const DERIVATIVE_RTOL: f64 = 1e-6;
/// Absolute slack of the derivative checks as a multiple of `max |v|`.
pub const FD_BUDGET: f64 = 1e-6;

/// `v(x_t)` and its parts at every solution node, from the trajectory nodes
/// themselves (every `N / panels`-th node of the segment).
pub fn functional_series(
    traj: &Trajectory,
    model: &SystemModel,
    split: &WeightSplit,
    panels: usize,
) -> Result<Vec<FunctionalParts>> {
    let big_n = traj.steps_per_delay;
    if panels < 2 || !panels.is_multiple_of(2) || !big_n.is_multiple_of(panels) {
        return Err(Error::InvalidArgument(format!(
            "quadrature panels ({panels}) must be even and divide steps_per_delay ({big_n})"
        )));
    }
    let stride = big_n / panels;
    Ok((0..traj.len())
        .map(|k| functional_from_nodes(|j| traj.segment_node(k, j * stride), panels, model, split))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalBoundReport {
    /// `v >= a1 |x|^gamma + a2 int |x|^(gamma+mu)`.
    pub lower: BoundCheck,
    /// `v <= b1 |x|^gamma + b2 int |x|^gamma`.
    pub upper_integral: BoundCheck,
    /// `v <= alpha1 |x|^gamma + b3 |x_t|_H^(gamma+mu)`.
    pub upper_sup: BoundCheck,
    /// `v >= a1_tilde |x|^gamma + w1 int |x|^(gamma+mu)` on `S_alpha`.
    pub set_lower: BoundCheck,
    /// `dv/dt <= -c0 |x(t)|^(gamma+mu) - c1 |x(t-h)|^(gamma+mu) - c2 int |x|^(gamma+mu)`.
    pub derivative: BoundCheck,
    /// Solution nodes whose segment left the `delta`-ball.
    pub outside_ball: usize,
    pub atol: f64,
}

impl FunctionalBoundReport {
    pub fn checks(&self) -> [&BoundCheck; 5] {
        [
            &self.lower,
            &self.upper_integral,
            &self.upper_sup,
            &self.set_lower,
            &self.derivative,
        ]
    }

    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed())
    }
}

/// Checks every bound at each solution node, given a precomputed series.
///
/// Static bounds get slack `atol + QUADRATURE_RTOL (|lhs| + |rhs|)`; the
/// derivative bound gets `atol + FD_BUDGET max|v| + DERIVATIVE_RTOL (|dv| + |rhs|)`.
pub fn check_functional_series(
    traj: &Trajectory,
    series: &[FunctionalParts],
    cert: &FunctionalCertificate,
    atol: f64,
) -> Result<FunctionalBoundReport> {
    if series.len() != traj.len() {
        return Err(Error::InvalidArgument(
            "series length differs from the trajectory".into(),
        ));
    }
    let s = &cert.structure;
    let (gamma, mu) = (s.gamma(), s.mu());
    let delta = cert.delta;
    let norms = hom_norm_series(traj, s);
    let bc = &cert.constants;
    let (lb, ub, db) = (&cert.lower, &cert.upper, &cert.derivative);

    let mut lower = if lb.feasible(delta) {
        BoundCheck::new("lower bound")
    } else {
        BoundCheck::not_applicable(
            "lower bound",
            "classical lower bound infeasible at this delta",
        )
    };
    let mut upper_integral = BoundCheck::new("upper bound (integral form)");
    let mut upper_sup = BoundCheck::new("upper bound (sup form)");
    let mut set_lower = match &cert.set_bound {
        Some(sb) if sb.feasible(delta) => BoundCheck::new("S_alpha lower bound"),
        Some(_) => BoundCheck::not_applicable(
            "S_alpha lower bound",
            "S_alpha bound infeasible at this delta",
        ),
        None => BoundCheck::not_applicable("S_alpha lower bound", "certificate has no alpha"),
    };
    let mut derivative = if db.feasible(delta) {
        BoundCheck::new("derivative bound")
    } else {
        BoundCheck::not_applicable(
            "derivative bound",
            "derivative bound infeasible at this delta",
        )
    };
    let qtol = |a: f64, b: f64| atol + QUADRATURE_RTOL * (a.abs() + b.abs());
    let inside: Vec<bool> = norms.segment_sup.iter().map(|&n| n <= delta).collect();
    let outside_ball = inside.iter().filter(|&&b| !b).count();

    for (k, p) in series.iter().enumerate() {
        let t = traj.time(k);
        if !inside[k] {
            for c in [
                &mut lower,
                &mut upper_integral,
                &mut upper_sup,
                &mut set_lower,
            ] {
                c.skip();
            }
            continue;
        }
        let v = p.value();
        let x_g = p.norm0.powf(gamma);
        if lower.applicable {
            let rhs = lb.a1 * x_g + lb.a2 * p.int_pow_gamma_mu;
            lower.record(t, rhs, v, qtol(v, rhs), false);
        }
        let rhs = ub.b1 * x_g + ub.b2 * p.int_pow_gamma;
        upper_integral.record(t, v, rhs, qtol(v, rhs), false);
        let rhs = bc.alpha1 * x_g + ub.b3 * norms.segment_sup[k].powf(gamma + mu);
        upper_sup.record(t, v, rhs, qtol(v, rhs), false);
        if let (true, Some(sb)) = (set_lower.applicable, &cert.set_bound) {
            if norms.segment_sup[k] <= sb.alpha * norms.pointwise[k] {
                let rhs = sb.a1_tilde * x_g + cert.split.w1 * p.int_pow_gamma_mu;
                set_lower.record(t, rhs, v, qtol(v, rhs), false);
            } else {
                set_lower.skip();
            }
        }
    }

    if derivative.applicable {
        let vmax = series.iter().map(|p| p.value().abs()).fold(0.0, f64::max);
        for k in 1..series.len().saturating_sub(1) {
            if !(inside[k - 1] && inside[k] && inside[k + 1]) {
                derivative.skip();
                continue;
            }
            let dv = (series[k + 1].value() - series[k - 1].value()) / (2.0 * traj.dt);
            let delayed = traj.hom_norms[k].powf(gamma + mu);
            let p = &series[k];
            let rhs =
                -db.c0 * p.norm0.powf(gamma + mu) - db.c1 * delayed - db.c2 * p.int_pow_gamma_mu;
            let tol = atol + FD_BUDGET * vmax + DERIVATIVE_RTOL * (dv.abs() + rhs.abs());
            derivative.record(traj.time(k), dv, rhs, tol, false);
        }
    }
    for c in [
        &mut lower,
        &mut upper_integral,
        &mut upper_sup,
        &mut set_lower,
        &mut derivative,
    ] {
        if c.applicable && c.skipped > 0 && c.note.is_none() {
            c.note = Some(format!("{} nodes skipped", c.skipped));
        }
    }
    Ok(FunctionalBoundReport {
        lower,
        upper_integral,
        upper_sup,
        set_lower,
        derivative,
        outside_ball,
        atol,
    })
}

/// Computes the functional series and checks all bounds in one call.
pub fn check_functional_bounds(
    traj: &Trajectory,
    model: &SystemModel,
    cert: &FunctionalCertificate,
    panels: usize,
    atol: f64,
) -> Result<(Vec<FunctionalParts>, FunctionalBoundReport)> {
    let series = functional_series(traj, model, &cert.split, panels)?;
    let report = check_functional_series(traj, &series, cert, atol)?;
    Ok((series, report))
}
