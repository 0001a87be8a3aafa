//! Fixed-step RK4 for `x'(t) = f(x(t), x(t - h))` by the method of steps.
//!
//! The step is `h / N`, so the delayed argument of the first and last RK
//! stage is a stored node. The half-step stages need `x(t + dt/2 - h)`:
//! inside the initial interval it comes straight from the history function,
//! later from a cubic through four stored nodes that never straddles a
//! multiple of `h` (the solution is only piecewise smooth across those).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::HistoryFunction;
use crate::homcore::HomogeneousStructure;
use crate::model::SystemModel;

pub const MIN_STEPS_PER_DELAY: usize = 8;
pub const DEFAULT_STEPS_PER_DELAY: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub h: f64,
    pub dt: f64,
    pub steps_per_delay: usize,
    /// History nodes `t = -h .. 0` followed by solution nodes; `nodes[N]` is `x(0)`.
    pub nodes: Vec<Vec<f64>>,
    /// `|x|_{r,p}` at every entry of `nodes`.
    pub hom_norms: Vec<f64>,
    /// Stage or step states that dipped below zero and were clamped.
    pub clamp_count: usize,
    /// `v(x_t)` per solution node, once computed.
    pub v_series: Option<Vec<f64>>,
}

impl Trajectory {
    /// Number of solution nodes (`t = 0 .. T`).
    pub fn len(&self) -> usize {
        self.nodes.len() - self.steps_per_delay
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.nodes[self.steps_per_delay + k]
    }

    /// Node `j` (`0..=N`) of the segment `x_t` at solution node `k`.
    pub fn segment_node(&self, k: usize, j: usize) -> &[f64] {
        &self.nodes[k + j]
    }

    pub fn hom_norm(&self, k: usize) -> f64 {
        self.hom_norms[self.steps_per_delay + k]
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.len() - 1)
    }
}

fn lagrange_cubic(points: [&[f64]; 4], u: f64, out: &mut [f64]) {
    let w = [
        -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0,
        u * (u - 2.0) * (u - 3.0) / 2.0,
        -u * (u - 1.0) * (u - 3.0) / 2.0,
        u * (u - 1.0) * (u - 2.0) / 6.0,
    ];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|k| w[k] * points[k][i]).sum();
    }
}

fn check_state(x: &[f64], time: f64) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure {
            time,
            reason: "non-finite state".into(),
        });
    }
    Ok(())
}

/// Integrates on `[0, horizon]` with `steps_per_delay` steps per delay interval.
pub fn integrate(
    model: &SystemModel,
    phi: &HistoryFunction,
    horizon: f64,
    steps_per_delay: usize,
) -> Result<Trajectory> {
    let n = model.dim();
    let h = model.delay;
    if steps_per_delay < MIN_STEPS_PER_DELAY {
        return Err(Error::InvalidArgument(format!(
            "steps_per_delay must be >= {MIN_STEPS_PER_DELAY}, got {steps_per_delay}"
        )));
    }
    if phi.dim() != n || (phi.h - h).abs() > 1e-12 * h {
        return Err(Error::InvalidArgument(
            "history does not match the model (dimension or delay)".into(),
        ));
    }
    let big_n = steps_per_delay;
    let dt = h / big_n as f64;
    let steps_f = horizon / dt;
    let steps = steps_f.round();
    if !(horizon >= 0.0) || (steps - steps_f).abs() > 1e-9 * steps_f.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} is not a nonnegative multiple of the step {dt}"
        )));
    }
    let steps = steps as usize;
    let orthant = model.domain.is_orthant();

    let mut nodes: Vec<Vec<f64>> = Vec::with_capacity(big_n + steps + 1);
    for j in 0..big_n {
        nodes.push(phi.eval(-h + j as f64 * dt));
    }
    nodes.push(phi.at_zero());
    check_state(&nodes[big_n], 0.0)?;

    let mut clamps = 0usize;
    let clamp = |x: &mut [f64]| -> usize {
        if !orthant {
            return 0;
        }
        let mut c = 0;
        for v in x.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
                c += 1;
            }
        }
        c
    };

    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut stage = vec![0.0; n];
    let mut ymid = vec![0.0; n];
    for k in 0..steps {
        let t = k as f64 * dt;
        // Delayed node index in `nodes` for time t - h is k.
        let x = nodes[big_n + k].clone();
        if k < big_n {
            ymid = phi.eval(-h + (k as f64 + 0.5) * dt);
        } else {
            // Solution index of the left node; stencil kept inside [m h, (m + 1) h].
            let j = k - big_n;
            let seg = j / big_n;
            let start = (j.saturating_sub(1)).clamp(seg * big_n, (seg + 1) * big_n - 3);
            let pts = [
                nodes[big_n + start].as_slice(),
                nodes[big_n + start + 1].as_slice(),
                nodes[big_n + start + 2].as_slice(),
                nodes[big_n + start + 3].as_slice(),
            ];
            lagrange_cubic(pts, (j - start) as f64 + 0.5, &mut ymid);
        }
        model.field.eval(&x, &nodes[k], &mut k1);
        for i in 0..n {
            stage[i] = x[i] + 0.5 * dt * k1[i];
        }
        clamps += clamp(&mut stage);
        model.field.eval(&stage, &ymid, &mut k2);
        for i in 0..n {
            stage[i] = x[i] + 0.5 * dt * k2[i];
        }
        clamps += clamp(&mut stage);
        model.field.eval(&stage, &ymid, &mut k3);
        for i in 0..n {
            stage[i] = x[i] + dt * k3[i];
        }
        clamps += clamp(&mut stage);
        model.field.eval(&stage, &nodes[k + 1], &mut k4);
        let mut next: Vec<f64> = (0..n)
            .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        let t_next = t + dt;
        check_state(&next, t_next)?;
        if orthant {
            let tol = 1e-12 * (1.0 + next.iter().map(|v| v * v).sum::<f64>().sqrt());
            for (i, v) in next.iter_mut().enumerate() {
                if *v < -tol {
                    return Err(Error::DomainViolation {
                        time: t_next,
                        component: i,
                        value: *v,
                    });
                }
                if *v < 0.0 {
                    *v = 0.0;
                    clamps += 1;
                }
            }
        }
        nodes.push(next);
    }
    let s = &model.structure;
    let hom_norms = nodes.iter().map(|x| s.norm(x)).collect();
    Ok(Trajectory {
        h,
        dt,
        steps_per_delay: big_n,
        nodes,
        hom_norms,
        clamp_count: clamps,
        v_series: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomNormSeries {
    /// `|x(t)|_{r,p}` per solution node.
    pub pointwise: Vec<f64>,
    /// `|x_t|_H`: maximum over the trailing `N + 1` nodes.
    pub segment_sup: Vec<f64>,
}

pub fn hom_norm_series(traj: &Trajectory, s: &HomogeneousStructure) -> HomNormSeries {
    let big_n = traj.steps_per_delay;
    let all: Vec<f64> = traj.nodes.iter().map(|x| s.norm(x)).collect();
    let mut segment_sup = Vec::with_capacity(traj.len());
    // Monotone deque of indices with decreasing norms.
    let mut window: VecDeque<usize> = VecDeque::new();
    for (idx, &v) in all.iter().enumerate() {
        while window.back().is_some_and(|&b| all[b] <= v) {
            window.pop_back();
        }
        window.push_back(idx);
        if idx >= big_n {
            while window.front().is_some_and(|&f| f + big_n < idx) {
                window.pop_front();
            }
            segment_sup.push(all[window[0]]);
        }
    }
    HomNormSeries {
        pointwise: all[big_n..].to_vec(),
        segment_sup,
    }
}

/// Decay envelope `c1 |phi| / (1 + c2 |phi|^mu t)^(1/mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub c_hat1: f64,
    pub c_hat2: f64,
    pub mu: f64,
}

impl Envelope {
    pub fn eval(&self, t: f64, phi_norm: f64) -> f64 {
        self.c_hat1 * phi_norm
            / (1.0 + self.c_hat2 * phi_norm.powf(self.mu) * t).powf(1.0 / self.mu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub checked: usize,
    pub violations: usize,
    /// Largest `|x(t)| - envelope(t)`; negative when contained.
    pub max_signed_violation: f64,
    pub first_violation_time: Option<f64>,
    pub atol: f64,
}

impl ContainmentReport {
    pub fn contained(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `|x(t)|_{r,p} <= envelope(t) + atol` at every solution node.
pub fn check_envelope(
    traj: &Trajectory,
    envelope: &Envelope,
    phi_norm: f64,
    atol: f64,
) -> ContainmentReport {
    let mut report = ContainmentReport {
        checked: 0,
        violations: 0,
        max_signed_violation: f64::NEG_INFINITY,
        first_violation_time: None,
        atol,
    };
    for k in 0..traj.len() {
        let t = traj.time(k);
        let excess = traj.hom_norm(k) - envelope.eval(t, phi_norm);
        report.checked += 1;
        report.max_signed_violation = report.max_signed_violation.max(excess);
        if excess > atol {
            report.violations += 1;
            report.first_violation_time.get_or_insert(t);
        }
    }
    report
}
