//! System description: the delayed vector field, the Lyapunov function of the
//! delay-free system, and the domain on which both are evaluated.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homcore::HomogeneousStructure;

/// Right-hand side `f(x, y)` of `x'(t) = f(x(t), x(t - h))`.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64], y: &[f64], out: &mut [f64]);

    /// Row-major `n x n` Jacobian with respect to the current state `x`.
    fn jacobian_x(&self, x: &[f64], y: &[f64], out: &mut [f64]);
}

/// A `C^2` Lyapunov function with analytic gradient and Hessian.
pub trait LyapunovFunction: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64], out: &mut [f64]);

    /// Row-major `n x n` Hessian.
    fn hessian(&self, x: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    #[default]
    FullSpace,
    NonnegativeOrthant,
}

impl Domain {
    pub fn is_orthant(self) -> bool {
        matches!(self, Domain::NonnegativeOrthant)
    }
}

#[derive(Clone)]
pub struct SystemModel {
    pub structure: HomogeneousStructure,
    pub delay: f64,
    pub field: Arc<dyn VectorField>,
    pub lyapunov: Arc<dyn LyapunovFunction>,
    pub domain: Domain,
}

impl fmt::Debug for SystemModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemModel")
            .field("structure", &self.structure)
            .field("delay", &self.delay)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl SystemModel {
    pub fn new(
        structure: HomogeneousStructure,
        delay: f64,
        field: Arc<dyn VectorField>,
        lyapunov: Arc<dyn LyapunovFunction>,
        domain: Domain,
    ) -> Result<Self> {
        if !(delay > 0.0 && delay.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "delay must be positive, got {delay}"
            )));
        }
        let n = structure.dim();
        if field.dim() != n || lyapunov.dim() != n {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: structure {n}, field {}, Lyapunov function {}",
                field.dim(),
                lyapunov.dim()
            )));
        }
        Ok(Self {
            structure,
            delay,
            field,
            lyapunov,
            domain,
        })
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    pub fn f(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.field.eval(x, y, &mut out);
        out
    }

    pub fn grad_v(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.lyapunov.gradient(x, &mut out);
        out
    }
}

/// Central-difference derivatives, used only to validate analytic ones.
pub mod fd {
    use super::{LyapunovFunction, VectorField};

    fn step(x: &[f64]) -> f64 {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        1e-6 * (1.0 + norm)
    }

    pub fn jacobian_x(field: &dyn VectorField, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = x.len();
        let hstep = step(x);
        let mut out = vec![0.0; n * n];
        let (mut fp, mut fm) = (vec![0.0; n], vec![0.0; n]);
        let mut xp = x.to_vec();
        for j in 0..n {
            xp[j] = x[j] + hstep;
            field.eval(&xp, y, &mut fp);
            xp[j] = x[j] - hstep;
            field.eval(&xp, y, &mut fm);
            xp[j] = x[j];
            for i in 0..n {
                out[i * n + j] = (fp[i] - fm[i]) / (2.0 * hstep);
            }
        }
        out
    }

    pub fn gradient(v: &dyn LyapunovFunction, x: &[f64]) -> Vec<f64> {
        let hstep = step(x);
        let mut xp = x.to_vec();
        (0..x.len())
            .map(|j| {
                xp[j] = x[j] + hstep;
                let vp = v.value(&xp);
                xp[j] = x[j] - hstep;
                let vm = v.value(&xp);
                xp[j] = x[j];
                (vp - vm) / (2.0 * hstep)
            })
            .collect()
    }

    pub fn hessian(v: &dyn LyapunovFunction, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let hstep = step(x);
        let mut out = vec![0.0; n * n];
        let (mut gp, mut gm) = (vec![0.0; n], vec![0.0; n]);
        let mut xp = x.to_vec();
        for j in 0..n {
            xp[j] = x[j] + hstep;
            v.gradient(&xp, &mut gp);
            xp[j] = x[j] - hstep;
            v.gradient(&xp, &mut gm);
            xp[j] = x[j];
            for i in 0..n {
                out[i * n + j] = (gp[i] - gm[i]) / (2.0 * hstep);
            }
        }
        out
    }
}
