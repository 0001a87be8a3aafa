use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homcore::HomogeneousStructure;

/// Sub-nodes per segment used when maximizing the homogeneous norm of a
/// piecewise-linear history. The norm of a linear segment can peak between
/// nodes when some `r_i < 1`, so this is an approximation.
pub const HSUP_REFINEMENT: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HistoryRepr {
    Constant {
        value: Vec<f64>,
    },
    /// Linear interpolation of `values[k]` at `theta[k]`, with
    /// `theta[0] = -h` and `theta[last] = 0`.
    PiecewiseLinear {
        theta: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

/// Initial function on `[-h, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryFunction {
    pub h: f64,
    pub repr: HistoryRepr,
}

impl HistoryFunction {
    pub fn constant(h: f64, value: Vec<f64>) -> Result<Self> {
        let out = Self {
            h,
            repr: HistoryRepr::Constant { value },
        };
        out.validate()?;
        Ok(out)
    }

    pub fn piecewise_linear(h: f64, theta: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let out = Self {
            h,
            repr: HistoryRepr::PiecewiseLinear { theta, values },
        };
        out.validate()?;
        Ok(out)
    }

    /// Piecewise-linear history on a uniform grid of `values.len()` nodes.
    pub fn uniform(h: f64, values: Vec<Vec<f64>>) -> Result<Self> {
        let k = values.len();
        if k < 2 {
            return Err(Error::InvalidArgument(
                "need at least two history nodes".into(),
            ));
        }
        let theta = (0..k).map(|i| -h + h * i as f64 / (k - 1) as f64).collect();
        Self::piecewise_linear(h, theta, values)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "history length must be positive, got {}",
                self.h
            )));
        }
        match &self.repr {
            HistoryRepr::Constant { value } => {
                if value.is_empty() || value.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "constant history must be finite and nonempty".into(),
                    ));
                }
            }
            HistoryRepr::PiecewiseLinear { theta, values } => {
                if theta.len() < 2 || theta.len() != values.len() {
                    return Err(Error::InvalidArgument(
                        "piecewise-linear history needs matching theta/values with at least two nodes".into(),
                    ));
                }
                let tol = 1e-12 * self.h;
                if (theta[0] + self.h).abs() > tol || theta[theta.len() - 1].abs() > tol {
                    return Err(Error::InvalidArgument(
                        "history grid must span [-h, 0]".into(),
                    ));
                }
                if theta.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidArgument(
                        "history grid must be strictly increasing".into(),
                    ));
                }
                let n = values[0].len();
                if n == 0
                    || values
                        .iter()
                        .any(|v| v.len() != n || v.iter().any(|c| !c.is_finite()))
                {
                    return Err(Error::InvalidArgument(
                        "history values must be finite with a common dimension".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            HistoryRepr::Constant { value } => value.len(),
            HistoryRepr::PiecewiseLinear { values, .. } => values[0].len(),
        }
    }

    /// Value at `theta`, clamped into `[-h, 0]`.
    pub fn eval(&self, theta: f64) -> Vec<f64> {
        match &self.repr {
            HistoryRepr::Constant { value } => value.clone(),
            HistoryRepr::PiecewiseLinear {
                theta: grid,
                values,
            } => {
                let t = theta.clamp(-self.h, 0.0);
                let k = grid.partition_point(|g| *g <= t);
                if k == 0 {
                    return values[0].clone();
                }
                if k >= grid.len() {
                    return values[grid.len() - 1].clone();
                }
                let (t0, t1) = (grid[k - 1], grid[k]);
                let a = (t - t0) / (t1 - t0);
                values[k - 1]
                    .iter()
                    .zip(&values[k])
                    .map(|(v0, v1)| v0 + a * (v1 - v0))
                    .collect()
            }
        }
    }

    pub fn at_zero(&self) -> Vec<f64> {
        self.eval(0.0)
    }

    /// `max_theta |phi(theta)|_{r,p}`; exact for constants, refined node maximum otherwise.
    pub fn hsup_norm(&self, s: &HomogeneousStructure) -> f64 {
        match &self.repr {
            HistoryRepr::Constant { value } => s.norm(value),
            HistoryRepr::PiecewiseLinear { values, .. } => {
                let mut best = s.norm(&values[0]);
                for w in values.windows(2) {
                    for k in 1..=HSUP_REFINEMENT {
                        let a = k as f64 / HSUP_REFINEMENT as f64;
                        let p: Vec<f64> = w[0]
                            .iter()
                            .zip(&w[1])
                            .map(|(u, v)| u + a * (v - u))
                            .collect();
                        best = best.max(s.norm(&p));
                    }
                }
                best
            }
        }
    }

    /// Nodes on the uniform grid `theta_k = -h + k h / panels`, `k = 0..=panels`.
    pub fn sample_uniform(&self, panels: usize) -> Vec<Vec<f64>> {
        (0..=panels)
            .map(|k| self.eval(-self.h + self.h * k as f64 / panels as f64))
            .collect()
    }

    /// Applies the dilation to every value.
    pub fn dilated(&self, s: &HomogeneousStructure, eps: f64) -> Result<Self> {
        let repr = match &self.repr {
            HistoryRepr::Constant { value } => HistoryRepr::Constant {
                value: s.dilate(value, eps)?,
            },
            HistoryRepr::PiecewiseLinear { theta, values } => HistoryRepr::PiecewiseLinear {
                theta: theta.clone(),
                values: values
                    .iter()
                    .map(|v| s.dilate(v, eps))
                    .collect::<Result<_>>()?,
            },
        };
        Ok(Self { h: self.h, repr })
    }
}
