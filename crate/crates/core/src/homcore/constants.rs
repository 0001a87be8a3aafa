use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a family of constants came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Analytic,
    /// Sampled maximum/minimum; not a rigorous bound. The safety factor
    /// inflates maxima and shrinks minima.
    Sampled {
        samples: usize,
        safety: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceTable {
    pub m: Provenance,
    pub eta: Provenance,
    pub beta: Provenance,
    pub psi: Provenance,
    pub alpha0: Provenance,
    pub alpha1: Provenance,
    pub w: Provenance,
}

impl ProvenanceTable {
    pub fn all(p: Provenance) -> Self {
        Self {
            m: p,
            eta: p,
            beta: p,
            psi: p,
            alpha0: p,
            alpha1: p,
            w: p,
        }
    }
}

/// Componentwise growth bounds of the vector field and the Lyapunov function.
///
/// * `|f_i(x,y)| <= m_i (|x|^(mu+r_i) + |y|^(mu+r_i))`
/// * `|df_i/dx_j|` bounded through `eta_ij` with the degree `mu + r_i - r_j`
/// * `alpha0 |x|^gamma <= V(x) <= alpha1 |x|^gamma`
/// * `|dV/dx_i| <= beta_i |x|^(gamma - r_i)`, `|d2V/dx_i dx_j| <= psi_ij |x|^(gamma - r_i - r_j)`
/// * `dV/dx . f(x, x) <= -w |x|^(gamma + mu)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub m: Vec<f64>,
    pub eta: Vec<Vec<f64>>,
    pub beta: Vec<f64>,
    pub psi: Vec<Vec<f64>>,
    pub alpha0: f64,
    pub alpha1: f64,
    pub w: f64,
    pub provenance: ProvenanceTable,
}

impl BoundConstants {
    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// `sum_i beta_i m_i`, which appears in nearly every certificate constant.
    pub fn sum_beta_m(&self) -> f64 {
        self.beta.iter().zip(&self.m).map(|(b, m)| b * m).sum()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let square = |name: &str, a: &[Vec<f64>]| -> Result<()> {
            if a.len() != n || a.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidArgument(format!("{name} must be {n}x{n}")));
            }
            if a.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidArgument(format!(
                    "{name} entries must be >= 0"
                )));
            }
            Ok(())
        };
        if self.m.len() != n || self.beta.len() != n {
            return Err(Error::InvalidArgument(format!(
                "m and beta must have length {n}"
            )));
        }
        if self
            .m
            .iter()
            .chain(&self.beta)
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(Error::InvalidArgument(
                "m and beta entries must be >= 0".into(),
            ));
        }
        square("eta", &self.eta)?;
        square("psi", &self.psi)?;
        if !(self.alpha0 > 0.0 && self.alpha0 <= self.alpha1 && self.alpha1.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < alpha0 <= alpha1, got alpha0 = {}, alpha1 = {}",
                self.alpha0, self.alpha1
            )));
        }
        if !(self.w > 0.0) {
            return Err(Error::CertificationFailure(format!(
                "delay-free stability margin w <= 0 (w = {}): delay-free system not certified asymptotically stable by this V",
                self.w
            )));
        }
        Ok(())
    }
}
