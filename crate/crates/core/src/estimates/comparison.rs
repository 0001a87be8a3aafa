use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::FunctionalCertificate;
use crate::homcore::HomogeneousStructure;

/// Constants linking the derivative bound to the comparison equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    /// `min{c0, c2}`.
    pub c: f64,
    /// `max{b1, b2}`.
    pub b: f64,
    pub rho1: f64,
    /// Largest admissible decay rate of the comparison equation.
    pub rho2: f64,
}

pub fn connection_from(
    c0: f64,
    c2: f64,
    b1: f64,
    b2: f64,
    s: &HomogeneousStructure,
    h: f64,
) -> Result<Connection> {
    if !(c0 > 0.0 && c2 > 0.0 && b1 > 0.0 && b2 > 0.0) {
        return Err(Error::Infeasible(format!(
            "connection constants need c0, c2, b1, b2 > 0 (c0 = {c0:e}, c2 = {c2:e}, b1 = {b1:e}, b2 = {b2:e})"
        )));
    }
    let (gamma, mu) = (s.gamma(), s.mu());
    let c = c0.min(c2);
    let b = b1.max(b2);
    let rho1 = (2.0 * h.max(1.0)).powf(mu / gamma);
    let rho2 = c / (rho1 * b.powf((gamma + mu) / gamma));
    Ok(Connection { c, b, rho1, rho2 })
}

pub fn connection_constants(cert: &FunctionalCertificate) -> Result<Connection> {
    let (d, u) = (&cert.derivative, &cert.upper);
    connection_from(d.c0, d.c2, u.b1, u.b2, &cert.structure, cert.h)
}

/// `u' = -rate u^((gamma+mu)/gamma)`, `u(0) = u0`, in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSolution {
    pub u0: f64,
    pub rate: f64,
    /// `mu / gamma`.
    pub ratio: f64,
}

impl ComparisonSolution {
    pub fn new(u0: f64, rate: f64, s: &HomogeneousStructure) -> Result<Self> {
        if !(u0 >= 0.0 && rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "comparison solution needs u0 >= 0 and rate > 0 (u0 = {u0:e}, rate = {rate:e})"
            )));
        }
        Ok(Self {
            u0,
            rate,
            ratio: s.mu() / s.gamma(),
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.u0 == 0.0 {
            return 0.0;
        }
        self.u0
            * (1.0 + self.rate * self.ratio * self.u0.powf(self.ratio) * t).powf(-1.0 / self.ratio)
    }

    /// Right side of the comparison equation at `u`.
    pub fn rhs(&self, u: f64) -> f64 {
        -self.rate * u.max(0.0).powf(1.0 + self.ratio)
    }
}

pub fn comparison_solution(u0: f64, rate: f64, s: &HomogeneousStructure, t: f64) -> Result<f64> {
    Ok(ComparisonSolution::new(u0, rate, s)?.eval(t))
}
