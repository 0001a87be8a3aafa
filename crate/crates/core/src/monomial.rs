//! Signed-monomial vector fields and Lyapunov functions.
//!
//! Each component is a sum of `c * prod x_k^a_k * prod y_k^b_k`. Derivatives
//! are mechanical and homogeneity reduces to checking the weighted degree of
//! every term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homcore::HomogeneousStructure;
use crate::model::{Domain, LyapunovFunction, VectorField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldTerm {
    pub coef: f64,
    /// Exponents of the current state.
    pub x: Vec<f64>,
    /// Exponents of the delayed state.
    #[serde(default)]
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarTerm {
    pub coef: f64,
    pub x: Vec<f64>,
}

fn power(base: f64, exp: f64, orthant: bool) -> f64 {
    if exp == 0.0 {
        1.0
    } else if exp.fract() == 0.0 && exp.abs() < i32::MAX as f64 {
        base.powi(exp as i32)
    } else if orthant {
        base.max(0.0).powf(exp)
    } else {
        base.abs().powf(exp)
    }
}

fn weighted_degree(exps: &[f64], s: &HomogeneousStructure) -> f64 {
    exps.iter().zip(s.weights()).map(|(a, r)| a * r).sum()
}

fn check_exponents(exps: &[f64], n: usize, domain: Domain, what: &str) -> Result<()> {
    if exps.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{what}: expected {n} exponents, got {}",
            exps.len()
        )));
    }
    if exps.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "{what}: exponents must be finite and >= 0"
        )));
    }
    if !domain.is_orthant() && exps.iter().any(|a| a.fract() != 0.0) {
        return Err(Error::InvalidArgument(format!(
            "{what}: fractional exponents need the nonnegative-orthant domain"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialField {
    pub components: Vec<Vec<FieldTerm>>,
    pub domain: Domain,
}

impl MonomialField {
    /// Validates shapes and that component `i` has weighted degree `mu + r_i`.
    pub fn new(
        mut components: Vec<Vec<FieldTerm>>,
        s: &HomogeneousStructure,
        domain: Domain,
    ) -> Result<Self> {
        let n = s.dim();
        if components.len() != n {
            return Err(Error::InvalidArgument(format!(
                "vector field has {} components, structure has {n}",
                components.len()
            )));
        }
        for (i, terms) in components.iter_mut().enumerate() {
            for (k, t) in terms.iter_mut().enumerate() {
                if t.y.is_empty() {
                    t.y = vec![0.0; n];
                }
                let what = format!("f[{i}] term {k}");
                check_exponents(&t.x, n, domain, &what)?;
                check_exponents(&t.y, n, domain, &what)?;
                let deg = weighted_degree(&t.x, s) + weighted_degree(&t.y, s);
                let want = s.mu() + s.weight(i);
                if (deg - want).abs() > 1e-12 * want.max(1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "{what} has weighted degree {deg}, expected mu + r_{i} = {want}"
                    )));
                }
            }
        }
        Ok(Self { components, domain })
    }

    fn term_value(&self, t: &FieldTerm, x: &[f64], y: &[f64]) -> f64 {
        let o = self.domain.is_orthant();
        let px: f64 = x.iter().zip(&t.x).map(|(b, a)| power(*b, *a, o)).product();
        let py: f64 = y.iter().zip(&t.y).map(|(b, a)| power(*b, *a, o)).product();
        t.coef * px * py
    }
}

impl VectorField for MonomialField {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn eval(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        for (o, terms) in out.iter_mut().zip(&self.components) {
            *o = terms.iter().map(|t| self.term_value(t, x, y)).sum();
        }
    }

    fn jacobian_x(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let n = self.dim();
        let o = self.domain.is_orthant();
        for (i, terms) in self.components.iter().enumerate() {
            for j in 0..n {
                out[i * n + j] = terms
                    .iter()
                    .filter(|t| t.x[j] != 0.0)
                    .map(|t| {
                        let py: f64 = y.iter().zip(&t.y).map(|(b, a)| power(*b, *a, o)).product();
                        let px: f64 = (0..n)
                            .map(|k| {
                                if k == j {
                                    t.x[k] * power(x[k], t.x[k] - 1.0, o)
                                } else {
                                    power(x[k], t.x[k], o)
                                }
                            })
                            .product();
                        t.coef * px * py
                    })
                    .sum();
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialFunction {
    pub terms: Vec<ScalarTerm>,
    pub n: usize,
    pub domain: Domain,
}

impl MonomialFunction {
    /// Validates that every term has weighted degree `gamma`.
    pub fn new(terms: Vec<ScalarTerm>, s: &HomogeneousStructure, domain: Domain) -> Result<Self> {
        let n = s.dim();
        if terms.is_empty() {
            return Err(Error::InvalidArgument(
                "Lyapunov function has no terms".into(),
            ));
        }
        for (k, t) in terms.iter().enumerate() {
            let what = format!("V term {k}");
            check_exponents(&t.x, n, domain, &what)?;
            let deg = weighted_degree(&t.x, s);
            if (deg - s.gamma()).abs() > 1e-12 * s.gamma().max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "{what} has weighted degree {deg}, expected gamma = {}",
                    s.gamma()
                )));
            }
        }
        Ok(Self { terms, n, domain })
    }

    fn partial(&self, t: &ScalarTerm, x: &[f64], d: &[usize]) -> f64 {
        let o = self.domain.is_orthant();
        let mut coef = t.coef;
        let mut exps = t.x.clone();
        for &j in d {
            coef *= exps[j];
            exps[j] -= 1.0;
            if coef == 0.0 {
                return 0.0;
            }
        }
        coef * x
            .iter()
            .zip(&exps)
            .map(|(b, a)| power(*b, *a, o))
            .product::<f64>()
    }
}

impl LyapunovFunction for MonomialFunction {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| self.partial(t, x, &[])).sum()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.terms.iter().map(|t| self.partial(t, x, &[j])).sum();
        }
    }

    fn hessian(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.terms.iter().map(|t| self.partial(t, x, &[i, j])).sum();
            }
        }
    }
}
