//! Genetic-network system
//!
//! ```text
//! x1' = -k1 x1^2     + l1 x2(t - h)
//! x2' = -k2 x2^(3/2) + l2 x2 x1(t - h)
//! ```
//!
//! homogeneous of degree 1 for weights (1, 2), with `V = x1^4 + x2^2`
//! (degree 4) and `p = 5`. Lives in the nonnegative orthant.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::HistoryFunction;
use crate::homcore::{BoundConstants, HomogeneousStructure, Provenance, ProvenanceTable};
use crate::model::{Domain, LyapunovFunction, SystemModel, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneticNetworkParams {
    pub kappa1: f64,
    pub kappa2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub h: f64,
}

impl GeneticNetworkParams {
    pub const REFERENCE: Self = Self {
        kappa1: 9.0,
        kappa2: 18.0,
        lambda1: 0.25,
        lambda2: 0.5,
        h: 10.0,
    };

    pub fn validate(&self) -> Result<()> {
        let all = [self.kappa1, self.kappa2, self.lambda1, self.lambda2, self.h];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "all parameters must be positive, got {self:?}"
            )));
        }
        Ok(())
    }

    /// `2 min{2 k1, k2} - 4 max{2 l1, l2}`.
    pub fn stability_margin(&self) -> f64 {
        2.0 * (2.0 * self.kappa1).min(self.kappa2) - 4.0 * (2.0 * self.lambda1).max(self.lambda2)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GeneticNetworkField {
    pub params: GeneticNetworkParams,
}

impl VectorField for GeneticNetworkField {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let p = &self.params;
        let x2 = x[1].max(0.0);
        out[0] = -p.kappa1 * x[0] * x[0] + p.lambda1 * y[1];
        out[1] = -p.kappa2 * x2 * x2.sqrt() + p.lambda2 * x[1] * y[0];
    }

    fn jacobian_x(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let p = &self.params;
        out[0] = -2.0 * p.kappa1 * x[0];
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = -1.5 * p.kappa2 * x[1].max(0.0).sqrt() + p.lambda2 * y[0];
    }
}

/// `V(x) = x1^4 + x2^2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuarticLyapunov;

impl LyapunovFunction for QuarticLyapunov {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &[f64]) -> f64 {
        x[0].powi(4) + x[1] * x[1]
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out[0] = 4.0 * x[0].powi(3);
        out[1] = 2.0 * x[1];
    }

    fn hessian(&self, x: &[f64], out: &mut [f64]) {
        out[0] = 12.0 * x[0] * x[0];
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = 2.0;
    }
}

pub fn example_structure() -> HomogeneousStructure {
    HomogeneousStructure::new(vec![1.0, 2.0], 5.0, 1.0, 4.0).expect("valid example structure")
}

/// Closed-form constants for the genetic-network system.
pub fn analytic_constants(params: &GeneticNetworkParams) -> BoundConstants {
    let p = params;
    BoundConstants {
        m: vec![p.kappa1.max(p.lambda1), p.kappa2 + p.lambda2],
        eta: vec![
            vec![2.0 * p.kappa1, 0.0],
            vec![0.0, (1.5 * p.kappa2).max(p.lambda2)],
        ],
        beta: vec![4.0, 2.0],
        psi: vec![vec![12.0, 0.0], vec![0.0, 2.0]],
        alpha0: 1.0,
        alpha1: 2f64.powf(0.2),
        w: p.stability_margin(),
        provenance: ProvenanceTable::all(Provenance::Analytic),
    }
}

pub fn build_model(params: &GeneticNetworkParams) -> Result<SystemModel> {
    params.validate()?;
    SystemModel::new(
        example_structure(),
        params.h,
        Arc::new(GeneticNetworkField { params: *params }),
        Arc::new(QuarticLyapunov),
        Domain::NonnegativeOrthant,
    )
}

/// The model together with its analytic constants. Fails when `w <= 0`.
pub fn build_example(params: &GeneticNetworkParams) -> Result<(SystemModel, BoundConstants)> {
    let model = build_model(params)?;
    let constants = analytic_constants(params);
    constants.validate(2)?;
    Ok((model, constants))
}

/// Reference run: parameters (9, 18, 0.25, 0.5), h = 10, constant initial
/// function (5e-11, 5e-11), horizon 100 h.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: GeneticNetworkParams,
    pub history: HistoryFunction,
    pub horizon: f64,
}

pub fn reference_scenario() -> Scenario {
    let params = GeneticNetworkParams::REFERENCE;
    Scenario {
        params,
        history: HistoryFunction::constant(params.h, vec![5e-11, 5e-11]).expect("valid history"),
        horizon: 100.0 * params.h,
    }
}
