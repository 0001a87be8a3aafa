//! Constants of the lower, derivative and upper bounds of the functional.

use serde::{Deserialize, Serialize};

use super::evaluate::WeightSplit;
use crate::error::{Error, Result};
use crate::homcore::{BoundConstants, HomogeneousStructure};
use crate::roots::bisect_increasing;

/// Share of `w1` left to `a2` when `chi` is chosen: `a2 = CHI_MARGIN * w1`.
pub const CHI_MARGIN: f64 = 0.01;

/// `delta` is placed at this fraction of the binding upper limit.
pub const DELTA_FRACTION: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub chi: f64,
    pub a1: f64,
    pub a2: f64,
    pub h1: f64,
}

impl LowerBound {
    pub fn feasible(&self, delta: f64) -> bool {
        self.a2 > 0.0 && self.a1 > 0.0 && delta < self.h1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeBound {
    pub l: f64,
    pub s: Vec<Vec<f64>>,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Limit evaluated with `L` taken at the candidate `delta`.
    pub h2: f64,
}

impl DerivativeBound {
    pub fn feasible(&self, delta: f64) -> bool {
        self.c0 > 0.0 && self.c1 > 0.0 && self.c2 > 0.0 && delta < self.h2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

/// Lower bound on the Razumikhin-type set `S_alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetBound {
    pub alpha: f64,
    pub a1_tilde: f64,
    pub h3: f64,
}

impl SetBound {
    pub fn feasible(&self, delta: f64) -> bool {
        self.a1_tilde > 0.0 && delta < self.h3
    }
}

/// `(x)^(1/mu)` with `+inf` for unbounded limits.
fn limit(x: f64, mu: f64) -> f64 {
    if x.is_infinite() {
        f64::INFINITY
    } else {
        x.powf(1.0 / mu)
    }
}

/// `sum beta_i m_i (1 + chi^(-2(mu + r_i)))`.
fn chi_sum(bc: &BoundConstants, s: &HomogeneousStructure, chi: f64) -> f64 {
    (0..s.dim())
        .map(|i| bc.beta[i] * bc.m[i] * (1.0 + chi.powf(-2.0 * (s.mu() + s.weight(i)))))
        .sum()
}

/// `sum beta_i m_i chi^(2(gamma - r_i))`.
fn chi_penalty(bc: &BoundConstants, s: &HomogeneousStructure, chi: f64) -> f64 {
    (0..s.dim())
        .map(|i| bc.beta[i] * bc.m[i] * chi.powf(2.0 * (s.gamma() - s.weight(i))))
        .sum()
}

pub fn lower_bound_constants(
    bc: &BoundConstants,
    s: &HomogeneousStructure,
    h: f64,
    split: &WeightSplit,
    chi: f64,
    delta: f64,
) -> Result<LowerBound> {
    if !(chi > 0.0 && delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need chi > 0 and delta > 0, got {chi}, {delta}"
        )));
    }
    let sum = chi_sum(bc, s, chi);
    Ok(LowerBound {
        chi,
        a1: bc.alpha0 - h * sum * delta.powf(s.mu()),
        a2: split.w1 - chi_penalty(bc, s, chi),
        h1: limit(bc.alpha0 / (h * sum), s.mu()),
    })
}

/// `chi` with `sum beta_i m_i chi^(2(gamma - r_i)) = (1 - CHI_MARGIN) w1`.
///
/// `H1` increases with `chi` while `a2` decreases, so the largest `chi`
/// keeping `a2` at a fixed positive margin maximizes `H1`.
pub fn choose_chi(bc: &BoundConstants, s: &HomogeneousStructure, split: &WeightSplit) -> f64 {
    let target = (1.0 - CHI_MARGIN) * split.w1;
    if bc.sum_beta_m() == 0.0 {
        return 1.0;
    }
    let g = |chi: f64| chi_penalty(bc, s, chi) - target;
    let mut hi = 1.0;
    while g(hi) <= 0.0 && hi < 1e150 {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while g(lo) > 0.0 && lo > 1e-150 {
        lo /= 2.0;
    }
    bisect_increasing(g, lo, hi)
}

fn coupling(bc: &BoundConstants, s: &HomogeneousStructure, delta: f64) -> (f64, Vec<Vec<f64>>) {
    let n = s.dim();
    let mut l = 0.0;
    let mut sm = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if !s.in_first_partition(i, j) {
                sm[i][j] = delta.powf(-s.jacobian_degree(i, j));
            }
            l += bc.m[j] * (bc.beta[i] * bc.eta[i][j] * sm[i][j] + bc.m[i] * bc.psi[i][j]);
        }
    }
    (l, sm)
}

fn h2_of(l: f64, split: &WeightSplit, h: f64, mu: f64) -> f64 {
    if l == 0.0 {
        return f64::INFINITY;
    }
    let m = (split.w0 / (4.0 * h * l))
        .min(split.w1 / (2.0 * h * l))
        .min(split.w2 / (2.0 * l));
    limit(m, mu)
}

pub fn derivative_bound_constants(
    bc: &BoundConstants,
    s: &HomogeneousStructure,
    h: f64,
    split: &WeightSplit,
    delta: f64,
) -> Result<DerivativeBound> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need delta > 0, got {delta}"
        )));
    }
    let (l, sm) = coupling(bc, s, delta);
    let dm = delta.powf(s.mu());
    Ok(DerivativeBound {
        l,
        s: sm,
        c0: split.w0 - 4.0 * h * l * dm,
        c1: split.w1 - 2.0 * h * l * dm,
        c2: split.w2 - 2.0 * l * dm,
        h2: h2_of(l, split, h, s.mu()),
    })
}

/// Supremum of the `delta` with `delta < H2(L(delta))`.
///
/// `L` depends on `delta` only through the pairs with `mu + r_i - r_j < 0`,
/// where it grows with `delta`; without such pairs this is `H2` itself.
pub fn h2_cap(bc: &BoundConstants, s: &HomogeneousStructure, h: f64, split: &WeightSplit) -> f64 {
    let at = |d: f64| h2_of(coupling(bc, s, d).0, split, h, s.mu());
    let n = s.dim();
    let any_second = (0..n).any(|i| (0..n).any(|j| !s.in_first_partition(i, j)));
    if !any_second {
        return at(1.0);
    }
    let g = |d: f64| d - at(d);
    let mut hi = at(0.0);
    if !hi.is_finite() {
        hi = 1.0;
        while g(hi) <= 0.0 && hi < 1e150 {
            hi *= 2.0;
        }
    }
    bisect_increasing(g, 0.0, hi)
}

pub fn upper_bound_constants(
    bc: &BoundConstants,
    s: &HomogeneousStructure,
    split: &WeightSplit,
    delta: f64,
    h: f64,
) -> Result<UpperBound> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need delta > 0, got {delta}"
        )));
    }
    let sum = bc.sum_beta_m();
    let dm = delta.powf(s.mu());
    Ok(UpperBound {
        b1: bc.alpha1 + 2.0 * h * sum * dm,
        b2: (split.w1 + h * split.w2 + sum) * dm,
        b3: (split.w1 + h * split.w2 + 2.0 * h * sum) * h,
    })
}

pub fn set_lower_bound(
    bc: &BoundConstants,
    s: &HomogeneousStructure,
    alpha: f64,
    delta: f64,
    h: f64,
) -> Result<SetBound> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be > 1, got {alpha}"
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need delta > 0, got {delta}"
        )));
    }
    let sum: f64 = (0..s.dim())
        .map(|i| (1.0 + alpha.powf(s.mu() + s.weight(i))) * bc.m[i] * bc.beta[i])
        .sum();
    Ok(SetBound {
        alpha,
        a1_tilde: bc.alpha0 - h * sum * delta.powf(s.mu()),
        h3: limit(bc.alpha0 / (h * sum), s.mu()),
    })
}
