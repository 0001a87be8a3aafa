use serde::{Deserialize, Serialize};

use super::bounds::{
    choose_chi, derivative_bound_constants, h2_cap, lower_bound_constants, set_lower_bound,
    upper_bound_constants, DerivativeBound, LowerBound, SetBound, UpperBound, DELTA_FRACTION,
};
use super::evaluate::WeightSplit;
use crate::error::{Error, Result};
use crate::homcore::{BoundConstants, HomogeneousStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Lower bound valid on the whole `delta`-ball.
    Classical,
    /// Lower bound valid on the set `S_alpha` only.
    Razumikhin,
}

/// Every constant of the functional bounds at one choice of split and `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalCertificate {
    pub variant: Variant,
    pub structure: HomogeneousStructure,
    pub constants: BoundConstants,
    pub h: f64,
    pub split: WeightSplit,
    pub delta: f64,
    pub lower: LowerBound,
    pub derivative: DerivativeBound,
    pub upper: UpperBound,
    /// Present for the Razumikhin variant.
    pub set_bound: Option<SetBound>,
}

fn check_inputs(bc: &BoundConstants, s: &HomogeneousStructure, h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "delay must be positive, got {h}"
        )));
    }
    bc.validate(s.dim())
}

fn finite_delta(limit: f64) -> Result<f64> {
    if !limit.is_finite() {
        return Err(Error::Infeasible(
            "no finite upper limit for delta (all couplings vanish)".into(),
        ));
    }
    Ok(DELTA_FRACTION * limit)
}

impl FunctionalCertificate {
    /// `delta = 0.99 min{H1, H2}` with `chi` from [`choose_chi`].
    pub fn classical(
        bc: &BoundConstants,
        s: &HomogeneousStructure,
        h: f64,
        split: WeightSplit,
    ) -> Result<Self> {
        check_inputs(bc, s, h)?;
        let chi = choose_chi(bc, s, &split);
        let h1 = lower_bound_constants(bc, s, h, &split, chi, 1.0)?.h1;
        let delta = finite_delta(h1.min(h2_cap(bc, s, h, &split)))?;
        Self::at_delta(Variant::Classical, bc, s, h, split, chi, delta, None)
    }

    /// `delta = 0.99 min{H2, H3}` for the given `alpha`.
    pub fn razumikhin(
        bc: &BoundConstants,
        s: &HomogeneousStructure,
        h: f64,
        split: WeightSplit,
        alpha: f64,
    ) -> Result<Self> {
        check_inputs(bc, s, h)?;
        let chi = choose_chi(bc, s, &split);
        let h3 = set_lower_bound(bc, s, alpha, 1.0, h)?.h3;
        let delta = finite_delta(h3.min(h2_cap(bc, s, h, &split)))?;
        Self::at_delta(
            Variant::Razumikhin,
            bc,
            s,
            h,
            split,
            chi,
            delta,
            Some(alpha),
        )
    }

    /// Evaluates all constants at an explicit `delta`; feasibility is not enforced.
    #[allow(clippy::too_many_arguments)]
    pub fn at_delta(
        variant: Variant,
        bc: &BoundConstants,
        s: &HomogeneousStructure,
        h: f64,
        split: WeightSplit,
        chi: f64,
        delta: f64,
        alpha: Option<f64>,
    ) -> Result<Self> {
        let set_bound = match (variant, alpha) {
            (Variant::Razumikhin, Some(a)) => Some(set_lower_bound(bc, s, a, delta, h)?),
            (Variant::Razumikhin, None) => {
                return Err(Error::InvalidArgument(
                    "Razumikhin variant needs alpha".into(),
                ))
            }
            (Variant::Classical, _) => None,
        };
        Ok(Self {
            variant,
            structure: s.clone(),
            constants: bc.clone(),
            h,
            split,
            delta,
            lower: lower_bound_constants(bc, s, h, &split, chi, delta)?,
            derivative: derivative_bound_constants(bc, s, h, &split, delta)?,
            upper: upper_bound_constants(bc, s, &split, delta, h)?,
            set_bound,
        })
    }

    /// Names the first violated constraint, if any.
    pub fn first_violation(&self) -> Option<String> {
        let d = self.delta;
        let sp = &self.split;
        if !(sp.w0 > 0.0 && sp.w1 > 0.0 && sp.w2 > 0.0) {
            return Some(format!("weight split not positive ({sp:?})"));
        }
        let db = &self.derivative;
        if !(d < db.h2) {
            return Some(format!("delta = {d:e} >= H2 = {:e}", db.h2));
        }
        for (name, c) in [("c0", db.c0), ("c1", db.c1), ("c2", db.c2)] {
            if !(c > 0.0) {
                return Some(format!("{name} = {c:e} <= 0"));
            }
        }
        match self.variant {
            Variant::Classical => {
                let lb = &self.lower;
                if !(lb.a2 > 0.0) {
                    return Some(format!("a2 = {:e} <= 0", lb.a2));
                }
                if !(d < lb.h1) {
                    return Some(format!("delta = {d:e} >= H1 = {:e}", lb.h1));
                }
                if !(lb.a1 > 0.0) {
                    return Some(format!("a1 = {:e} <= 0", lb.a1));
                }
            }
            Variant::Razumikhin => {
                let Some(sb) = &self.set_bound else {
                    return Some("missing S_alpha bound".into());
                };
                if !(d < sb.h3) {
                    return Some(format!("delta = {d:e} >= H3 = {:e}", sb.h3));
                }
                if !(sb.a1_tilde > 0.0) {
                    return Some(format!("a1_tilde = {:e} <= 0", sb.a1_tilde));
                }
            }
        }
        None
    }

    pub fn ensure_feasible(&self) -> Result<()> {
        match self.first_violation() {
            None => Ok(()),
            Some(msg) => Err(Error::Infeasible(msg)),
        }
    }

    /// Coefficient of `|phi(0)|^gamma` in the lower bound this variant relies on.
    pub fn lower_coefficient(&self) -> f64 {
        match (&self.variant, &self.set_bound) {
            (Variant::Razumikhin, Some(sb)) => sb.a1_tilde,
            _ => self.lower.a1,
        }
    }
}
