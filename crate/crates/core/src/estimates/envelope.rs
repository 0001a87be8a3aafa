use serde::{Deserialize, Serialize};

use super::comparison::{connection_constants, ComparisonSolution, Connection};
use super::radius::{attraction_radius_classical, attraction_radius_razumikhin};
use crate::error::{Error, Result};
use crate::functional::{FunctionalCertificate, Variant};
use crate::homcore::HomogeneousStructure;
use crate::sim::Envelope;

/// Relative tolerance of the `c_hat1 = delta / radius` identity.
pub const IDENTITY_RTOL: f64 = 1e-10;

/// `alpha1 + b3 R^mu`.
fn start_coefficient(cert: &FunctionalCertificate, radius: f64) -> f64 {
    cert.constants.alpha1 + cert.upper.b3 * radius.powf(cert.structure.mu())
}

fn envelope_for(
    cert: &FunctionalCertificate,
    radius: f64,
    lower: f64,
    rho: f64,
) -> Result<Envelope> {
    let s = &cert.structure;
    let (gamma, mu) = (s.gamma(), s.mu());
    let a = start_coefficient(cert, radius);
    let c_hat1 = (a / lower).powf(1.0 / gamma);
    let ratio = cert.delta / radius;
    if !((c_hat1 - ratio).abs() <= IDENTITY_RTOL * ratio) {
        return Err(Error::InternalInconsistency(format!(
            "c_hat1 = {c_hat1:e} differs from delta / radius = {ratio:e}"
        )));
    }
    Ok(Envelope {
        c_hat1,
        c_hat2: rho * (mu / gamma) * a.powf(mu / gamma),
        mu,
    })
}

/// Envelope on the whole attraction region, decaying at rate `rho2`.
pub fn envelope_classical(cert: &FunctionalCertificate) -> Result<Envelope> {
    let radius = attraction_radius_classical(cert)?;
    let conn = connection_constants(cert)?;
    envelope_for(cert, radius, cert.lower.a1, conn.rho2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition22 {
    pub satisfied: bool,
    /// `alpha^mu` minus the left side.
    pub margin: f64,
    pub lhs: f64,
}

/// `1 + rho h (mu/gamma) (alpha1 + b3 R^mu)^(mu/gamma) R^mu <= alpha^mu`.
pub fn condition22_check(
    rho: f64,
    alpha: f64,
    radius: f64,
    alpha1: f64,
    b3: f64,
    s: &HomogeneousStructure,
    h: f64,
) -> Condition22 {
    let (gamma, mu) = (s.gamma(), s.mu());
    let lhs = 1.0
        + rho
            * h
            * (mu / gamma)
            * (alpha1 + b3 * radius.powf(mu)).powf(mu / gamma)
            * radius.powf(mu);
    let margin = alpha.powf(mu) - lhs;
    Condition22 {
        satisfied: margin >= 0.0,
        margin,
        lhs,
    }
}

/// Envelope on the `S_alpha`-based region with comparison rate `rho <= rho2`.
pub fn envelope_razumikhin(
    cert: &FunctionalCertificate,
    rho: f64,
) -> Result<(Envelope, Condition22)> {
    let sb = cert
        .set_bound
        .ok_or_else(|| Error::InvalidArgument("certificate has no S_alpha bound".into()))?;
    let radius = attraction_radius_razumikhin(cert)?;
    let conn = connection_constants(cert)?;
    if !(rho > 0.0 && rho <= conn.rho2) {
        return Err(Error::Infeasible(format!(
            "rho = {rho:e} outside (0, rho2 = {:e}]",
            conn.rho2
        )));
    }
    let cond = condition22_check(
        rho,
        sb.alpha,
        radius,
        cert.constants.alpha1,
        cert.upper.b3,
        &cert.structure,
        cert.h,
    );
    if !cond.satisfied {
        return Err(Error::Infeasible(format!(
            "condition on (rho, alpha) violated: margin {:e}",
            cond.margin
        )));
    }
    Ok((envelope_for(cert, radius, sb.a1_tilde, rho)?, cond))
}

/// Attraction radius, decay envelope and every constant behind them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateCertificate {
    pub variant: Variant,
    pub functional: FunctionalCertificate,
    /// Attraction radius in the hom-sup norm.
    pub radius: f64,
    pub connection: Connection,
    /// Comparison rate used by the envelope.
    pub rho: f64,
    pub alpha: Option<f64>,
    pub condition22: Option<Condition22>,
    pub envelope: Envelope,
}

impl EstimateCertificate {
    pub fn classical(functional: FunctionalCertificate) -> Result<Self> {
        if functional.variant != Variant::Classical {
            return Err(Error::InvalidArgument(
                "expected a classical functional certificate".into(),
            ));
        }
        functional.ensure_feasible()?;
        let radius = attraction_radius_classical(&functional)?;
        let connection = connection_constants(&functional)?;
        let envelope = envelope_classical(&functional)?;
        Ok(Self {
            variant: Variant::Classical,
            radius,
            connection,
            rho: connection.rho2,
            alpha: None,
            condition22: None,
            envelope,
            functional,
        })
    }

    pub fn razumikhin(functional: FunctionalCertificate, rho: f64) -> Result<Self> {
        if functional.variant != Variant::Razumikhin {
            return Err(Error::InvalidArgument(
                "expected a Razumikhin functional certificate".into(),
            ));
        }
        functional.ensure_feasible()?;
        let radius = attraction_radius_razumikhin(&functional)?;
        let connection = connection_constants(&functional)?;
        let (envelope, cond) = envelope_razumikhin(&functional, rho)?;
        Ok(Self {
            variant: Variant::Razumikhin,
            radius,
            connection,
            rho,
            alpha: functional.set_bound.map(|sb| sb.alpha),
            condition22: Some(cond),
            envelope,
            functional,
        })
    }

    pub fn delta(&self) -> f64 {
        self.functional.delta
    }

    /// Initial function norm strictly inside the attraction radius.
    pub fn admits(&self, phi_norm: f64) -> bool {
        phi_norm < self.radius
    }

    /// `(alpha1 + b3 R^mu) |phi|_H^gamma`.
    pub fn u0(&self, phi_norm: f64) -> f64 {
        start_coefficient(&self.functional, self.radius)
            * phi_norm.powf(self.functional.structure.gamma())
    }

    pub fn comparison(&self, phi_norm: f64) -> Result<ComparisonSolution> {
        ComparisonSolution::new(self.u0(phi_norm), self.rho, &self.functional.structure)
    }

    pub fn envelope_at(&self, t: f64, phi_norm: f64) -> f64 {
        self.envelope.eval(t, phi_norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example::{build_example, GeneticNetworkParams};
    use crate::functional::WeightSplit;
    use approx::assert_relative_eq;

    fn functional(variant: Variant) -> FunctionalCertificate {
        let params = GeneticNetworkParams::REFERENCE;
        let (model, bc) = build_example(&params).unwrap();
        let split = WeightSplit::balanced(bc.w, params.h).unwrap();
        match variant {
            Variant::Classical => {
                FunctionalCertificate::classical(&bc, &model.structure, params.h, split)
            }
            Variant::Razumikhin => {
                FunctionalCertificate::razumikhin(&bc, &model.structure, params.h, split, 1.001)
            }
        }
        .unwrap()
    }

    #[test]
    fn classical_identity_and_start() {
        let est = EstimateCertificate::classical(functional(Variant::Classical)).unwrap();
        assert_relative_eq!(
            est.envelope.c_hat1,
            est.delta() / est.radius,
            max_relative = 1e-10
        );
        assert!(est.envelope.c_hat1 >= 1.0);
        assert!(est.radius <= est.delta());
    }

    #[test]
    fn envelope_halves() {
        let env = Envelope {
            c_hat1: 2.0,
            c_hat2: 0.5,
            mu: 1.0,
        };
        // 1 + c2 |phi|^mu t = 2^mu at t = 2 for |phi| = 1.
        assert_relative_eq!(
            env.eval(2.0, 1.0),
            0.5 * env.eval(0.0, 1.0),
            max_relative = 1e-15
        );
    }

    #[test]
    fn printed_rate_form_at_rho2() {
        let f = functional(Variant::Razumikhin);
        let conn = connection_constants(&f).unwrap();
        let (env, _) = envelope_razumikhin(&f, conn.rho2).unwrap();
        let s = &f.structure;
        let (gamma, mu) = (s.gamma(), s.mu());
        let radius = attraction_radius_razumikhin(&f).unwrap();
        let a = f.constants.alpha1 + f.upper.b3 * radius.powf(mu);
        let printed =
            conn.c / conn.b * (mu / gamma) * (a / (2.0 * conn.b * f.h.max(1.0))).powf(mu / gamma);
        assert_relative_eq!(env.c_hat2, printed, max_relative = 1e-12);
        let (half, _) = envelope_razumikhin(&f, 0.5 * conn.rho2).unwrap();
        assert_relative_eq!(half.c_hat2, 0.5 * env.c_hat2, max_relative = 1e-15);
    }

    #[test]
    fn condition_limits() {
        let s = HomogeneousStructure::new(vec![1.0, 2.0], 5.0, 1.0, 4.0).unwrap();
        let c = condition22_check(1e-300, 1.001, 1e-4, 1.1, 14770.0, &s, 10.0);
        assert!(c.satisfied);
        assert_relative_eq!(c.margin, 0.001, max_relative = 1e-9);
        let c = condition22_check(1.0, 1.001, 1e-4, 1.1, 14770.0, &s, 0.0);
        assert!(c.satisfied);
        let lo = condition22_check(0.1, 1.1, 1e-2, 1.1, 14770.0, &s, 10.0);
        let hi = condition22_check(0.2, 1.1, 1e-2, 1.1, 14770.0, &s, 10.0);
        assert!(hi.lhs > lo.lhs);
    }

    #[test]
    fn rho_above_rho2_is_rejected() {
        let f = functional(Variant::Razumikhin);
        let conn = connection_constants(&f).unwrap();
        assert!(matches!(
            envelope_razumikhin(&f, 1.01 * conn.rho2),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn razumikhin_envelope_tighter_on_example() {
        let cl = EstimateCertificate::classical(functional(Variant::Classical)).unwrap();
        let f = functional(Variant::Razumikhin);
        let rho = connection_constants(&f).unwrap().rho2;
        let rz = EstimateCertificate::razumikhin(f, rho).unwrap();
        assert!(rz.radius > cl.radius);
        let phi = 7.07e-6;
        for k in 0..=100 {
            let t = 10.0 * k as f64;
            assert!(rz.envelope_at(t, phi) <= cl.envelope_at(t, phi));
        }
    }
}
