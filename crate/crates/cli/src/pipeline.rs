//! constants -> certificates -> simulation -> checks.

use std::sync::Arc;

use delaycert_core::check::BoundCheck;
use delaycert_core::estimates::{
    check_comparison_bounds, search_alpha_rho, CandidateDiagnostic, ComparisonReport,
    EstimateCertificate,
};
use delaycert_core::example::{analytic_constants, build_example};
use delaycert_core::functional::{
    check_functional_series, functional_series, FunctionalBoundReport, FunctionalCertificate,
    FunctionalParts, Variant, WeightSplit,
};
use delaycert_core::history::HistoryFunction;
use delaycert_core::homcore::{
    check_homogeneity, estimate_all, estimate_eta, estimate_m, estimate_v_constants,
    BoundConstants, HomogeneousStructure, Provenance, ProvenanceTable, SamplingSpec,
};
use delaycert_core::model::SystemModel;
use delaycert_core::monomial::{MonomialField, MonomialFunction};
use delaycert_core::sim::{
    check_envelope, hom_norm_series, integrate, ContainmentReport, HomNormSeries, Trajectory,
};
use serde::{Deserialize, Serialize};

use crate::config::{
    ConstantOverrides, ConstantSource, PipelineKind, RunConfig, SystemConfig, SCHEMA_VERSION,
};
use crate::error::CliError;

/// Samples and tolerance of the homogeneity gate for user-defined systems.
const HOMOGENEITY_SAMPLES: usize = 1000;
const HOMOGENEITY_TOL: f64 = 1e-10;

/// Model, constants and initial function of a run.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub model: SystemModel,
    pub constants: BoundConstants,
    pub history: HistoryFunction,
    pub phi_norm: f64,
}

fn sampling(cfg: &RunConfig) -> SamplingSpec {
    SamplingSpec {
        samples: cfg.numerics.samples,
        seed: cfg.seed,
    }
}

fn monomial_model(cfg: &RunConfig) -> Result<(SystemModel, ConstantOverrides), CliError> {
    let SystemConfig::Monomial {
        h,
        weights,
        p,
        mu,
        gamma,
        domain,
        field,
        lyapunov,
        analytic,
    } = &cfg.system
    else {
        unreachable!("caller checked the system kind")
    };
    let config = |e: delaycert_core::Error| CliError::Config(format!("system: {e}"));
    let s = HomogeneousStructure::new(weights.clone(), *p, *mu, *gamma).map_err(config)?;
    let f = MonomialField::new(field.clone(), &s, *domain).map_err(config)?;
    let v = MonomialFunction::new(lyapunov.clone(), &s, *domain).map_err(config)?;
    let model = SystemModel::new(s, *h, Arc::new(f), Arc::new(v), *domain).map_err(config)?;
    let rep = check_homogeneity(&model, HOMOGENEITY_SAMPLES, HOMOGENEITY_TOL, cfg.seed);
    if !rep.passed {
        return Err(CliError::Config(format!(
            "system fails the homogeneity check (worst residual {:e})",
            rep.worst_relative_residual
        )));
    }
    Ok((model, analytic.clone()))
}

/// Supplied families first; the rest are sampled.
fn merge_constants(
    model: &SystemModel,
    over: &ConstantOverrides,
    spec: &SamplingSpec,
    safety: f64,
) -> Result<BoundConstants, CliError> {
    let sampled = Provenance::Sampled {
        samples: spec.samples,
        safety,
    };
    let mut prov = ProvenanceTable::all(Provenance::Analytic);
    let (m, eta) = (
        match &over.m {
            Some(m) => m.clone(),
            None => {
                prov.m = sampled;
                estimate_m(model, spec, safety)?.m
            }
        },
        match &over.eta {
            Some(e) => e.clone(),
            None => {
                prov.eta = sampled;
                estimate_eta(model, spec, safety)?.eta
            }
        },
    );
    let need_v = over.beta.is_none()
        || over.psi.is_none()
        || over.alpha0.is_none()
        || over.alpha1.is_none()
        || over.w.is_none();
    let v = if need_v {
        Some(estimate_v_constants(model, spec, safety)?.constants)
    } else {
        None
    };
    let pick = |given: &Option<f64>,
                slot: &mut Provenance,
                get: fn(&delaycert_core::homcore::VConstants) -> f64| {
        given.unwrap_or_else(|| {
            *slot = sampled;
            get(v.as_ref().expect("sampled when missing"))
        })
    };
    let alpha0 = pick(&over.alpha0, &mut prov.alpha0, |c| c.alpha0);
    let alpha1 = pick(&over.alpha1, &mut prov.alpha1, |c| c.alpha1);
    let w = pick(&over.w, &mut prov.w, |c| c.w);
    let beta = over.beta.clone().unwrap_or_else(|| {
        prov.beta = sampled;
        v.as_ref().expect("sampled when missing").beta.clone()
    });
    let psi = over.psi.clone().unwrap_or_else(|| {
        prov.psi = sampled;
        v.as_ref().expect("sampled when missing").psi.clone()
    });
    Ok(BoundConstants {
        m,
        eta,
        beta,
        psi,
        alpha0,
        alpha1,
        w,
        provenance: prov,
    })
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared, CliError> {
    let (model, constants) = match &cfg.system {
        SystemConfig::GeneticNetwork { constants, .. } => {
            let params = cfg.system.genetic_params().expect("genetic network");
            let (model, analytic) = build_example(&params)?;
            let bc = match constants {
                ConstantSource::Analytic => analytic,
                ConstantSource::Sampled => {
                    estimate_all(&model, &sampling(cfg), cfg.numerics.safety)?
                }
            };
            (model, bc)
        }
        SystemConfig::Monomial { .. } => {
            let (model, over) = monomial_model(cfg)?;
            let bc = merge_constants(&model, &over, &sampling(cfg), cfg.numerics.safety)?;
            (model, bc)
        }
    };
    constants.validate(model.dim())?;
    let history = cfg.history.build(model.delay)?;
    if history.dim() != model.dim() {
        return Err(CliError::Config(format!(
            "history has dimension {}, system has {}",
            history.dim(),
            model.dim()
        )));
    }
    let phi_norm = history.hsup_norm(&model.structure);
    Ok(Prepared {
        model,
        constants,
        history,
        phi_norm,
    })
}

/// One row of the sampled-vs-analytic comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckEntry {
    pub name: String,
    pub analytic: f64,
    /// Sampled extremum without the safety factor.
    pub sampled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub constants: BoundConstants,
    pub cross_check: Option<Vec<CrossCheckEntry>>,
}

fn flatten(bc: &BoundConstants) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    let n = bc.dim();
    for i in 0..n {
        out.push((format!("m[{}]", i + 1), bc.m[i]));
    }
    for i in 0..n {
        for j in 0..n {
            out.push((format!("eta[{}][{}]", i + 1, j + 1), bc.eta[i][j]));
        }
    }
    for i in 0..n {
        out.push((format!("beta[{}]", i + 1), bc.beta[i]));
    }
    for i in 0..n {
        for j in 0..n {
            out.push((format!("psi[{}][{}]", i + 1, j + 1), bc.psi[i][j]));
        }
    }
    out.push(("alpha0".into(), bc.alpha0));
    out.push(("alpha1".into(), bc.alpha1));
    out.push(("w".into(), bc.w));
    out
}

pub fn constants_report(cfg: &RunConfig, prepared: &Prepared) -> Result<ConstantsReport, CliError> {
    let cross_check = match cfg.system.genetic_params() {
        Some(p) => {
            let sampled = estimate_all(&prepared.model, &sampling(cfg), 1.0)?;
            let analytic = analytic_constants(&p);
            Some(
                flatten(&analytic)
                    .into_iter()
                    .zip(flatten(&sampled))
                    .map(|((name, a), (_, s))| CrossCheckEntry {
                        name,
                        analytic: a,
                        sampled: s,
                    })
                    .collect(),
            )
        }
        None => None,
    };
    Ok(ConstantsReport {
        constants: prepared.constants.clone(),
        cross_check,
    })
}

pub fn constant_rows(bc: &BoundConstants) -> Vec<(String, f64)> {
    flatten(bc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    /// `(w1 / w, h w2 / w)` of the chosen split.
    pub best_split: (f64, f64),
    pub feasible: usize,
    pub candidates: Vec<CandidateDiagnostic>,
}

/// Serialized output of `certify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub schema_version: u32,
    pub pipeline: PipelineKind,
    pub seed: u64,
    pub constants: BoundConstants,
    /// `|phi|_H` of the configured initial function.
    pub phi_hsup: f64,
    pub classical: Option<EstimateCertificate>,
    pub razumikhin: Option<EstimateCertificate>,
    pub search: Option<SearchSummary>,
}

impl CertificateReport {
    pub fn certificates(&self) -> impl Iterator<Item = &EstimateCertificate> {
        self.classical.iter().chain(self.razumikhin.iter())
    }

    pub fn split(&self) -> WeightSplit {
        self.certificates()
            .next()
            .expect("at least one certificate")
            .functional
            .split
    }
}

pub fn certify(cfg: &RunConfig, prepared: &Prepared) -> Result<CertificateReport, CliError> {
    let bc = &prepared.constants;
    let s = &prepared.model.structure;
    let h = prepared.model.delay;
    let (razumikhin, search, split) = if cfg.pipeline.razumikhin() {
        let out = search_alpha_rho(bc, s, h, &cfg.search.grid())?;
        let summary = SearchSummary {
            best_split: out.best_split,
            feasible: out.feasible,
            candidates: out.candidates,
        };
        (Some(out.best), Some(summary), out.best_split)
    } else {
        (None, None, cfg.search.splits[0])
    };
    let classical = if cfg.pipeline.classical() {
        let ws = WeightSplit::from_fractions(bc.w, h, split.0, split.1)?;
        let f = FunctionalCertificate::classical(bc, s, h, ws)?;
        Some(EstimateCertificate::classical(f)?)
    } else {
        None
    };
    Ok(CertificateReport {
        schema_version: SCHEMA_VERSION,
        pipeline: cfg.pipeline,
        seed: cfg.seed,
        constants: bc.clone(),
        phi_hsup: prepared.phi_norm,
        classical,
        razumikhin,
        search,
    })
}

/// All checks of one certificate along the simulated solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantChecks {
    pub variant: Variant,
    pub admissible: bool,
    pub containment: ContainmentReport,
    pub functional: FunctionalBoundReport,
    pub comparison: ComparisonReport,
}

impl VariantChecks {
    pub fn all_passed(&self) -> bool {
        self.containment.contained() && self.functional.all_passed() && self.comparison.all_passed()
    }
}

#[derive(Debug, Clone)]
pub struct CompareRun {
    pub certificates: CertificateReport,
    pub trajectory: Trajectory,
    pub norms: HomNormSeries,
    pub series: Vec<FunctionalParts>,
    pub checks: Vec<VariantChecks>,
    /// Razumikhin envelope below the classical one at every node.
    pub ordering: Option<BoundCheck>,
}

impl CompareRun {
    pub fn variant(&self, v: Variant) -> Option<&VariantChecks> {
        self.checks.iter().find(|c| c.variant == v)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.all_passed())
            && self.ordering.as_ref().is_none_or(|o| o.passed())
    }
}

pub fn simulate(cfg: &RunConfig, prepared: &Prepared) -> Result<Trajectory, CliError> {
    Ok(integrate(
        &prepared.model,
        &prepared.history,
        cfg.horizon(),
        cfg.numerics.steps_per_delay,
    )?)
}

pub fn compare(cfg: &RunConfig, prepared: &Prepared) -> Result<CompareRun, CliError> {
    let certificates = certify(cfg, prepared)?;
    let mut trajectory = simulate(cfg, prepared)?;
    let s = &prepared.model.structure;
    let norms = hom_norm_series(&trajectory, s);
    let series = functional_series(
        &trajectory,
        &prepared.model,
        &certificates.split(),
        cfg.numerics.quad_panels,
    )?;
    trajectory.v_series = Some(series.iter().map(|p| p.value()).collect());
    let v = trajectory.v_series.as_deref().expect("just set");
    let atol = cfg.numerics.check_atol;
    let phi = prepared.phi_norm;
    let mut checks = Vec::new();
    for est in certificates.certificates() {
        checks.push(VariantChecks {
            variant: est.variant,
            admissible: est.admits(phi),
            containment: check_envelope(&trajectory, &est.envelope, phi, atol),
            functional: check_functional_series(&trajectory, &series, &est.functional, atol)?,
            comparison: check_comparison_bounds(&trajectory, v, est, &est.comparison(phi)?, atol)?,
        });
    }
    let ordering = match (&certificates.classical, &certificates.razumikhin) {
        (Some(c), Some(r)) => {
            let mut chk = BoundCheck::new("Razumikhin envelope below classical envelope");
            for k in 0..trajectory.len() {
                let t = trajectory.time(k);
                chk.record(t, r.envelope_at(t, phi), c.envelope_at(t, phi), atol, false);
            }
            Some(chk)
        }
        _ => None,
    };
    Ok(CompareRun {
        certificates,
        trajectory,
        norms,
        series,
        checks,
        ordering,
    })
}
