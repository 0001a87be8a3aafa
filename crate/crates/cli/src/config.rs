//! Run configuration, read from TOML. The schema is described in `docs/config.md`.

use std::path::Path;

use delaycert_core::estimates::{validate_splits, SearchGrid};
use delaycert_core::example::GeneticNetworkParams;
use delaycert_core::history::HistoryFunction;
use delaycert_core::model::Domain;
use delaycert_core::monomial::{FieldTerm, ScalarTerm};
use delaycert_core::sim::MIN_STEPS_PER_DELAY;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineKind {
    Classical,
    Razumikhin,
    Both,
}

impl PipelineKind {
    pub fn classical(self) -> bool {
        matches!(self, Self::Classical | Self::Both)
    }

    pub fn razumikhin(self) -> bool {
        matches!(self, Self::Razumikhin | Self::Both)
    }
}

/// Per-family overrides; any family left out is sampled.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantOverrides {
    pub m: Option<Vec<f64>>,
    pub eta: Option<Vec<Vec<f64>>>,
    pub beta: Option<Vec<f64>>,
    pub psi: Option<Vec<Vec<f64>>>,
    pub alpha0: Option<f64>,
    pub alpha1: Option<f64>,
    pub w: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantSource {
    Analytic,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
#[allow(clippy::large_enum_variant)]
pub enum SystemConfig {
    /// The two-gene network with its closed-form constants.
    GeneticNetwork {
        kappa1: f64,
        kappa2: f64,
        lambda1: f64,
        lambda2: f64,
        h: f64,
        #[serde(default = "default_source")]
        constants: ConstantSource,
    },
    Monomial {
        h: f64,
        weights: Vec<f64>,
        p: f64,
        mu: f64,
        gamma: f64,
        #[serde(default)]
        domain: Domain,
        field: Vec<Vec<FieldTerm>>,
        lyapunov: Vec<ScalarTerm>,
        #[serde(default)]
        analytic: ConstantOverrides,
    },
}

fn default_source() -> ConstantSource {
    ConstantSource::Analytic
}

impl SystemConfig {
    pub fn delay(&self) -> f64 {
        match self {
            Self::GeneticNetwork { h, .. } | Self::Monomial { h, .. } => *h,
        }
    }

    pub fn on_orthant(&self) -> bool {
        match self {
            Self::GeneticNetwork { .. } => true,
            Self::Monomial { domain, .. } => domain.is_orthant(),
        }
    }

    pub fn genetic_params(&self) -> Option<GeneticNetworkParams> {
        match *self {
            Self::GeneticNetwork {
                kappa1,
                kappa2,
                lambda1,
                lambda2,
                h,
                ..
            } => Some(GeneticNetworkParams {
                kappa1,
                kappa2,
                lambda1,
                lambda2,
                h,
            }),
            Self::Monomial { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HistoryConfig {
    Constant {
        value: Vec<f64>,
    },
    /// Nodes `theta` from `-h` to `0` with one state per node.
    PiecewiseLinear {
        theta: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

impl HistoryConfig {
    pub fn values(&self) -> &[Vec<f64>] {
        match self {
            Self::Constant { value } => std::slice::from_ref(value),
            Self::PiecewiseLinear { values, .. } => values,
        }
    }

    pub fn build(&self, h: f64) -> delaycert_core::Result<HistoryFunction> {
        match self {
            Self::Constant { value } => HistoryFunction::constant(h, value.clone()),
            Self::PiecewiseLinear { theta, values } => {
                HistoryFunction::piecewise_linear(h, theta.clone(), values.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub steps_per_delay: usize,
    pub quad_panels: usize,
    pub samples: usize,
    pub safety: f64,
    /// Simulation horizon; defaults to `100 h`.
    pub horizon: Option<f64>,
    /// Absolute slack of the trajectory checks.
    pub check_atol: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            steps_per_delay: 256,
            quad_panels: 64,
            samples: 100_000,
            safety: 1.05,
            horizon: None,
            check_atol: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub splits: Vec<(f64, f64)>,
    pub alphas: Vec<f64>,
    pub rho_fractions: Vec<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        let g = SearchGrid::default();
        Self {
            splits: g.splits,
            alphas: g.alphas,
            rho_fractions: g.rho_fractions,
        }
    }
}

impl SearchConfig {
    pub fn grid(&self) -> SearchGrid {
        SearchGrid {
            splits: self.splits.clone(),
            alphas: self.alphas.clone(),
            rho_fractions: self.rho_fractions.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_pipeline")]
    pub pipeline: PipelineKind,
    pub system: SystemConfig,
    pub history: HistoryConfig,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub search: SearchConfig,
}

fn default_pipeline() -> PipelineKind {
    PipelineKind::Both
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    /// The reference scenario: the two-gene network at (9, 18, 0.25, 0.5), h = 10,
    /// constant initial function (5e-11, 5e-11).
    pub fn reference() -> Self {
        let p = GeneticNetworkParams::REFERENCE;
        Self {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            pipeline: PipelineKind::Both,
            system: SystemConfig::GeneticNetwork {
                kappa1: p.kappa1,
                kappa2: p.kappa2,
                lambda1: p.lambda1,
                lambda2: p.lambda2,
                h: p.h,
                constants: ConstantSource::Analytic,
            },
            history: HistoryConfig::Constant {
                value: vec![5e-11, 5e-11],
            },
            numerics: Numerics::default(),
            search: SearchConfig::default(),
        }
    }

    /// Parses without range validation.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg = Self::parse(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and parses a file. Validation is left to the caller so that
    /// command-line overrides can be applied first.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => invalid(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn horizon(&self) -> f64 {
        self.numerics.horizon.unwrap_or(100.0 * self.system.delay())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(format!(
                "schema_version = {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let h = self.system.delay();
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid(format!("system.h must be positive, got {h}")));
        }
        let n = &self.numerics;
        if n.steps_per_delay < MIN_STEPS_PER_DELAY {
            return Err(invalid(format!(
                "numerics.steps_per_delay must be >= {MIN_STEPS_PER_DELAY}, got {}",
                n.steps_per_delay
            )));
        }
        if n.quad_panels < 2
            || !n.quad_panels.is_multiple_of(2)
            || !n.steps_per_delay.is_multiple_of(n.quad_panels)
        {
            return Err(invalid(format!(
                "numerics.quad_panels must be even and divide steps_per_delay, got {}",
                n.quad_panels
            )));
        }
        if n.samples == 0 {
            return Err(invalid("numerics.samples must be positive"));
        }
        if !(n.safety >= 1.0 && n.safety.is_finite()) {
            return Err(invalid(format!(
                "numerics.safety must be >= 1, got {}",
                n.safety
            )));
        }
        if !(n.check_atol >= 0.0) {
            return Err(invalid("numerics.check_atol must be >= 0"));
        }
        let horizon = self.horizon();
        let steps = horizon / (h / n.steps_per_delay as f64);
        if !(horizon > 0.0) || (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(invalid(format!(
                "numerics.horizon = {horizon} must be a positive multiple of h / steps_per_delay"
            )));
        }
        if self.pipeline.razumikhin() {
            self.search
                .grid()
                .validate()
                .map_err(|e| invalid(format!("search: {e}")))?;
        } else {
            validate_splits(&self.search.splits).map_err(|e| invalid(format!("search: {e}")))?;
        }
        if let Some(p) = self.system.genetic_params() {
            p.validate().map_err(|e| invalid(format!("system: {e}")))?;
        }
        self.history
            .build(h)
            .map_err(|e| invalid(format!("history: {e}")))?;
        if self.system.on_orthant() && self.history.values().iter().flatten().any(|&v| v < 0.0) {
            return Err(invalid(
                "history: values must be nonnegative on the nonnegative orthant",
            ));
        }
        Ok(())
    }
}
