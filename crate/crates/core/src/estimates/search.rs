use serde::{Deserialize, Serialize};

use super::comparison::connection_constants;
use super::envelope::EstimateCertificate;
use crate::error::{Error, Result};
use crate::functional::{FunctionalCertificate, WeightSplit};
use crate::homcore::{BoundConstants, HomogeneousStructure};

/// Candidate values for the split of `w`, `alpha` and `rho / rho2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    /// `(w1 / w, h w2 / w)` pairs.
    pub splits: Vec<(f64, f64)>,
    pub alphas: Vec<f64>,
    pub rho_fractions: Vec<f64>,
}

impl Default for SearchGrid {
    fn default() -> Self {
        Self {
            splits: vec![(0.25, 0.25), (0.2, 0.2), (0.3, 0.2), (0.2, 0.3), (0.3, 0.3)],
            alphas: vec![1.001, 1.002, 1.005, 1.01, 1.02, 1.05, 1.1, 1.2, 1.5, 2.0],
            rho_fractions: vec![1.0, 0.999, 0.99, 0.9, 0.5],
        }
    }
}

impl SearchGrid {
    pub fn validate(&self) -> Result<()> {
        if self.splits.is_empty() || self.alphas.is_empty() || self.rho_fractions.is_empty() {
            return Err(Error::InvalidArgument(
                "search grids must be nonempty".into(),
            ));
        }
        if let Some(a) = self.alphas.iter().find(|&&a| !(a > 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "alpha must exceed 1, got {a}"
            )));
        }
        if let Some(f) = self.rho_fractions.iter().find(|&&f| !(f > 0.0 && f <= 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "rho fraction must lie in (0, 1], got {f}"
            )));
        }
        validate_splits(&self.splits)
    }
}

/// Fractions `(f1, f2)` leave `w0 = (1 - f1 - f2) w`, so both must be positive with sum below 1.
pub fn validate_splits(splits: &[(f64, f64)]) -> Result<()> {
    if splits.is_empty() {
        return Err(Error::InvalidArgument("split grid must be nonempty".into()));
    }
    if let Some(sp) = splits
        .iter()
        .find(|&&(a, b)| !(a > 0.0 && b > 0.0 && a + b < 1.0))
    {
        return Err(Error::InvalidArgument(format!(
            "split fractions must be positive with sum below 1, got {sp:?}"
        )));
    }
    Ok(())
}

/// Outcome for one `(split, alpha, rho)` tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateDiagnostic {
    pub split: (f64, f64),
    pub alpha: f64,
    pub rho_fraction: f64,
    pub radius: Option<f64>,
    /// First failed constraint, if any.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: EstimateCertificate,
    pub best_split: (f64, f64),
    pub feasible: usize,
    pub candidates: Vec<CandidateDiagnostic>,
}

fn candidate(
    bc: &BoundConstants,
    s: &HomogeneousStructure,
    h: f64,
    split: (f64, f64),
    alpha: f64,
    rho_fraction: f64,
) -> Result<EstimateCertificate> {
    let ws = WeightSplit::from_fractions(bc.w, h, split.0, split.1)?;
    let f = FunctionalCertificate::razumikhin(bc, s, h, ws, alpha)?;
    f.ensure_feasible()?;
    let rho = rho_fraction * connection_constants(&f)?.rho2;
    EstimateCertificate::razumikhin(f, rho)
}

/// Best Razumikhin certificate over the grid: largest radius, then largest `rho`,
/// then first in grid order.
pub fn search_alpha_rho(
    bc: &BoundConstants,
    s: &HomogeneousStructure,
    h: f64,
    grid: &SearchGrid,
) -> Result<SearchOutcome> {
    grid.validate()?;
    let mut best: Option<(EstimateCertificate, (f64, f64))> = None;
    let mut candidates = Vec::new();
    let mut feasible = 0;
    for &split in &grid.splits {
        for &alpha in &grid.alphas {
            for &rf in &grid.rho_fractions {
                let mut diag = CandidateDiagnostic {
                    split,
                    alpha,
                    rho_fraction: rf,
                    radius: None,
                    failure: None,
                };
                match candidate(bc, s, h, split, alpha, rf) {
                    Ok(est) => {
                        feasible += 1;
                        diag.radius = Some(est.radius);
                        let better = match &best {
                            None => true,
                            Some((b, _)) => {
                                est.radius > b.radius || (est.radius == b.radius && est.rho > b.rho)
                            }
                        };
                        if better {
                            best = Some((est, split));
                        }
                    }
                    Err(e) => diag.failure = Some(e.to_string()),
                }
                candidates.push(diag);
            }
        }
    }
    match best {
        Some((best, best_split)) => Ok(SearchOutcome {
            best,
            best_split,
            feasible,
            candidates,
        }),
        None => {
            // One line per distinct failure, naming the first tuple that hit it.
            let mut groups: Vec<(&CandidateDiagnostic, usize)> = Vec::new();
            for c in &candidates {
                match groups.iter_mut().find(|(g, _)| g.failure == c.failure) {
                    Some((_, n)) => *n += 1,
                    None => groups.push((c, 1)),
                }
            }
            let lines: Vec<String> = groups
                .iter()
                .map(|(c, n)| {
                    let mut line = format!(
                        "split {:?}, alpha {}, rho fraction {}: {}",
                        c.split,
                        c.alpha,
                        c.rho_fraction,
                        c.failure.as_deref().unwrap_or("?")
                    );
                    if *n > 1 {
                        line.push_str(&format!(" ({n} tuples)"));
                    }
                    line
                })
                .collect();
            Err(Error::Infeasible(format!(
                "no feasible (split, alpha, rho):\n{}",
                lines.join("\n")
            )))
        }
    }
}
