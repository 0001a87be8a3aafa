//! Sampled estimation of the growth constants.
//!
//! Every estimate is a maximum (or minimum) over random points of a compact
//! level set, so it bounds the true extremum from one side only. The safety
//! factor compensates; nothing here is rigorous.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::constants::{BoundConstants, Provenance, ProvenanceTable};
use super::structure::HomogeneousStructure;
use crate::error::{Error, Result};
use crate::model::SystemModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub samples: usize,
    pub seed: u64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 0,
        }
    }
}

impl SamplingSpec {
    fn check(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidArgument(
                "sampling spec has zero points".into(),
            ));
        }
        Ok(())
    }
}

fn check_safety(safety: f64) -> Result<()> {
    if !(safety >= 1.0 && safety.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "safety factor must be >= 1, got {safety}"
        )));
    }
    Ok(())
}

/// Draws points on homogeneous spheres and on the level sets
/// `|x|^k + |y|^k = 1`. The stream for a given seed is fixed, so a larger
/// sample count always sees a superset of the points of a smaller one.
pub(crate) struct LevelSetSampler<'a> {
    structure: &'a HomogeneousStructure,
    orthant: bool,
    rng: ChaCha8Rng,
}

impl<'a> LevelSetSampler<'a> {
    pub(crate) fn new(structure: &'a HomogeneousStructure, orthant: bool, seed: u64) -> Self {
        Self {
            structure,
            orthant,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn euclidean_direction(&mut self) -> Vec<f64> {
        let n = self.structure.dim();
        loop {
            let mut z: Vec<f64> = (0..n).map(|_| self.rng.sample(StandardNormal)).collect();
            let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-300 {
                z.iter_mut().for_each(|v| {
                    *v /= norm;
                    if self.orthant {
                        *v = v.abs();
                    }
                });
                return z;
            }
        }
    }

    /// A point with `|x|_{r,p} = 1`.
    pub(crate) fn unit_point(&mut self) -> Vec<f64> {
        let z = self.euclidean_direction();
        self.structure.sphere_point(&z)
    }

    /// A pair on `|x|^k + |y|^k = 1`. The split `s = |x|^k` is drawn with a
    /// density that favours the ends, where one of the pair vanishes.
    pub(crate) fn level_pair(&mut self, k: f64) -> (Vec<f64>, Vec<f64>) {
        let u: f64 = self.rng.gen();
        let s = 0.5 * (1.0 - (std::f64::consts::PI * u).cos());
        let xh = self.unit_point();
        let yh = self.unit_point();
        let x = self.structure.dilate_unchecked(&xh, s.powf(1.0 / k));
        let y = self
            .structure
            .dilate_unchecked(&yh, (1.0 - s).max(0.0).powf(1.0 / k));
        (x, y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MEstimate {
    /// Safety-inflated bounds.
    pub m: Vec<f64>,
    /// Sampled maxima before the safety factor.
    pub raw: Vec<f64>,
    /// Components whose sampled maximum is zero.
    pub degenerate: Vec<usize>,
    pub samples: usize,
    pub safety: f64,
}

/// Level-set exponent for component `i`: `mu + r_i`, or 1 when that is not positive.
fn level_exponent(degree: f64) -> f64 {
    if degree > 0.0 {
        degree
    } else {
        1.0
    }
}

pub fn estimate_m(model: &SystemModel, grid: &SamplingSpec, safety: f64) -> Result<MEstimate> {
    grid.check()?;
    check_safety(safety)?;
    let s = &model.structure;
    let n = s.dim();
    let mut raw = vec![0.0f64; n];
    let mut out = vec![0.0; n];
    for i in 0..n {
        let k = level_exponent(s.mu() + s.weight(i));
        let mut sampler =
            LevelSetSampler::new(s, model.domain.is_orthant(), grid.seed ^ (i as u64));
        for _ in 0..grid.samples {
            let (x, y) = sampler.level_pair(k);
            model.field.eval(&x, &y, &mut out);
            raw[i] = raw[i].max(out[i].abs());
        }
    }
    let degenerate = (0..n).filter(|&i| raw[i] == 0.0).collect();
    Ok(MEstimate {
        m: raw.iter().map(|v| v * safety).collect(),
        raw,
        degenerate,
        samples: grid.samples,
        safety,
    })
}

/// Split of the index pairs by the sign of `mu + r_i - r_j`; zero goes to `first`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub first: Vec<(usize, usize)>,
    pub second: Vec<(usize, usize)>,
}

impl Partition {
    pub fn of(s: &HomogeneousStructure) -> Self {
        let n = s.dim();
        let (mut first, mut second) = (Vec::new(), Vec::new());
        for i in 0..n {
            for j in 0..n {
                if s.in_first_partition(i, j) {
                    first.push((i, j));
                } else {
                    second.push((i, j));
                }
            }
        }
        Self { first, second }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaEstimate {
    pub eta: Vec<Vec<f64>>,
    pub raw: Vec<Vec<f64>>,
    pub partition: Partition,
    pub samples: usize,
    pub safety: f64,
}

/// Degree-zero ratio bounded by `eta_ij`, or `None` when the point must be skipped.
fn jacobian_ratio(deriv: f64, degree: f64, nx: f64, ny: f64) -> Option<f64> {
    if degree > 0.0 {
        Some(deriv.abs() / (nx.powf(degree) + ny.powf(degree)))
    } else if degree < 0.0 {
        if nx == 0.0 && ny == 0.0 {
            return None;
        }
        Some(deriv.abs() * (nx.powf(-degree) + ny.powf(-degree)))
    } else {
        Some(deriv.abs())
    }
}

pub fn estimate_eta(model: &SystemModel, grid: &SamplingSpec, safety: f64) -> Result<EtaEstimate> {
    grid.check()?;
    check_safety(safety)?;
    let s = &model.structure;
    let n = s.dim();
    let mut raw = vec![vec![0.0f64; n]; n];
    let mut jac = vec![0.0; n * n];
    // Each ratio is homogeneous of degree zero; the level set |x| + |y| = 1 suffices.
    let mut sampler =
        LevelSetSampler::new(s, model.domain.is_orthant(), grid.seed.wrapping_add(0x5eed));
    for _ in 0..grid.samples {
        let (x, y) = sampler.level_pair(1.0);
        let (nx, ny) = (s.norm(&x), s.norm(&y));
        model.field.jacobian_x(&x, &y, &mut jac);
        for i in 0..n {
            for j in 0..n {
                if let Some(q) = jacobian_ratio(jac[i * n + j], s.jacobian_degree(i, j), nx, ny) {
                    if q.is_finite() {
                        raw[i][j] = raw[i][j].max(q);
                    }
                }
            }
        }
    }
    Ok(EtaEstimate {
        eta: raw
            .iter()
            .map(|row| row.iter().map(|v| v * safety).collect())
            .collect(),
        raw,
        partition: Partition::of(s),
        samples: grid.samples,
        safety,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VConstants {
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta: Vec<f64>,
    pub psi: Vec<Vec<f64>>,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VConstantsEstimate {
    /// Values after the safety factor.
    pub constants: VConstants,
    /// Sampled extrema before the safety factor.
    pub raw: VConstants,
    pub samples: usize,
    pub safety: f64,
}

/// Extrema of `V`, its derivatives and `-dV/dx . f(x, x)` on the homogeneous unit sphere.
pub fn estimate_v_constants(
    model: &SystemModel,
    grid: &SamplingSpec,
    safety: f64,
) -> Result<VConstantsEstimate> {
    grid.check()?;
    check_safety(safety)?;
    let s = &model.structure;
    let n = s.dim();
    let mut raw = VConstants {
        alpha0: f64::INFINITY,
        alpha1: 0.0,
        beta: vec![0.0; n],
        psi: vec![vec![0.0; n]; n],
        w: f64::INFINITY,
    };
    let (mut grad, mut hess, mut fx) = (vec![0.0; n], vec![0.0; n * n], vec![0.0; n]);
    let mut sampler =
        LevelSetSampler::new(s, model.domain.is_orthant(), grid.seed.wrapping_add(0xa1fa));
    for _ in 0..grid.samples {
        let x = sampler.unit_point();
        let v = model.lyapunov.value(&x);
        raw.alpha0 = raw.alpha0.min(v);
        raw.alpha1 = raw.alpha1.max(v);
        model.lyapunov.gradient(&x, &mut grad);
        model.lyapunov.hessian(&x, &mut hess);
        for i in 0..n {
            raw.beta[i] = raw.beta[i].max(grad[i].abs());
            for j in 0..n {
                raw.psi[i][j] = raw.psi[i][j].max(hess[i * n + j].abs());
            }
        }
        model.field.eval(&x, &x, &mut fx);
        let decay = -grad.iter().zip(&fx).map(|(g, f)| g * f).sum::<f64>();
        raw.w = raw.w.min(decay);
    }
    if !(raw.w > 0.0) {
        return Err(Error::CertificationFailure(format!(
            "delay-free system not certified asymptotically stable by this V (sampled w = {})",
            raw.w
        )));
    }
    if !(raw.alpha0 > 0.0) {
        return Err(Error::CertificationFailure(format!(
            "V is not positive definite on the sampled unit sphere (min = {})",
            raw.alpha0
        )));
    }
    let constants = VConstants {
        alpha0: raw.alpha0 / safety,
        alpha1: raw.alpha1 * safety,
        beta: raw.beta.iter().map(|v| v * safety).collect(),
        psi: raw
            .psi
            .iter()
            .map(|row| row.iter().map(|v| v * safety).collect())
            .collect(),
        w: raw.w / safety,
    };
    Ok(VConstantsEstimate {
        constants,
        raw,
        samples: grid.samples,
        safety,
    })
}

/// Runs all three estimators and assembles a sampled [`BoundConstants`].
pub fn estimate_all(
    model: &SystemModel,
    grid: &SamplingSpec,
    safety: f64,
) -> Result<BoundConstants> {
    let m = estimate_m(model, grid, safety)?;
    let eta = estimate_eta(model, grid, safety)?;
    let v = estimate_v_constants(model, grid, safety)?;
    let provenance = ProvenanceTable::all(Provenance::Sampled {
        samples: grid.samples,
        safety,
    });
    Ok(BoundConstants {
        m: m.m,
        eta: eta.eta,
        beta: v.constants.beta,
        psi: v.constants.psi,
        alpha0: v.constants.alpha0,
        alpha1: v.constants.alpha1,
        w: v.constants.w,
        provenance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub passed: bool,
    pub worst_relative_residual: f64,
    pub checks: usize,
}

/// Samples random `(x, y, eps)` and checks the degree identities of `f` and `V`.
///
/// The residual of component `i` is
/// `|f_i(d x, d y) - eps^(mu + r_i) f_i(x, y)| / (1 + eps^(mu + r_i) |f_i(x, y)|)`.
pub fn check_homogeneity(
    model: &SystemModel,
    samples: usize,
    tol: f64,
    seed: u64,
) -> HomogeneityReport {
    let s = &model.structure;
    let n = s.dim();
    let orthant = model.domain.is_orthant();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..n)
            .map(|_| {
                let v: f64 = rng.sample(StandardNormal);
                if orthant {
                    v.abs()
                } else {
                    v
                }
            })
            .collect()
    };
    let (mut f0, mut f1) = (vec![0.0; n], vec![0.0; n]);
    let mut worst = 0.0f64;
    let mut checks = 0;
    for _ in 0..samples {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let eps = 10f64.powf(rng.gen_range(-3.0..3.0));
        let (dx, dy) = (s.dilate_unchecked(&x, eps), s.dilate_unchecked(&y, eps));
        model.field.eval(&x, &y, &mut f0);
        model.field.eval(&dx, &dy, &mut f1);
        for i in 0..n {
            let scale = eps.powf(s.mu() + s.weight(i));
            let res = (f1[i] - scale * f0[i]).abs() / (1.0 + scale * f0[i].abs());
            worst = worst.max(if res.is_nan() { f64::INFINITY } else { res });
            checks += 1;
        }
        let scale = eps.powf(s.gamma());
        let v0 = model.lyapunov.value(&x);
        let v1 = model.lyapunov.value(&dx);
        let res = (v1 - scale * v0).abs() / (1.0 + scale * v0.abs());
        worst = worst.max(if res.is_nan() { f64::INFINITY } else { res });
        checks += 1;
    }
    HomogeneityReport {
        passed: worst <= tol,
        worst_relative_residual: worst,
        checks,
    }
}
