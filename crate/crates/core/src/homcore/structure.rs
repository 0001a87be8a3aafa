use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights, norm exponent and homogeneity degrees of a weighted-homogeneous system.
///
/// `mu` is the degree of the vector field, `gamma` the degree of the
/// Lyapunov function. The dilation parameter is never stored; it is an
/// argument of [`HomogeneousStructure::dilate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousStructure {
    weights: Vec<f64>,
    p: f64,
    mu: f64,
    gamma: f64,
}

impl HomogeneousStructure {
    pub fn new(weights: Vec<f64>, p: f64, mu: f64, gamma: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one weight is required".into(),
            ));
        }
        if let Some(r) = weights.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "weights must be positive, got {r}"
            )));
        }
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "norm exponent p must be >= 1, got {p}"
            )));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "homogeneity degree mu must be > 0, got {mu}"
            )));
        }
        let r_max = weights.iter().cloned().fold(f64::MIN, f64::max);
        if !(gamma.is_finite() && gamma >= 2.0 * r_max) {
            return Err(Error::InvalidArgument(format!(
                "Lyapunov degree gamma must be >= 2 max r_i = {}, got {gamma}",
                2.0 * r_max
            )));
        }
        Ok(Self {
            weights,
            p,
            mu,
            gamma,
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `(sum |x_i|^(p / r_i))^(1/p)`.
    pub fn norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        let sum: f64 = x
            .iter()
            .zip(&self.weights)
            .map(|(xi, ri)| xi.abs().powf(self.p / ri))
            .sum();
        sum.powf(1.0 / self.p)
    }

    /// Componentwise `eps^(r_i) x_i`.
    pub fn dilate(&self, x: &[f64], eps: f64) -> Result<Vec<f64>> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dilation parameter must be positive, got {eps}"
            )));
        }
        Ok(self.dilate_unchecked(x, eps))
    }

    pub(crate) fn dilate_unchecked(&self, x: &[f64], eps: f64) -> Vec<f64> {
        x.iter()
            .zip(&self.weights)
            .map(|(xi, ri)| eps.powf(*ri) * xi)
            .collect()
    }

    /// Maps a point of the Euclidean unit sphere onto the homogeneous unit sphere.
    ///
    /// `x_i = sign(z_i) |z_i|^(2 r_i / p)` so that `sum |x_i|^(p/r_i) = sum z_i^2 = 1`.
    pub(crate) fn sphere_point(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(&self.weights)
            .map(|(zi, ri)| zi.signum() * zi.abs().powf(2.0 * ri / self.p))
            .collect()
    }

    /// Exponent `mu + r_i - r_j` governing the Jacobian entry `(i, j)`.
    pub fn jacobian_degree(&self, i: usize, j: usize) -> f64 {
        self.mu + self.weights[i] - self.weights[j]
    }

    /// Pairs with `mu + r_i - r_j >= 0`; the zero case is included here.
    pub fn in_first_partition(&self, i: usize, j: usize) -> bool {
        self.jacobian_degree(i, j) >= 0.0
    }
}

/// Free-function form of [`HomogeneousStructure::norm`].
pub fn hom_norm(x: &[f64], s: &HomogeneousStructure) -> f64 {
    s.norm(x)
}

/// Free-function form of [`HomogeneousStructure::dilate`].
pub fn dilate(x: &[f64], eps: f64, s: &HomogeneousStructure) -> Result<Vec<f64>> {
    s.dilate(x, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn s12() -> HomogeneousStructure {
        HomogeneousStructure::new(vec![1.0, 2.0], 5.0, 1.0, 4.0).unwrap()
    }

    #[test]
    fn norm_examples() {
        let s = s12();
        assert_eq!(s.norm(&[0.0, 0.0]), 0.0);
        assert_eq!(s.norm(&[1.0, 0.0]), 1.0);
        // (1^5 + 1^(5/2))^(1/5)
        assert_relative_eq!(s.norm(&[1.0, 1.0]), 2f64.powf(0.2), max_relative = 1e-15);
        assert_relative_eq!(s.norm(&[1.0, 1.0]), 1.148698, epsilon = 1e-6);
    }

    #[test]
    fn dilate_examples() {
        let s = s12();
        assert_eq!(s.dilate(&[1.0, 1.0], 1.0).unwrap(), vec![1.0, 1.0]);
        assert_eq!(s.dilate(&[1.0, 1.0], 2.0).unwrap(), vec![2.0, 4.0]);
        let x = [3.0, -5.0];
        let lhs = s.norm(&s.dilate(&x, 0.7).unwrap());
        assert_relative_eq!(lhs, 0.7 * s.norm(&x), max_relative = 1e-14);
    }

    #[test]
    fn dilate_rejects_nonpositive() {
        let s = s12();
        assert!(matches!(
            s.dilate(&[1.0, 1.0], 0.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            s.dilate(&[1.0, 1.0], -1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn construction_invariants() {
        assert!(HomogeneousStructure::new(vec![1.0], 2.0, 0.0, 2.0).is_err());
        assert!(HomogeneousStructure::new(vec![1.0, 2.0], 5.0, 1.0, 3.0).is_err());
        assert!(HomogeneousStructure::new(vec![1.0, -1.0], 5.0, 1.0, 4.0).is_err());
        assert!(HomogeneousStructure::new(vec![1.0], 0.5, 1.0, 4.0).is_err());
        assert!(HomogeneousStructure::new(vec![], 2.0, 1.0, 4.0).is_err());
    }

    #[test]
    fn euclidean_sphere_maps_to_unit_hom_sphere() {
        let s = s12();
        for z in [
            [1.0, 0.0],
            [0.6, -0.8],
            [-1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()],
        ] {
            assert_relative_eq!(s.norm(&s.sphere_point(&z)), 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn partition_of_example_pairs() {
        let s = s12();
        // mu + r_1 - r_2 = 0 belongs to the first partition.
        assert!(s.in_first_partition(0, 0));
        assert!(s.in_first_partition(0, 1));
        assert!(s.in_first_partition(1, 0));
        assert!(s.in_first_partition(1, 1));
        assert_eq!(s.jacobian_degree(0, 1), 0.0);
        assert_eq!(s.jacobian_degree(1, 0), 2.0);
    }

    proptest! {
        #[test]
        fn norm_is_degree_one(
            x0 in -1e3f64..1e3, x1 in -1e3f64..1e3,
            log_eps in -3.0f64..3.0,
            r1 in 0.2f64..3.0, p in 1.0f64..8.0,
        ) {
            let s = HomogeneousStructure::new(vec![1.0, r1], p, 1.0, 2.0 * r1.max(1.0)).unwrap();
            let eps = 10f64.powf(log_eps);
            let x = [x0, x1];
            let lhs = s.norm(&s.dilate(&x, eps).unwrap());
            let rhs = eps * s.norm(&x);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn norm_positive_off_origin(x0 in -1.0f64..1.0, x1 in -1.0f64..1.0) {
            let s = s12();
            let x = [x0, x1];
            if (x0 * x0 + x1 * x1).sqrt() >= 1e-8 {
                prop_assert!(s.norm(&x) > 0.0);
            }
        }
    }
}
