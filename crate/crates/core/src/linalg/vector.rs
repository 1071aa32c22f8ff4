use serde::{Deserialize, Serialize};

use super::ZERO_NORM;

/// A point in the k-dimensional latent space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatentVector(Vec<f64>);

impl LatentVector {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![0.0; k])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &LatentVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, factor: f64) -> LatentVector {
        Self(self.0.iter().map(|c| c * factor).collect())
    }

    /// Unit-length copy; zero vectors stay zero.
    pub fn normalized(&self) -> LatentVector {
        let n = self.norm();
        if n <= ZERO_NORM {
            Self::zeros(self.dim())
        } else {
            self.scaled(1.0 / n)
        }
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for LatentVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Cosine similarity, clamped to [-1, 1]. Zero when either vector has
/// (near-)zero norm. Never returns -0.0, so `total_cmp` sees exact ties.
pub fn cosine(p: &LatentVector, q: &LatentVector) -> f64 {
    let (np, nq) = (p.norm(), q.norm());
    if np <= ZERO_NORM || nq <= ZERO_NORM {
        return 0.0;
    }
    (p.dot(q) / (np * nq)).clamp(-1.0, 1.0) + 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> LatentVector {
        LatentVector::new(c.to_vec())
    }

    #[test]
    fn worked_values() {
        assert_eq!(cosine(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])), 0.0);
        assert!((cosine(&v(&[2.0, 0.0]), &v(&[5.0, 0.0])) - 1.0).abs() < 1e-15);
        assert!((cosine(&v(&[1.0, 1.0]), &v(&[1.0, 0.0])) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn zero_norm_is_neutral() {
        assert_eq!(cosine(&v(&[0.0, 0.0]), &v(&[1.0, 2.0])), 0.0);
        assert_eq!(cosine(&v(&[1e-14, 0.0]), &v(&[1.0, 0.0])), 0.0);
    }

    #[test]
    fn orthogonal_is_positive_zero() {
        let c = cosine(&v(&[-1.0, -1.0, 0.0]), &v(&[0.0, 0.0, -1.0]));
        assert!(c == 0.0 && c.is_sign_positive());
    }

    proptest! {
        #[test]
        fn bounded_symmetric_scale_invariant(
            p in prop::collection::vec(-10.0f64..10.0, 4),
            q in prop::collection::vec(-10.0f64..10.0, 4),
            alpha in 0.01f64..100.0,
        ) {
            let (p, q) = (v(&p), v(&q));
            let c = cosine(&p, &q);
            prop_assert!(c.abs() <= 1.0 + 1e-12);
            prop_assert_eq!(c, cosine(&q, &p));
            prop_assert!((cosine(&p.scaled(alpha), &q) - c).abs() <= 1e-12);
            if p.norm() > 1e-6 {
                prop_assert!((cosine(&p, &p) - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn normalized_dot_equals_cosine(
            p in prop::collection::vec(-10.0f64..10.0, 5),
            q in prop::collection::vec(-10.0f64..10.0, 5),
        ) {
            let (p, q) = (v(&p), v(&q));
            prop_assume!(p.norm() > 1e-6 && q.norm() > 1e-6);
            prop_assert!((p.normalized().dot(&q.normalized()) - cosine(&p, &q)).abs() <= 1e-12);
        }
    }
}
