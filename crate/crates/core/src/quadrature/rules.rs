//! Gauss–Jacobi rules by the Golub–Welsch eigenvalue method.

use crate::special::ln_gamma;
use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights on [-1, 1] for the weight (1 - x)^a (1 + x)^b.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn legendre(n: usize) -> Self {
        Self::jacobi(n, 0.0, 0.0)
    }

    /// `n`-point rule for (1 - x)^a (1 + x)^b with a, b > -1.
    pub fn jacobi(n: usize, a: f64, b: f64) -> Self {
        assert!(n >= 1 && a > -1.0 && b > -1.0);
        let ab = a + b;
        let mut jm = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let kf = k as f64;
            let s = 2.0 * kf + ab;
            jm[(k, k)] = if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                (b * b - a * a) / (s * (s + 2.0))
            };
            if k + 1 < n {
                let m = kf + 1.0;
                let s = 2.0 * m + ab;
                let beta = if m == 1.0 {
                    4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
                } else {
                    4.0 * m * (m + a) * (m + b) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))
                };
                let off = beta.sqrt();
                jm[(k, k + 1)] = off;
                jm[(k + 1, k)] = off;
            }
        }
        let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
            - ln_gamma(ab + 2.0))
            .exp();
        let eig = SymmetricEigen::new(jm);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        GaussRule {
            a,
            b,
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Points and weights for ∫_lo^hi (hi - τ)^a (τ - lo)^b g(τ) dτ.
    pub fn on_interval(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let scale = half.powf(self.a + self.b + 1.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (lo + half * (x + 1.0), w * scale))
    }

    /// Same as [`on_interval`](Self::on_interval) but returns the distance
    /// to the upper end, hi - τ, computed without cancellation.
    pub fn from_upper_end(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let scale = half.powf(self.a + self.b + 1.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (half * (1.0 - x), w * scale))
    }
}
