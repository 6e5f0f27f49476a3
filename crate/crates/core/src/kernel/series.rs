//! Kernels of the form h_μ(t)·Σ aₖ tᵏ and Sonin's triangular-system
//! construction of associated kernels.

use crate::error::{Error, Result};
use crate::special::recip_gamma;
use serde::{Deserialize, Serialize};

/// Number of coefficients kept when a catalog kernel is expanded.
pub const DEFAULT_TERMS: usize = 24;

const MAX_ORDER: f64 = 2.0;

/// How many coefficients of a series can be trusted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// The coefficient list is the whole series (a polynomial factor).
    #[default]
    Exact,
    /// Only the first n coefficients are meaningful.
    Terms(usize),
}

impl Truncation {
    fn min(self, other: Truncation) -> Truncation {
        match (self, other) {
            (Truncation::Exact, o) | (o, Truncation::Exact) => o,
            (Truncation::Terms(a), Truncation::Terms(b)) => Truncation::Terms(a.min(b)),
        }
    }
}

/// t ↦ h_μ(t)·Σₖ aₖ tᵏ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSeries {
    mu: f64,
    coeffs: Vec<f64>,
    #[serde(default)]
    truncation: Truncation,
}

impl KernelSeries {
    /// A series whose coefficient list is complete.
    pub fn new(mu: f64, coeffs: Vec<f64>) -> Result<Self> {
        let s = KernelSeries {
            mu,
            coeffs,
            truncation: Truncation::Exact,
        };
        s.check()?;
        Ok(s)
    }

    /// A series known only through its first `coeffs.len()` coefficients.
    pub fn truncated(mu: f64, coeffs: Vec<f64>) -> Result<Self> {
        let n = coeffs.len();
        let s = KernelSeries {
            mu,
            coeffs,
            truncation: Truncation::Terms(n),
        };
        s.check()?;
        Ok(s)
    }

    pub(crate) fn check(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu <= MAX_ORDER) {
            return Err(Error::Parameter(format!(
                "series order mu = {} must lie in (0, 2]",
                self.mu
            )));
        }
        if self.coeffs.is_empty() {
            return Err(Error::Parameter("series needs at least one coefficient".into()));
        }
        if let Some(c) = self.coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Parameter(format!("series coefficient {c} is not finite")));
        }
        Ok(())
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// |a_N / a_{N-1}| for the last two coefficients, a rough indicator of
    /// how fast the solved series decays.
    pub fn tail_ratio(&self) -> Option<f64> {
        let n = self.coeffs.len();
        if n < 2 || self.coeffs[n - 2] == 0.0 {
            return None;
        }
        Some((self.coeffs[n - 1] / self.coeffs[n - 2]).abs())
    }

    /// Truncated sum at t > 0.
    pub fn evaluate(&self, t: f64) -> f64 {
        let poly = self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c);
        t.powf(self.mu - 1.0) * recip_gamma(self.mu) * poly
    }
}

/// Logs of Pochhammer symbols (x)_m for m = 0..len.
fn log_pochhammer(x: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for m in 0..len {
        out.push(acc);
        acc += (x + m as f64).ln();
    }
    out
}

/// Weights W(n, k) = Γ(A+n-k)Γ(B+k)Γ(A+B) / (Γ(A)Γ(B)Γ(A+B+n)) that turn
/// the product of two power series into the series of their convolution.
struct ConvolutionWeights {
    la: Vec<f64>,
    lb: Vec<f64>,
    lab: Vec<f64>,
}

impl ConvolutionWeights {
    fn new(a: f64, b: f64, len: usize) -> Self {
        ConvolutionWeights {
            la: log_pochhammer(a, len),
            lb: log_pochhammer(b, len),
            lab: log_pochhammer(a + b, len),
        }
    }

    fn get(&self, n: usize, k: usize) -> f64 {
        let e = self.la[n - k] + self.lb[k] - self.lab[n];
        if e == 0.0 {
            1.0
        } else {
            e.exp()
        }
    }
}

fn result_len(a: &KernelSeries, b: &KernelSeries) -> usize {
    let full = a.coeffs.len() + b.coeffs.len() - 1;
    match a.truncation.min(b.truncation) {
        Truncation::Exact => full,
        Truncation::Terms(n) => n.min(full).max(1),
    }
}

/// Series of the Laplace convolution a * b.
pub fn series_convolve(a: &KernelSeries, b: &KernelSeries) -> Result<KernelSeries> {
    let mu = a.mu + b.mu;
    if mu > MAX_ORDER {
        return Err(Error::OrderOverflow(mu));
    }
    let len = result_len(a, b);
    let w = ConvolutionWeights::new(a.mu, b.mu, len);
    let get = |c: &[f64], i: usize| c.get(i).copied().unwrap_or(0.0);
    let coeffs = (0..len)
        .map(|n| {
            (0..=n)
                .map(|k| w.get(n, k) * get(&a.coeffs, n - k) * get(&b.coeffs, k))
                .sum()
        })
        .collect();
    Ok(KernelSeries {
        mu,
        coeffs,
        truncation: a.truncation.min(b.truncation),
    })
}

/// Partner k of κ with (κ * k)(t) = 1: order 1 - μ, coefficients solved by
/// forward substitution. Uses the κ coefficient count, or
/// [`DEFAULT_TERMS`] for a polynomial κ.
pub fn solve_associated_pair(kappa: &KernelSeries) -> Result<KernelSeries> {
    let n = match kappa.truncation {
        Truncation::Exact if kappa.coeffs.len() == 1 => 1,
        Truncation::Exact => DEFAULT_TERMS.max(kappa.coeffs.len()),
        Truncation::Terms(n) => n,
    };
    solve_associated_pair_with(kappa, n)
}

/// As [`solve_associated_pair`] with an explicit number of coefficients.
pub fn solve_associated_pair_with(kappa: &KernelSeries, terms: usize) -> Result<KernelSeries> {
    if !(kappa.mu > 0.0 && kappa.mu < 1.0) {
        return Err(Error::Parameter(format!(
            "associated kernel needs 0 < mu < 1 (got {})",
            kappa.mu
        )));
    }
    let a = &kappa.coeffs;
    if a[0] == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let terms = terms.max(1);
    let nu = 1.0 - kappa.mu;
    let w = ConvolutionWeights::new(kappa.mu, nu, terms);
    let get = |i: usize| a.get(i).copied().unwrap_or(0.0);
    let mut b = Vec::with_capacity(terms);
    b.push(1.0 / a[0]);
    for n in 1..terms {
        let s: f64 = (0..n).map(|k| w.get(n, k) * get(n - k) * b[k]).sum();
        b.push(-s / (w.get(n, n) * a[0]));
    }
    let truncation = if kappa.truncation == Truncation::Exact && a.len() == 1 {
        Truncation::Exact
    } else {
        Truncation::Terms(terms)
    };
    Ok(KernelSeries {
        mu: nu,
        coeffs: b,
        truncation,
    })
}

/// Third member k₂ of a triple with (κ * k₁ * k₂)(t) = 1.
pub fn solve_third_kernel(kappa: &KernelSeries, k1: &KernelSeries) -> Result<KernelSeries> {
    let mu = kappa.mu + k1.mu;
    if mu >= 1.0 {
        return Err(Error::OrderOverflow(mu));
    }
    if kappa.coeffs[0] == 0.0 || k1.coeffs[0] == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let g = series_convolve(kappa, k1)?;
    solve_associated_pair(&g)
}
