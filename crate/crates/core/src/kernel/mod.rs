//! Kernels of class C₋₁: the closed-form catalog, the degenerate kernels
//! h₀ and h₁, and power-series kernels.

mod laplace;
mod series;
mod terms;

pub use laplace::laplace_transform;
pub use series::{
    series_convolve, solve_associated_pair, solve_associated_pair_with, solve_third_kernel,
    KernelSeries, Truncation, DEFAULT_TERMS,
};
pub use terms::{KernelTerm, PreparedKernel};

use crate::error::{Error, Result};
use crate::special::{bessel_i, bessel_j, mittag_leffler, recip_gamma};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A convolution kernel.
///
/// Every variant except [`Kernel::H0`] is an ordinary function on t > 0 of
/// the form t^p·(continuous part) with p > -1. `H0` is the generalized
/// identity kernel: it only acts at operator level, where convolving with
/// it returns the other operand unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    /// h_α(t) = t^(α-1)/Γ(α)
    #[serde(rename = "powerlaw")]
    PowerLaw { alpha: f64 },
    /// h_{α,ρ}(t) = t^(α-1) e^(-ρt)/Γ(α)
    Tempered { alpha: f64, rho: f64 },
    /// h_{1-α,ρ}(t) + ρ ∫₀ᵗ h_{1-α,ρ}(τ) dτ, the partner of `Tempered`
    #[serde(rename = "tempered_assoc")]
    TemperedAssociated { alpha: f64, rho: f64 },
    /// (√t)^(α-1) J_{α-1}(2√t)
    BesselKappa { alpha: f64 },
    /// (√t)^(-α) I_{-α}(2√t)
    BesselK { alpha: f64 },
    /// h_{1-β+α}(t) + h_{1-β}(t)
    MlKappa { alpha: f64, beta: f64 },
    /// t^(β-1) E_{α,β}(-t^α)
    MlK { alpha: f64, beta: f64 },
    H0,
    H1,
    Series(KernelSeries),
}

fn in_open_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

impl Kernel {
    pub fn power_law(alpha: f64) -> Result<Self> {
        Kernel::PowerLaw { alpha }.validated()
    }

    pub fn tempered(alpha: f64, rho: f64) -> Result<Self> {
        Kernel::Tempered { alpha, rho }.validated()
    }

    pub fn tempered_associated(alpha: f64, rho: f64) -> Result<Self> {
        Kernel::TemperedAssociated { alpha, rho }.validated()
    }

    pub fn bessel_kappa(alpha: f64) -> Result<Self> {
        Kernel::BesselKappa { alpha }.validated()
    }

    pub fn bessel_k(alpha: f64) -> Result<Self> {
        Kernel::BesselK { alpha }.validated()
    }

    pub fn ml_kappa(alpha: f64, beta: f64) -> Result<Self> {
        Kernel::MlKappa { alpha, beta }.validated()
    }

    pub fn ml_k(alpha: f64, beta: f64) -> Result<Self> {
        Kernel::MlK { alpha, beta }.validated()
    }

    /// Checks the parameter ranges of the variant and returns it unchanged.
    pub fn validated(self) -> Result<Self> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        match &self {
            Kernel::PowerLaw { alpha } if !(*alpha > 0.0 && alpha.is_finite()) => {
                bad(format!("powerlaw alpha = {alpha} must be > 0"))
            }
            Kernel::Tempered { alpha, rho } if !(*alpha > 0.0 && alpha.is_finite()) || !(*rho >= 0.0 && rho.is_finite()) => {
                bad(format!("tempered needs alpha > 0, rho >= 0 (got {alpha}, {rho})"))
            }
            Kernel::TemperedAssociated { alpha, rho } if !in_open_unit(*alpha) || !(*rho >= 0.0 && rho.is_finite()) => {
                bad(format!("tempered_assoc needs 0 < alpha < 1, rho >= 0 (got {alpha}, {rho})"))
            }
            Kernel::BesselKappa { alpha } | Kernel::BesselK { alpha } if !in_open_unit(*alpha) => {
                bad(format!("Bessel kernels need 0 < alpha < 1 (got {alpha})"))
            }
            Kernel::MlKappa { alpha, beta } | Kernel::MlK { alpha, beta }
                if !(*alpha > 0.0 && alpha < beta && *beta < 1.0) =>
            {
                bad(format!("Mittag-Leffler kernels need 0 < alpha < beta < 1 (got {alpha}, {beta})"))
            }
            Kernel::Series(s) => {
                s.check()?;
                Ok(self)
            }
            _ => Ok(self),
        }
    }

    pub fn is_h0(&self) -> bool {
        matches!(self, Kernel::H0)
    }

    /// Pointwise value at t > 0.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Parameter(format!("kernel argument t = {t} must be > 0")));
        }
        let v = match *self {
            Kernel::H0 => return Err(Error::NotEvaluable),
            Kernel::H1 => 1.0,
            Kernel::PowerLaw { alpha } => t.powf(alpha - 1.0) * recip_gamma(alpha),
            Kernel::Tempered { alpha, rho } => {
                t.powf(alpha - 1.0) * (-rho * t).exp() * recip_gamma(alpha)
            }
            Kernel::BesselKappa { alpha } => {
                let s = t.sqrt();
                s.powf(alpha - 1.0) * bessel_j(alpha - 1.0, 2.0 * s)?
            }
            Kernel::BesselK { alpha } => {
                let s = t.sqrt();
                s.powf(-alpha) * bessel_i(-alpha, 2.0 * s)?
            }
            Kernel::MlKappa { alpha, beta } => {
                t.powf(alpha - beta) * recip_gamma(1.0 - beta + alpha)
                    + t.powf(-beta) * recip_gamma(1.0 - beta)
            }
            Kernel::MlK { alpha, beta } => {
                t.powf(beta - 1.0) * mittag_leffler(alpha, beta, -t.powf(alpha))?
            }
            Kernel::TemperedAssociated { .. } | Kernel::Series(_) => {
                return PreparedKernel::new(self)?.value(t);
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(t))
        }
    }

    /// Power-series form h_μ(t)·Σ aₖ tᵏ with `terms` coefficients, for the
    /// kernels that have one.
    pub fn to_series(&self, terms: usize) -> Result<KernelSeries> {
        let n = terms.max(1);
        match *self {
            Kernel::PowerLaw { alpha } if alpha <= 2.0 => KernelSeries::new(alpha, vec![1.0]),
            Kernel::H1 => KernelSeries::new(1.0, vec![1.0]),
            Kernel::Tempered { alpha, rho } if alpha <= 2.0 => {
                let mut c = Vec::with_capacity(n);
                let mut a = 1.0;
                for k in 0..n {
                    c.push(a);
                    a *= -rho / (k + 1) as f64;
                }
                KernelSeries::truncated(alpha, c)
            }
            Kernel::TemperedAssociated { alpha, rho } => {
                // e^{-ρt} + ρ t^α ∫₀ᵗ τ^{-α} e^{-ρτ} dτ, expanded
                let mut c = Vec::with_capacity(n);
                let mut fact = 1.0; // (-ρ)^k / k!
                for k in 0..n {
                    let tail = if k == 0 {
                        0.0
                    } else {
                        // ρ (-ρ)^{k-1} / ((k-1)! (k - α)) = -k·fact/(k - α)
                        -(k as f64) * fact / (k as f64 - alpha)
                    };
                    c.push(fact + tail);
                    fact *= -rho / (k + 1) as f64;
                }
                KernelSeries::truncated(1.0 - alpha, c)
            }
            Kernel::BesselKappa { alpha } => {
                // aₘ = (-1)^m Γ(α) / (m! Γ(α + m))
                let mut c = Vec::with_capacity(n);
                let mut a = 1.0;
                for m in 0..n {
                    c.push(a);
                    a *= -1.0 / ((m + 1) as f64 * (alpha + m as f64));
                }
                KernelSeries::truncated(alpha, c)
            }
            Kernel::BesselK { alpha } => {
                let nu = 1.0 - alpha;
                let mut c = Vec::with_capacity(n);
                let mut a = 1.0;
                for m in 0..n {
                    c.push(a);
                    a *= 1.0 / ((m + 1) as f64 * (nu + m as f64));
                }
                KernelSeries::truncated(nu, c)
            }
            Kernel::Series(ref s) => Ok(s.clone()),
            _ => Err(Error::NotSeries(self.to_string())),
        }
    }

    /// The kernel k with (self * k)(t) = 1, where it is known in closed form
    /// or can be solved for through the power series.
    pub fn sonin_partner(&self) -> Result<Kernel> {
        match *self {
            Kernel::H0 => Ok(Kernel::H1),
            Kernel::H1 => Ok(Kernel::H0),
            Kernel::PowerLaw { alpha } if alpha < 1.0 => Kernel::power_law(1.0 - alpha),
            Kernel::Tempered { alpha, rho } => Kernel::tempered_associated(alpha, rho),
            Kernel::TemperedAssociated { alpha, rho } => Kernel::tempered(alpha, rho),
            Kernel::BesselKappa { alpha } => Kernel::bessel_k(alpha),
            Kernel::BesselK { alpha } => Kernel::bessel_kappa(alpha),
            Kernel::MlKappa { alpha, beta } => Kernel::ml_k(alpha, beta),
            Kernel::MlK { alpha, beta } => Kernel::ml_kappa(alpha, beta),
            Kernel::Series(ref s) => Ok(Kernel::Series(solve_associated_pair(s)?)),
            Kernel::PowerLaw { .. } => Err(Error::Parameter(format!(
                "{self} has order >= 1 and no Sonin partner"
            ))),
        }
    }

    /// Short human-readable name; series kernels are summarized.
    pub fn label(&self) -> String {
        match self {
            Kernel::Series(s) => format!("series(mu={:.6}, {} terms)", s.mu(), s.coeffs().len()),
            _ => self.to_string(),
        }
    }

    /// Leading singular exponent p in kernel(t) ~ t^p at the origin.
    pub fn leading_exponent(&self) -> Result<f64> {
        Ok(PreparedKernel::new(self)?.leading_exponent())
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::PowerLaw { alpha } => write!(f, "powerlaw:{alpha}"),
            Kernel::Tempered { alpha, rho } => write!(f, "tempered:{alpha},{rho}"),
            Kernel::TemperedAssociated { alpha, rho } => write!(f, "tempered_assoc:{alpha},{rho}"),
            Kernel::BesselKappa { alpha } => write!(f, "bessel_kappa:{alpha}"),
            Kernel::BesselK { alpha } => write!(f, "bessel_k:{alpha}"),
            Kernel::MlKappa { alpha, beta } => write!(f, "ml_kappa:{alpha},{beta}"),
            Kernel::MlK { alpha, beta } => write!(f, "ml_k:{alpha},{beta}"),
            Kernel::H0 => write!(f, "h0"),
            Kernel::H1 => write!(f, "h1"),
            Kernel::Series(s) => {
                write!(f, "series:{}", s.mu())?;
                for c in s.coeffs() {
                    write!(f, ",{c}")?;
                }
                Ok(())
            }
        }
    }
}

/// A triple (κ, k₁, k₂) intended to satisfy (κ * k₁ * k₂)(t) = 1.
///
/// Construction does not prove the identity; `verify::check_triple` does,
/// and records the outcome here through [`KernelTriple::mark_verified`].
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTriple {
    pub kappa: Kernel,
    pub k1: Kernel,
    pub k2: Kernel,
    verified: Option<f64>,
}

impl KernelTriple {
    pub fn new(kappa: Kernel, k1: Kernel, k2: Kernel) -> Self {
        KernelTriple {
            kappa,
            k1,
            k2,
            verified: None,
        }
    }

    /// (h_α, h_γ, h_{1-α-γ}) with 0 < α < 1 and 0 < γ < 1 - α.
    pub fn power(alpha: f64, gamma: f64) -> Result<Self> {
        if !(in_open_unit(alpha) && gamma > 0.0 && gamma < 1.0 - alpha) {
            return Err(Error::Parameter(format!(
                "power triple needs 0 < alpha < 1 and 0 < gamma < 1 - alpha (got {alpha}, {gamma})"
            )));
        }
        Ok(Self::new(
            Kernel::power_law(alpha)?,
            Kernel::power_law(gamma)?,
            Kernel::power_law(1.0 - alpha - gamma)?,
        ))
    }

    /// Residual of the last successful check, if any.
    pub fn verified_residual(&self) -> Option<f64> {
        self.verified
    }

    pub fn is_verified(&self) -> bool {
        self.verified.is_some()
    }

    pub fn mark_verified(&mut self, max_residual: f64) {
        self.verified = Some(max_residual);
    }
}
