use super::{Kernel, PreparedKernel};
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

const SINGULAR_NODES: usize = 24;
const PANEL_NODES: usize = 16;
/// Largest panel end, in units of 1/p, before the integral is declared
/// divergent.
const MAX_HORIZON: f64 = 4000.0;
const TAIL_TOLERANCE: f64 = 1e-12;

/// Laplace transform ∫₀^∞ e^(-pt) k(t) dt.
///
/// Closed forms are used for power-law, tempered, Mittag-Leffler κ,
/// series-free degenerate kernels and polynomial series; everything else
/// is integrated numerically.
pub fn laplace_transform(kernel: &Kernel, p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Parameter(format!("Laplace variable p = {p} must be > 0")));
    }
    match kernel {
        Kernel::H0 => Ok(1.0),
        Kernel::H1 => Ok(1.0 / p),
        Kernel::PowerLaw { alpha } => Ok(p.powf(-alpha)),
        Kernel::Tempered { alpha, rho } => Ok((p + rho).powf(-alpha)),
        Kernel::MlKappa { alpha, beta } => Ok(p.powf(beta - alpha - 1.0) + p.powf(beta - 1.0)),
        Kernel::Series(s) if s.truncation() == super::Truncation::Exact => {
            // Σ aₖ Γ(μ+k)/Γ(μ) p^(-μ-k)
            let mut acc = 0.0;
            let mut ratio = 1.0;
            for (k, c) in s.coeffs().iter().enumerate() {
                acc += c * ratio * p.powf(-s.mu() - k as f64);
                ratio *= s.mu() + k as f64;
            }
            Ok(acc)
        }
        _ => numeric(kernel, p),
    }
}

fn numeric(kernel: &Kernel, p: f64) -> Result<f64> {
    let prepared = PreparedKernel::new(kernel)?;
    let first = (1.0 / p).min(1.0);
    let mut acc = 0.0;
    for term in prepared.terms() {
        let rule = GaussRule::jacobi(SINGULAR_NODES, 0.0, term.exponent());
        acc += rule
            .on_interval(0.0, first)
            .map(|(t, w)| w * term.regular(t) * (-p * t).exp())
            .sum::<f64>();
    }
    let legendre = GaussRule::legendre(PANEL_NODES);
    let width = 1.0 / p;
    let mut lo = first;
    loop {
        let hi = lo + width;
        let mut panel = 0.0;
        for (t, w) in legendre.on_interval(lo, hi) {
            panel += w * prepared.value(t)? * (-p * t).exp();
        }
        acc += panel;
        let tail = prepared.value(hi)?.abs() * (-p * hi).exp() / p;
        if p * hi > 40.0 && tail <= 1e-17 * acc.abs().max(1e-300) {
            break;
        }
        if p * hi > MAX_HORIZON {
            if tail > TAIL_TOLERANCE {
                return Err(Error::Divergent { tail });
            }
            break;
        }
        lo = hi;
    }
    if acc.is_finite() {
        Ok(acc)
    } else {
        Err(Error::Divergent { tail: acc })
    }
}
