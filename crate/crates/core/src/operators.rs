//! General fractional integral and derivatives built on [`convolve`].

use crate::error::{Error, Result};
use crate::kernel::{Kernel, PreparedKernel};
use crate::quadrature::{convolve, differentiate, Grid, GridFunction, Input};
use nalgebra::{Matrix3, Vector3};

/// Limits at the origin are accepted when two independent extrapolations
/// agree to this relative spread.
pub const EXTRAPOLATION_SPREAD: f64 = 1e-6;

/// An operator together with its kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    /// f ↦ κ * f
    Gfi { kappa: Kernel },
    /// f ↦ d/dt (k * f)
    GfdRl { k: Kernel },
    /// f ↦ k * f′
    GfdCaputo { k: Kernel },
    /// f ↦ k₁ * d/dt (k₂ * f)
    Gfd1l { k1: Kernel, k2: Kernel },
    /// Hilfer derivative of order α and type γ
    Hilfer { alpha: f64, gamma: f64 },
    /// Riemann–Liouville integral of order α ≥ 0
    RlIntegral { alpha: f64 },
}

impl OperatorSpec {
    pub fn apply(&self, f: Input<'_>, grid: &Grid) -> Result<GridFunction> {
        match self {
            OperatorSpec::Gfi { kappa } => apply_gfi(kappa, f, grid),
            OperatorSpec::GfdRl { k } => apply_gfd_rl(k, f, grid),
            OperatorSpec::GfdCaputo { k } => apply_gfd_caputo(k, f, grid),
            OperatorSpec::Gfd1l { k1, k2 } => apply_gfd_1l(k1, k2, f, grid),
            OperatorSpec::Hilfer { alpha, gamma } => apply_hilfer(*alpha, *gamma, f, grid),
            OperatorSpec::RlIntegral { alpha } => {
                if *alpha == 0.0 {
                    apply_gfi(&Kernel::H0, f, grid)
                } else if *alpha > 0.0 {
                    apply_gfi(&Kernel::power_law(*alpha)?, f, grid)
                } else {
                    Err(Error::Parameter(format!("integral order {alpha} must be >= 0")))
                }
            }
        }
    }
}

/// General fractional integral κ * f; `H0` returns f.
pub fn apply_gfi(kappa: &Kernel, f: Input<'_>, grid: &Grid) -> Result<GridFunction> {
    convolve(kappa, f, grid)
}

fn samples(f: Input<'_>, grid: &Grid) -> Result<GridFunction> {
    convolve(&Kernel::H0, f, grid)
}

/// f′ on the grid, exact when the derivative is known.
fn derivative(f: Input<'_>, grid: &Grid) -> Result<GridFunction> {
    match f {
        Input::Function(tf) => match tf.derivative() {
            Some(d) => d.sample(grid),
            None => differentiate(&tf.sample(grid)?),
        },
        _ => differentiate(&samples(f, grid)?),
    }
}

/// Riemann–Liouville type derivative d/dt (k * f).
///
/// With f′ known the result is assembled as f(0)·k + k * f′; otherwise the
/// convolution is differentiated numerically.
pub fn apply_gfd_rl(k: &Kernel, f: Input<'_>, grid: &Grid) -> Result<GridFunction> {
    if k.is_h0() {
        return derivative(f, grid);
    }
    if let Input::Function(tf) = f {
        if let Some(df) = tf.derivative() {
            let p = tf.exponent();
            if p > 0.0 {
                // f(0) = 0
                return convolve(k, Input::Function(&df), grid);
            }
            if p == 0.0 {
                let f0 = tf.value_at_zero().ok_or(Error::MissingInitialValue)?;
                let conv = convolve(k, Input::Function(&df), grid)?;
                if f0 == 0.0 {
                    return Ok(conv);
                }
                let kv = convolve(&Kernel::H0, Input::Kernel(k), grid)?;
                return conv.combine(1.0, &kv, f0);
            }
        }
    }
    differentiate(&convolve(k, f, grid)?)
}

/// Caputo type derivative k * f′.
pub fn apply_gfd_caputo(k: &Kernel, f: Input<'_>, grid: &Grid) -> Result<GridFunction> {
    if let Input::Function(tf) = f {
        let d = tf.derivative().ok_or(Error::MissingDerivative)?;
        return convolve(k, Input::Function(&d), grid);
    }
    let df = derivative(f, grid)?;
    convolve(k, Input::Samples(&df), grid)
}

/// 1st level derivative k₁ * d/dt (k₂ * f). `k1 = H0` gives the RL type,
/// `k2 = H0` the Caputo type.
pub fn apply_gfd_1l(k1: &Kernel, k2: &Kernel, f: Input<'_>, grid: &Grid) -> Result<GridFunction> {
    if k1.is_h0() {
        return apply_gfd_rl(k2, f, grid);
    }
    if k2.is_h0() {
        return apply_gfd_caputo(k1, f, grid);
    }
    let inner = apply_gfd_rl(k2, f, grid)?;
    convolve(k1, Input::Samples(&inner), grid)
}

/// Kernels (k₁, k₂) of the Hilfer derivative, H0 at the closed ends.
pub fn hilfer_kernels(alpha: f64, gamma: f64) -> Result<(Kernel, Kernel)> {
    if !(alpha > 0.0 && alpha < 1.0) || !(gamma >= 0.0 && gamma <= 1.0 - alpha) {
        return Err(Error::Parameter(format!(
            "Hilfer derivative needs 0 < alpha < 1 and 0 <= gamma <= 1 - alpha (got {alpha}, {gamma})"
        )));
    }
    let k1 = if gamma == 0.0 {
        Kernel::H0
    } else {
        Kernel::power_law(gamma)?
    };
    let rest = 1.0 - alpha - gamma;
    let k2 = if rest <= 0.0 {
        Kernel::H0
    } else {
        Kernel::power_law(rest)?
    };
    Ok((k1, k2))
}

pub fn apply_hilfer(alpha: f64, gamma: f64, f: Input<'_>, grid: &Grid) -> Result<GridFunction> {
    let (k1, k2) = hilfer_kernels(alpha, gamma)?;
    apply_gfd_1l(&k1, &k2, f, grid)
}

fn input_exponents(f: Input<'_>) -> Result<Vec<f64>> {
    Ok(match f {
        Input::Function(tf) => vec![tf.exponent()],
        Input::Samples(g) => vec![g.exponent()],
        Input::Kernel(k) => PreparedKernel::new(k)?
            .terms()
            .iter()
            .map(|t| t.exponent())
            .collect(),
    })
}

/// Fits c₀ + c₁ t^d₁ + c₂ t^d₂ through three points and returns c₀.
fn fit_constant(ts: &[f64], vs: &[f64], d: [f64; 2]) -> Option<f64> {
    let m = Matrix3::from_fn(|r, c| if c == 0 { 1.0 } else { ts[r].powf(d[c - 1]) });
    let v = Vector3::new(vs[0], vs[1], vs[2]);
    m.lu().solve(&v).map(|x| x[0])
}

/// Limit of g at the origin from its first samples.
fn limit_at_origin(g: &GridFunction, steps: &[f64]) -> Result<f64> {
    let p = g.exponent();
    if p > 0.0 {
        return Ok(0.0);
    }
    if p < 0.0 {
        return Err(Error::ExtrapolationUnstable { spread: f64::INFINITY });
    }
    let ts = g.grid().nodes();
    let vs = g.regular();
    let d = [steps[0], steps[1]];
    let a = fit_constant(&ts[0..3], &vs[0..3], d);
    let b = fit_constant(&ts[1..4], &vs[1..4], d);
    match (a, b) {
        (Some(a), Some(b)) => {
            let spread = (a - b).abs() / a.abs().max(1.0);
            if spread <= EXTRAPOLATION_SPREAD {
                Ok(a)
            } else {
                Err(Error::ExtrapolationUnstable { spread })
            }
        }
        _ => Err(Error::ExtrapolationUnstable { spread: f64::NAN }),
    }
}

/// Two smallest positive exponents in the expansion of k * f at 0, relative
/// to its leading power.
fn expansion_steps(k: &Kernel, f: Input<'_>) -> Result<Vec<f64>> {
    let ke: Vec<f64> = PreparedKernel::new(k)?
        .terms()
        .iter()
        .map(|t| t.exponent())
        .collect();
    let fe = input_exponents(f)?;
    let kmin = ke.iter().copied().fold(f64::INFINITY, f64::min);
    let fmin = fe.iter().copied().fold(f64::INFINITY, f64::min);
    let mut steps = Vec::new();
    for e in &ke {
        for p in &fe {
            for j in 0..3 {
                let s = (e - kmin) + (p - fmin) + j as f64;
                if s > 1e-12 && !steps.iter().any(|x: &f64| (x - s).abs() < 1e-12) {
                    steps.push(s);
                }
            }
        }
    }
    steps.sort_by(f64::total_cmp);
    steps.truncate(2);
    Ok(steps)
}

/// (I_{k₂} f)(0), the constant in the projector of the 1st level
/// derivative; f(0) when `k2 = H0`.
pub fn initial_value(k2: &Kernel, f: Input<'_>, grid: &Grid) -> Result<f64> {
    if k2.is_h0() {
        if let Input::Function(tf) = f {
            if let Some(v) = tf.value_at_zero() {
                return Ok(v);
            }
        }
        let s = samples(f, grid)?;
        return limit_at_origin(&s, &[1.0, 2.0]);
    }
    let g = convolve(k2, f, grid)?;
    let steps = expansion_steps(k2, f)?;
    limit_at_origin(&g, &steps)
}

/// Projector (I_{k₂} f)(0)·(k₁ * κ)(t) of the 1st level derivative.
pub fn projector_1l(
    k1: &Kernel,
    k2: &Kernel,
    kappa: &Kernel,
    f: Input<'_>,
    grid: &Grid,
) -> Result<GridFunction> {
    let c = initial_value(k2, f, grid)?;
    let shape = if k1.is_h0() || kappa.is_h0() {
        let k = if k1.is_h0() { kappa } else { k1 };
        convolve(&Kernel::H0, Input::Kernel(k), grid)?
    } else {
        convolve(k1, Input::Kernel(kappa), grid)?
    };
    Ok(shape.scale(c))
}
