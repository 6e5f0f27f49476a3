//! Decomposition of a kernel into singular power terms t^e·r(t) with
//! smooth r, the form consumed by the Gauss–Jacobi convolution rules.

use super::Kernel;
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use crate::special::{bessel_regular_series, mittag_leffler, recip_gamma};

/// Argument beyond which Bessel brackets are summed by the slow
/// double-double series instead of the precomputed polynomial.
const BESSEL_POLY_REACH: f64 = 16.0;
/// Largest t^α at which the Mittag-Leffler polynomial is used.
const ML_POLY_REACH: f64 = 1.5;
/// The Mittag-Leffler kernel is split into exact power terms until the
/// remaining exponent reaches this value.
const ML_SMOOTH_EXPONENT: f64 = 3.0;
const TAIL_NODES: usize = 16;
const TAIL_DIRECT_LIMIT: f64 = 10.0;

/// One summand t^exponent · r(t) of a kernel.
#[derive(Debug, Clone)]
pub struct KernelTerm {
    exponent: f64,
    regular: Regular,
}

#[derive(Debug, Clone)]
enum Regular {
    Const(f64),
    Exp { scale: f64, rate: f64 },
    Poly(Vec<f64>),
    Bessel { nu: f64, sign: f64, scale: f64, poly: Vec<f64> },
    MlTail(MlTail),
    TemperedTail(TemperedTail),
}

#[derive(Debug, Clone)]
struct MlTail {
    alpha: f64,
    beta: f64,
    split: usize,
    // 1/Γ(αj + β) for all j
    coeffs: Vec<f64>,
}

#[derive(Debug, Clone)]
struct TemperedTail {
    alpha: f64,
    rho: f64,
    scale: f64,
    jacobi: GaussRule,
    legendre: GaussRule,
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

impl MlTail {
    fn poly(&self, z: f64, from: usize) -> f64 {
        horner(&self.coeffs[from..], -z)
    }

    fn head(&self, t: f64) -> f64 {
        (0..self.split)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * self.coeffs[j] * t.powf(self.beta - 1.0 + self.alpha * j as f64)
            })
            .sum()
    }

    fn value(&self, t: f64) -> Result<f64> {
        let z = t.powf(self.alpha);
        if z <= ML_POLY_REACH {
            Ok(t.powf(self.beta - 1.0) * self.poly(z, 0))
        } else {
            Ok(t.powf(self.beta - 1.0) * mittag_leffler(self.alpha, self.beta, -z)?)
        }
    }

    fn tail(&self, t: f64) -> f64 {
        let z = t.powf(self.alpha);
        if z <= ML_POLY_REACH {
            let zs = (-z).powi(self.split as i32);
            t.powf(self.beta - 1.0) * zs * self.poly(z, self.split)
        } else {
            self.value(t).map_or(f64::NAN, |v| v - self.head(t))
        }
    }
}

impl TemperedTail {
    /// scale · ∫₀¹ u^(-α) e^(-ρtu) du
    fn eval(&self, t: f64) -> f64 {
        let c = self.rho * t;
        if c <= TAIL_DIRECT_LIMIT {
            let sum: f64 = self
                .jacobi
                .on_interval(0.0, 1.0)
                .map(|(u, w)| w * (-c * u).exp())
                .sum();
            return self.scale * sum;
        }
        let s = TAIL_DIRECT_LIMIT / c;
        let mut sum: f64 = self
            .jacobi
            .on_interval(0.0, s)
            .map(|(u, w)| w * (-c * u).exp())
            .sum();
        // beyond u = 4.2 s the integrand is below e^-42
        let end = (4.2 * s).min(1.0);
        let mut lo = s;
        while lo < end {
            let hi = (lo + s).min(end);
            sum += self
                .legendre
                .on_interval(lo, hi)
                .map(|(u, w)| w * u.powf(-self.alpha) * (-c * u).exp())
                .sum::<f64>();
            lo = hi;
        }
        self.scale * sum
    }
}

impl KernelTerm {
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// The smooth factor r(t).
    pub fn regular(&self, t: f64) -> f64 {
        match &self.regular {
            Regular::Const(c) => *c,
            Regular::Exp { scale, rate } => scale * (-rate * t).exp(),
            Regular::Poly(c) => horner(c, t),
            Regular::Bessel { nu, sign, scale, poly } => {
                if t <= BESSEL_POLY_REACH {
                    scale * horner(poly, t)
                } else {
                    scale * bessel_regular_series(*nu, t, *sign)
                }
            }
            Regular::MlTail(m) => m.tail(t),
            Regular::TemperedTail(tt) => tt.eval(t),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if self.exponent == 0.0 {
            self.regular(t)
        } else {
            t.powf(self.exponent) * self.regular(t)
        }
    }
}

fn bessel_poly(nu: f64, sign: f64) -> Vec<f64> {
    let mut c = vec![1.0];
    let mut a = 1.0f64;
    for m in 0..80 {
        a *= sign / ((m + 1) as f64 * (nu + 1.0 + m as f64));
        c.push(a);
        if a.abs() * BESSEL_POLY_REACH.powi(m + 1) < 1e-19 {
            break;
        }
    }
    c
}

fn term(exponent: f64, regular: Regular) -> KernelTerm {
    KernelTerm { exponent, regular }
}

/// A kernel ready for repeated evaluation: coefficient tables and
/// quadrature rules are built once.
#[derive(Debug, Clone)]
pub struct PreparedKernel {
    terms: Vec<KernelTerm>,
    ml: Option<MlTail>,
}

impl PreparedKernel {
    pub fn new(kernel: &Kernel) -> Result<Self> {
        let mut ml = None;
        let terms = match kernel {
            Kernel::H0 => return Err(Error::NotEvaluable),
            Kernel::H1 => vec![term(0.0, Regular::Const(1.0))],
            Kernel::PowerLaw { alpha } => {
                vec![term(alpha - 1.0, Regular::Const(recip_gamma(*alpha)))]
            }
            Kernel::Tempered { alpha, rho } => vec![term(
                alpha - 1.0,
                Regular::Exp {
                    scale: recip_gamma(*alpha),
                    rate: *rho,
                },
            )],
            Kernel::TemperedAssociated { alpha, rho } => {
                let scale = recip_gamma(1.0 - alpha);
                let mut terms = vec![term(-alpha, Regular::Exp { scale, rate: *rho })];
                if *rho > 0.0 {
                    terms.push(term(
                        1.0 - alpha,
                        Regular::TemperedTail(TemperedTail {
                            alpha: *alpha,
                            rho: *rho,
                            scale: rho * scale,
                            jacobi: GaussRule::jacobi(TAIL_NODES, 0.0, -alpha),
                            legendre: GaussRule::legendre(TAIL_NODES),
                        }),
                    ));
                }
                terms
            }
            Kernel::BesselKappa { alpha } => vec![term(
                alpha - 1.0,
                Regular::Bessel {
                    nu: alpha - 1.0,
                    sign: -1.0,
                    scale: recip_gamma(*alpha),
                    poly: bessel_poly(alpha - 1.0, -1.0),
                },
            )],
            Kernel::BesselK { alpha } => vec![term(
                -alpha,
                Regular::Bessel {
                    nu: -alpha,
                    sign: 1.0,
                    scale: recip_gamma(1.0 - alpha),
                    poly: bessel_poly(-alpha, 1.0),
                },
            )],
            Kernel::MlKappa { alpha, beta } => vec![
                term(-beta, Regular::Const(recip_gamma(1.0 - beta))),
                term(alpha - beta, Regular::Const(recip_gamma(1.0 - beta + alpha))),
            ],
            Kernel::MlK { alpha, beta } => {
                let split = ((ML_SMOOTH_EXPONENT + 1.0 - beta) / alpha).ceil() as usize;
                let mut coeffs = Vec::new();
                for j in 0..2000 {
                    let c = recip_gamma(alpha * j as f64 + beta);
                    coeffs.push(c);
                    if j > split && c.abs() * ML_POLY_REACH.powi(j as i32) < 1e-19 {
                        break;
                    }
                }
                let tail = MlTail {
                    alpha: *alpha,
                    beta: *beta,
                    split,
                    coeffs,
                };
                let mut terms: Vec<KernelTerm> = (0..split)
                    .map(|j| {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        term(
                            beta - 1.0 + alpha * j as f64,
                            Regular::Const(sign * tail.coeffs[j]),
                        )
                    })
                    .collect();
                terms.push(term(0.0, Regular::MlTail(tail.clone())));
                ml = Some(tail);
                terms
            }
            Kernel::Series(s) => {
                let g = recip_gamma(s.mu());
                vec![term(
                    s.mu() - 1.0,
                    Regular::Poly(s.coeffs().iter().map(|c| c * g).collect()),
                )]
            }
        };
        Ok(PreparedKernel { terms, ml })
    }

    pub fn terms(&self) -> &[KernelTerm] {
        &self.terms
    }

    pub fn leading_exponent(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.exponent)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        let v = match &self.ml {
            Some(m) => m.value(t)?,
            None => self.terms.iter().map(|term| term.value(t)).sum(),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(t))
        }
    }
}
