//! Laplace convolution (k * f)(t) = ∫₀ᵗ k(t - τ) f(τ) dτ on a graded mesh.
//!
//! For output node tᵢ the integral is split at the mesh nodes. The panel
//! touching τ = 0 carries the singularity of f and the panel touching
//! τ = tᵢ the singularity of k; both use Gauss–Jacobi rules whose weight is
//! exactly that power. Interior panels use Gauss–Legendre. Sampled inputs
//! are interpolated by local cubics in their regular part.

use super::function::is_nonneg_integer;
use super::{GaussRule, Grid, GridFunction, TestFunction};
use crate::error::{Error, Result};
use crate::kernel::{Kernel, PreparedKernel};

const SINGULAR_NODES: usize = 16;
const NEAR_NODES: usize = 16;
const FAR_NODES: usize = 8;
const DIFF_STENCIL: usize = 5;

/// Second operand of a convolution.
#[derive(Debug, Clone, Copy)]
pub enum Input<'a> {
    Function(&'a TestFunction),
    Samples(&'a GridFunction),
    Kernel(&'a Kernel),
}

enum Source<'a> {
    Function(&'a TestFunction),
    Samples(&'a GridFunction),
    Kernel(PreparedKernel),
}

impl Source<'_> {
    fn exponents(&self) -> Vec<f64> {
        match self {
            Source::Function(f) => vec![f.exponent()],
            Source::Samples(g) => vec![g.exponent()],
            Source::Kernel(k) => k.terms().iter().map(|t| t.exponent()).collect(),
        }
    }

    /// Regular factor of term l at τ in panel j.
    fn regular(&self, l: usize, j: usize, tau: f64) -> f64 {
        match self {
            Source::Function(f) => {
                let p = f.exponent();
                if p == 0.0 {
                    f.evaluate(tau)
                } else {
                    f.evaluate(tau) / tau.powf(p)
                }
            }
            Source::Samples(g) => g.interpolate_regular(j, tau),
            Source::Kernel(k) => k.terms()[l].regular(tau),
        }
    }

    fn value(&self, j: usize, tau: f64) -> Result<f64> {
        match self {
            Source::Function(f) => Ok(f.evaluate(tau)),
            Source::Samples(g) => {
                let r = g.interpolate_regular(j, tau);
                let p = g.exponent();
                Ok(if p == 0.0 { r } else { tau.powf(p) * r })
            }
            Source::Kernel(k) => k.value(tau),
        }
    }
}

fn output_exponent(q: f64) -> f64 {
    if is_nonneg_integer(q) {
        0.0
    } else {
        q
    }
}

fn finite(v: f64, t: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(t))
    }
}

/// Points (τ, t_hi - τ, w) of a rule mapped to [lo, hi].
fn mapped(rule: &GaussRule, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
    let half = 0.5 * (hi - lo);
    let scale = half.powf(rule.a + rule.b + 1.0);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(move |(&x, &w)| (lo + half * (1.0 + x), half * (1.0 - x), w * scale))
}

fn sample_kernel(kernel: &Kernel, grid: &Grid) -> Result<GridFunction> {
    let k = PreparedKernel::new(kernel)?;
    let p = output_exponent(k.leading_exponent());
    let values = grid
        .nodes()
        .iter()
        .map(|&t| k.value(t))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::from_values(grid.clone(), p, values)
}

fn sample_input(input: Input<'_>, grid: &Grid) -> Result<GridFunction> {
    match input {
        Input::Function(f) => f.sample(grid),
        Input::Samples(g) if g.grid() == grid => Ok(g.clone()),
        Input::Samples(_) => Err(Error::GridMismatch),
        Input::Kernel(k) => sample_kernel(k, grid),
    }
}

/// (kernel * input) at every node of `grid`.
///
/// `H0` acts as the identity; convolving `H0` with `H0` has no pointwise
/// meaning and is an error. Sampled inputs must live on `grid`.
pub fn convolve(kernel: &Kernel, input: Input<'_>, grid: &Grid) -> Result<GridFunction> {
    if let Input::Kernel(k) = input {
        if k.is_h0() {
            return match kernel {
                Kernel::H0 => Err(Error::NotEvaluable),
                _ => sample_kernel(kernel, grid),
            };
        }
    }
    if kernel.is_h0() {
        return sample_input(input, grid);
    }
    let source = match input {
        Input::Function(f) => Source::Function(f),
        Input::Samples(g) if g.grid() == grid => Source::Samples(g),
        Input::Samples(_) => return Err(Error::GridMismatch),
        Input::Kernel(k) => Source::Kernel(PreparedKernel::new(k)?),
    };
    let exps = source.exponents();
    if let Some(&p) = exps.iter().find(|&&p| !(p > -1.0)) {
        return Err(Error::NonIntegrable(p));
    }
    let k = PreparedKernel::new(kernel)?;
    let engine = Engine::new(&k, &source, grid);
    let values = if matches!(kernel, Kernel::H1) {
        engine.running_integral()?
    } else {
        (0..grid.len())
            .map(|i| engine.node(i))
            .collect::<Result<Vec<_>>>()?
    };
    let p_min = exps.iter().copied().fold(f64::INFINITY, f64::min);
    let q = output_exponent(k.leading_exponent() + 1.0 + p_min);
    GridFunction::from_values(grid.clone(), q, values)
}

/// ∫₀ᵗ f at every node.
pub fn cumulative_integral(f: &GridFunction) -> Result<GridFunction> {
    convolve(&Kernel::H1, Input::Samples(f), f.grid())
}

/// First derivative from five-point Lagrange stencils on the (nonuniform)
/// mesh, one-sided near the ends. A singular factor t^p is differentiated
/// exactly and only the regular part goes through the stencil.
pub fn differentiate(f: &GridFunction) -> Result<GridFunction> {
    let grid = f.grid();
    let n = grid.len();
    if n < super::grid::MIN_NODES {
        return Err(Error::GridTooCoarse(n));
    }
    let x = grid.nodes();
    let g = f.regular();
    let dg: Vec<f64> = (0..n)
        .map(|i| {
            let s = i.saturating_sub(DIFF_STENCIL / 2).min(n - DIFF_STENCIL);
            let idx = s..s + DIFF_STENCIL;
            let mut acc = 0.0;
            for k in idx.clone() {
                let w = if k == i {
                    idx.clone().filter(|&m| m != i).map(|m| 1.0 / (x[i] - x[m])).sum()
                } else {
                    let mut num = 1.0;
                    let mut den = 1.0;
                    for m in idx.clone().filter(|&m| m != k) {
                        if m != i {
                            num *= x[i] - x[m];
                        }
                        den *= x[k] - x[m];
                    }
                    num / den
                };
                acc += w * g[k];
            }
            acc
        })
        .collect();
    let p = f.exponent();
    if p == 0.0 {
        return GridFunction::new(grid.clone(), 0.0, dg);
    }
    if !(p > 0.0) {
        return Err(Error::NonIntegrable(p - 1.0));
    }
    let regular = (0..n).map(|i| p * g[i] + x[i] * dg[i]).collect();
    GridFunction::new(grid.clone(), p - 1.0, regular)
}

struct Engine<'a> {
    kernel: &'a PreparedKernel,
    source: &'a Source<'a>,
    grid: &'a Grid,
    near: GaussRule,
    far: GaussRule,
    /// Source values at the near/far rule points of every panel.
    near_vals: Vec<Vec<f64>>,
    far_vals: Vec<Vec<f64>>,
    /// Per source term: (τ, w, regular) on the first panel, weight τ^p.
    first: Vec<Vec<(f64, f64, f64)>>,
    /// Per kernel term: rule with weight (t - τ)^e.
    last_rules: Vec<GaussRule>,
    /// Per (kernel term, source term): rule for the first node.
    corner_rules: Vec<Vec<GaussRule>>,
}

impl<'a> Engine<'a> {
    fn new(kernel: &'a PreparedKernel, source: &'a Source<'a>, grid: &'a Grid) -> Self {
        let near = GaussRule::legendre(NEAR_NODES);
        let far = GaussRule::legendre(FAR_NODES);
        let n = grid.len();
        let panel_vals = |rule: &GaussRule| -> Vec<Vec<f64>> {
            (0..n)
                .map(|j| {
                    if j == 0 {
                        return Vec::new();
                    }
                    mapped(rule, grid.panel_start(j), grid.nodes()[j])
                        .map(|(tau, _, _)| source.value(j, tau).unwrap_or(f64::NAN))
                        .collect()
                })
                .collect()
        };
        let near_vals = panel_vals(&near);
        let far_vals = panel_vals(&far);
        let exps = source.exponents();
        let t1 = grid.nodes()[0];
        let first = exps
            .iter()
            .enumerate()
            .map(|(l, &p)| {
                let rule = GaussRule::jacobi(SINGULAR_NODES, 0.0, p);
                mapped(&rule, 0.0, t1)
                    .map(|(tau, _, w)| (tau, w, source.regular(l, 0, tau)))
                    .collect()
            })
            .collect();
        let kexps: Vec<f64> = kernel.terms().iter().map(|t| t.exponent()).collect();
        let last_rules = kexps
            .iter()
            .map(|&e| GaussRule::jacobi(SINGULAR_NODES, e, 0.0))
            .collect();
        let corner_rules = kexps
            .iter()
            .map(|&e| {
                exps.iter()
                    .map(|&p| GaussRule::jacobi(SINGULAR_NODES, e, p))
                    .collect()
            })
            .collect();
        Engine {
            kernel,
            source,
            grid,
            near,
            far,
            near_vals,
            far_vals,
            first,
            last_rules,
            corner_rules,
        }
    }

    fn node(&self, i: usize) -> Result<f64> {
        let t = self.grid.nodes()[i];
        if i == 0 {
            let mut acc = 0.0;
            for (m, term) in self.kernel.terms().iter().enumerate() {
                for (l, rule) in self.corner_rules[m].iter().enumerate() {
                    for (tau, d, w) in mapped(rule, 0.0, t) {
                        acc += w * term.regular(d) * self.source.regular(l, 0, tau);
                    }
                }
            }
            return finite(acc, t);
        }
        let mut acc = 0.0;
        for first in &self.first {
            for &(tau, w, g) in first {
                acc += w * self.kernel.value(t - tau)? * g;
            }
        }
        for j in 1..i {
            let near = j <= 2 || j + 2 >= i;
            let (rule, vals) = if near {
                (&self.near, &self.near_vals[j])
            } else {
                (&self.far, &self.far_vals[j])
            };
            let lo = self.grid.panel_start(j);
            let hi = self.grid.nodes()[j];
            for ((tau, _, w), f) in mapped(rule, lo, hi).zip(vals) {
                acc += w * self.kernel.value(t - tau)? * f;
            }
        }
        let lo = self.grid.panel_start(i);
        for (term, rule) in self.kernel.terms().iter().zip(&self.last_rules) {
            for (_, d, w) in mapped(rule, lo, t) {
                acc += w * term.regular(d) * self.source.value(i, t - d)?;
            }
        }
        finite(acc, t)
    }

    /// Convolution with the constant kernel: a running sum of panel
    /// integrals.
    fn running_integral(&self) -> Result<Vec<f64>> {
        let n = self.grid.len();
        let mut out = Vec::with_capacity(n);
        let mut acc: f64 = self
            .first
            .iter()
            .flat_map(|f| f.iter().map(|&(_, w, g)| w * g))
            .sum();
        out.push(finite(acc, self.grid.nodes()[0])?);
        for j in 1..n {
            let lo = self.grid.panel_start(j);
            let hi = self.grid.nodes()[j];
            acc += mapped(&self.near, lo, hi)
                .zip(&self.near_vals[j])
                .map(|((_, _, w), f)| w * f)
                .sum::<f64>();
            out.push(finite(acc, hi)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::recip_gamma;

    fn max_err(g: &GridFunction, want: impl Fn(f64) -> f64, from: f64) -> f64 {
        g.grid()
            .nodes()
            .iter()
            .enumerate()
            .filter(|(_, &t)| t >= from)
            .map(|(i, &t)| (g.value(i) - want(t)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn power_law_against_constant_and_linear() {
        let grid = Grid::new(512, 2.0, 2.0).unwrap();
        let k = Kernel::power_law(0.5).unwrap();
        let one = convolve(&k, Input::Function(&TestFunction::constant(1.0)), &grid).unwrap();
        let e = max_err(&one, |t| t.sqrt() * recip_gamma(1.5), 0.0);
        assert!(e < 1e-13, "{e}");
        let lin = convolve(&k, Input::Function(&TestFunction::monomial(1.0, 1)), &grid).unwrap();
        let e = max_err(&lin, |t| t.powf(1.5) * recip_gamma(2.5), 0.0);
        assert!(e < 1e-13, "{e}");
    }

    #[test]
    fn h0_is_identity_and_h1_integrates() {
        let grid = Grid::new(64, 2.0, 2.0).unwrap();
        let f = TestFunction::exp();
        let same = convolve(&Kernel::H0, Input::Function(&f), &grid).unwrap();
        assert_eq!(same, f.sample(&grid).unwrap());
        assert_eq!(
            convolve(&Kernel::H0, Input::Kernel(&Kernel::H0), &grid),
            Err(Error::NotEvaluable)
        );
        let fine = Grid::new(512, 2.0, 2.0).unwrap();
        let s = cumulative_integral(&f.sample(&fine).unwrap()).unwrap();
        assert!(max_err(&s, |t| t.exp() - 1.0, 0.0) < 1e-8);
        let h = TestFunction::power_law(0.5).sample(&grid).unwrap();
        let s = cumulative_integral(&h).unwrap();
        assert!(max_err(&s, |t| t.sqrt() * recip_gamma(1.5), 0.0) < 1e-12);
    }

    #[test]
    fn bessel_pair_is_sonin() {
        let grid = Grid::new(128, 2.0, 2.0).unwrap();
        let kappa = Kernel::bessel_kappa(0.5).unwrap();
        let k = Kernel::bessel_k(0.5).unwrap();
        let one = convolve(&kappa, Input::Kernel(&k), &grid).unwrap();
        assert!(max_err(&one, |_| 1.0, 0.05) < 1e-6);
    }

    #[test]
    fn differentiation() {
        let grid = Grid::new(64, 2.0, 2.0).unwrap();
        let sq = TestFunction::monomial(1.0, 2).sample(&grid).unwrap();
        assert!(max_err(&differentiate(&sq).unwrap(), |t| 2.0 * t, 0.0) < 1e-10);
        let fine = Grid::new(1024, 1.0, 2.0).unwrap();
        let s = TestFunction::new(f64::sin).sample(&fine).unwrap();
        assert!(max_err(&differentiate(&s).unwrap(), f64::cos, 0.0) < 1e-5);
        let h = TestFunction::power_law(1.5).sample(&grid).unwrap();
        let d = differentiate(&h).unwrap();
        assert!((d.exponent() + 0.5).abs() < 1e-15);
        assert!(max_err(&d, |t| t.powf(-0.5) * recip_gamma(0.5), 0.0) < 1e-12);
    }
}
