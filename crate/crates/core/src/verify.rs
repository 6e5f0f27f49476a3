//! Residual checks of the kernel identities and the fundamental theorems.
//!
//! Every check samples a residual r(t) on a grid and reports its maximum
//! and root-mean-square over the window t ∈ [w·T, T] (w = 0.05 by
//! default). Nodes closer to the origin are reported separately.

use crate::error::{Error, Result};
use crate::kernel::{
    laplace_transform, solve_third_kernel, Kernel, KernelTriple, DEFAULT_TERMS,
};
use crate::operators::{apply_gfd_1l, apply_gfi, projector_1l};
use crate::quadrature::{convolve, Grid, GridFunction, Input, TestFunction};
use std::fmt;
use std::io::Write;

pub const DEFAULT_WINDOW: f64 = 0.05;
/// Tolerance for identities between power-law kernels.
pub const TOL_POWER: f64 = 1e-8;
/// Tolerance for identities involving transcendental kernels.
pub const TOL_TRANSCENDENTAL: f64 = 1e-6;
/// Tolerance for the composed-operator theorems.
pub const TOL_THEOREM: f64 = 1e-4;
pub const LAPLACE_POINTS: [f64; 3] = [1.0, 2.0, 5.0];

/// Outcome of one check. `pass` holds exactly when `max_residual` is at
/// most `tolerance`; a check that could not be computed carries an
/// infinite residual and the error in `notes`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub name: String,
    pub tolerance: f64,
    pub max_residual: f64,
    pub rms_residual: f64,
    pub nodes_evaluated: usize,
    /// Largest residual at nodes left of the window, if any.
    pub near_origin_max: Option<f64>,
    pub pass: bool,
    pub notes: Vec<String>,
    /// (t, residual) at every evaluated point, window or not.
    pub residuals: Vec<(f64, f64)>,
}

impl ResidualReport {
    fn failed(name: &str, tolerance: f64, err: &Error) -> Self {
        ResidualReport {
            name: name.to_string(),
            tolerance,
            max_residual: f64::INFINITY,
            rms_residual: f64::INFINITY,
            nodes_evaluated: 0,
            near_origin_max: None,
            pass: false,
            notes: vec![format!("{}: {err}", err.code())],
            residuals: Vec::new(),
        }
    }

    fn from_points(name: &str, tolerance: f64, points: Vec<(f64, f64)>, start: f64) -> Self {
        let mut max = 0.0f64;
        let mut sq = 0.0;
        let mut count = 0;
        let mut near: Option<f64> = None;
        for &(t, r) in &points {
            let a = if r.is_nan() { f64::INFINITY } else { r.abs() };
            if t >= start {
                max = max.max(a);
                sq += a * a;
                count += 1;
            } else {
                near = Some(near.map_or(a, |m| m.max(a)));
            }
        }
        let rms = if count > 0 { (sq / count as f64).sqrt() } else { 0.0 };
        ResidualReport {
            name: name.to_string(),
            tolerance,
            max_residual: max,
            rms_residual: rms,
            nodes_evaluated: count,
            near_origin_max: near,
            pass: max <= tolerance,
            notes: Vec::new(),
            residuals: points,
        }
    }

    fn from_grid(
        name: &str,
        tolerance: f64,
        residual: Result<GridFunction>,
        window: f64,
    ) -> Self {
        match residual {
            Ok(r) => {
                let grid = r.grid();
                let points = grid.nodes().iter().copied().zip(r.values()).collect();
                Self::from_points(name, tolerance, points, window * grid.horizon())
            }
            Err(e) => Self::failed(name, tolerance, &e),
        }
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    /// `t,residual` records of every evaluated point.
    pub fn write_residual_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Csv(e.to_string());
        writeln!(out, "t,residual").map_err(io)?;
        for (t, r) in &self.residuals {
            writeln!(out, "{t:.14e},{r:.14e}").map_err(io)?;
        }
        Ok(())
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} max={:.3e} rms={:.3e} tol={:.0e} nodes={} {}",
            self.name,
            self.max_residual,
            self.rms_residual,
            self.tolerance,
            self.nodes_evaluated,
            if self.pass { "pass" } else { "FAIL" }
        )?;
        for n in &self.notes {
            write!(f, " [{n}]")?;
        }
        Ok(())
    }
}

/// Structured text: one line per report.
pub fn format_reports(reports: &[ResidualReport]) -> String {
    reports.iter().map(|r| format!("{r}\n")).collect()
}

fn constant_minus(g: Result<GridFunction>, c: f64) -> Result<GridFunction> {
    let g = g?;
    let one = TestFunction::constant(c).sample(g.grid())?;
    g.sub(&one)
}

/// (κ * k)(t) - 1.
pub fn check_sonin_pair(kappa: &Kernel, k: &Kernel, grid: &Grid, tol: f64) -> ResidualReport {
    let name = format!("sonin {} * {}", kappa.label(), k.label());
    let r = constant_minus(convolve(kappa, Input::Kernel(k), grid), 1.0);
    ResidualReport::from_grid(&name, tol, r, DEFAULT_WINDOW)
}

fn triple_product(triple: &KernelTriple, grid: &Grid) -> Result<GridFunction> {
    let members: Vec<&Kernel> = [&triple.kappa, &triple.k1, &triple.k2]
        .into_iter()
        .filter(|k| !k.is_h0())
        .collect();
    match members.as_slice() {
        [] => Err(Error::NotEvaluable),
        [a] => convolve(&Kernel::H0, Input::Kernel(a), grid),
        [a, b] => convolve(a, Input::Kernel(b), grid),
        [a, b, c] => {
            let ab = convolve(a, Input::Kernel(b), grid)?;
            convolve(c, Input::Samples(&ab), grid)
        }
        _ => unreachable!(),
    }
}

/// (κ * k₁ * k₂)(t) - 1, with H0 members dropped.
pub fn check_triple(triple: &KernelTriple, grid: &Grid, tol: f64) -> ResidualReport {
    let name = format!("triple {} * {} * {}", triple.kappa.label(), triple.k1.label(), triple.k2.label());
    let r = constant_minus(triple_product(triple, grid), 1.0);
    ResidualReport::from_grid(&name, tol, r, DEFAULT_WINDOW)
}

/// 1st fundamental theorem: with f = k₁ * φ, the 1st level derivative of
/// κ * f returns f.
pub fn check_ft1(triple: &KernelTriple, phi: &TestFunction, grid: &Grid, tol: f64) -> ResidualReport {
    let name = format!("ft1 ({}, {}, {})", triple.kappa.label(), triple.k1.label(), triple.k2.label());
    let r = (|| {
        let f = apply_gfi(&triple.k1, Input::Function(phi), grid)?;
        let g = apply_gfi(&triple.kappa, Input::Samples(&f), grid)?;
        let d = apply_gfd_1l(&triple.k1, &triple.k2, Input::Samples(&g), grid)?;
        d.sub(&f)
    })();
    ResidualReport::from_grid(&name, tol, r, DEFAULT_WINDOW)
}

/// 2nd fundamental theorem: κ * (1st level derivative of f) equals f minus
/// the projector.
pub fn check_ft2(triple: &KernelTriple, f: &TestFunction, grid: &Grid, tol: f64) -> ResidualReport {
    let name = format!("ft2 ({}, {}, {})", triple.kappa.label(), triple.k1.label(), triple.k2.label());
    let r = (|| {
        let d = apply_gfd_1l(&triple.k1, &triple.k2, Input::Function(f), grid)?;
        let lhs = apply_gfi(&triple.kappa, Input::Samples(&d), grid)?;
        let proj = projector_1l(&triple.k1, &triple.k2, &triple.kappa, Input::Function(f), grid)?;
        let rhs = f.sample(grid)?.sub(&proj)?;
        lhs.sub(&rhs)
    })();
    ResidualReport::from_grid(&name, tol, r, DEFAULT_WINDOW)
}

/// h_α * (h_β * f) - h_{α+β} * f.
pub fn check_index_law(alpha: f64, beta: f64, f: &TestFunction, grid: &Grid, tol: f64) -> ResidualReport {
    let name = format!("index {alpha} + {beta}");
    let r = (|| {
        let a = Kernel::power_law(alpha)?;
        let b = Kernel::power_law(beta)?;
        let ab = Kernel::power_law(alpha + beta)?;
        let inner = convolve(&b, Input::Function(f), grid)?;
        let twice = convolve(&a, Input::Samples(&inner), grid)?;
        let once = convolve(&ab, Input::Function(f), grid)?;
        twice.sub(&once)
    })();
    ResidualReport::from_grid(&name, tol, r, DEFAULT_WINDOW)
}

/// κ̃(p)·k̃₁(p)·k̃₂(p) - 1/p at each p.
pub fn check_laplace_triple(triple: &KernelTriple, p_values: &[f64], tol: f64) -> ResidualReport {
    let name = format!("laplace ({}, {}, {})", triple.kappa.label(), triple.k1.label(), triple.k2.label());
    let points: Result<Vec<(f64, f64)>> = p_values
        .iter()
        .map(|&p| {
            let prod = laplace_transform(&triple.kappa, p)?
                * laplace_transform(&triple.k1, p)?
                * laplace_transform(&triple.k2, p)?;
            Ok((p, prod - 1.0 / p))
        })
        .collect();
    match points {
        Ok(points) => ResidualReport::from_points(&name, tol, points, f64::NEG_INFINITY),
        Err(e) => ResidualReport::failed(&name, tol, &e),
    }
}

/// What a [`CheckSpec`] checks.
#[derive(Debug, Clone)]
pub enum Check {
    SoninPair { kappa: Kernel, k: Kernel },
    Triple(KernelTriple),
    Ft1 { triple: KernelTriple, phi: TestFunction },
    Ft2 { triple: KernelTriple, f: TestFunction },
    IndexLaw { alpha: f64, beta: f64, f: TestFunction },
    LaplaceTriple { triple: KernelTriple, p_values: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct CheckSpec {
    pub name: String,
    pub tolerance: f64,
    pub grid: Grid,
    pub check: Check,
}

impl CheckSpec {
    pub fn new(name: impl Into<String>, tolerance: f64, grid: Grid, check: Check) -> Self {
        CheckSpec {
            name: name.into(),
            tolerance,
            grid,
            check,
        }
    }

    pub fn run(&self) -> ResidualReport {
        if !(self.tolerance > 0.0) {
            let e = Error::Parameter(format!("tolerance {} must be > 0", self.tolerance));
            return ResidualReport::failed(&self.name, self.tolerance, &e);
        }
        let (g, tol) = (&self.grid, self.tolerance);
        let mut report = match &self.check {
            Check::SoninPair { kappa, k } => check_sonin_pair(kappa, k, g, tol),
            Check::Triple(t) => check_triple(t, g, tol),
            Check::Ft1 { triple, phi } => check_ft1(triple, phi, g, tol),
            Check::Ft2 { triple, f } => check_ft2(triple, f, g, tol),
            Check::IndexLaw { alpha, beta, f } => check_index_law(*alpha, *beta, f, g, tol),
            Check::LaplaceTriple { triple, p_values } => check_laplace_triple(triple, p_values, tol),
        };
        let detail = std::mem::replace(&mut report.name, self.name.clone());
        report.note(detail)
    }
}

/// Runs every check in order. Failures, including computation errors, are
/// recorded in the reports; the run itself never stops early.
pub fn run_suite(specs: &[CheckSpec]) -> Vec<ResidualReport> {
    specs.iter().map(CheckSpec::run).collect()
}

fn power(alpha: f64) -> Kernel {
    Kernel::PowerLaw { alpha }
}

/// The shipped suite of fourteen checks on `grid`.
pub fn default_suite(grid: &Grid) -> Result<Vec<CheckSpec>> {
    let tempered_triple = {
        let kappa = Kernel::tempered(0.4, 1.0)?;
        let k1 = power(0.3);
        let k2 = solve_third_kernel(&kappa.to_series(DEFAULT_TERMS)?, &k1.to_series(1)?)?;
        KernelTriple::new(kappa, k1, Kernel::Series(k2))
    };
    let hilfer = KernelTriple::power(0.5, 0.25)?;
    let rl_pair = KernelTriple::new(power(0.6), Kernel::H0, power(0.4));
    let caputo_pair = KernelTriple::new(power(0.6), power(0.4), Kernel::H0);
    let spec = |name: &str, tol: f64, check: Check| CheckSpec::new(name, tol, grid.clone(), check);
    Ok(vec![
        spec("sonin-power", TOL_POWER, Check::SoninPair { kappa: power(0.3), k: power(0.7) }),
        spec(
            "sonin-tempered",
            TOL_TRANSCENDENTAL,
            Check::SoninPair {
                kappa: Kernel::tempered(0.5, 1.0)?,
                k: Kernel::tempered_associated(0.5, 1.0)?,
            },
        ),
        spec(
            "sonin-bessel",
            TOL_TRANSCENDENTAL,
            Check::SoninPair {
                kappa: Kernel::bessel_kappa(0.5)?,
                k: Kernel::bessel_k(0.5)?,
            },
        ),
        spec(
            "sonin-mittag-leffler",
            TOL_TRANSCENDENTAL,
            Check::SoninPair {
                kappa: Kernel::ml_kappa(0.25, 0.75)?,
                k: Kernel::ml_k(0.25, 0.75)?,
            },
        ),
        spec("triple-power", TOL_POWER, Check::Triple(hilfer.clone())),
        spec("triple-tempered-solved", TOL_POWER, Check::Triple(tempered_triple)),
        spec(
            "ft1-power",
            TOL_THEOREM,
            Check::Ft1 { triple: hilfer.clone(), phi: TestFunction::constant(1.0) },
        ),
        spec(
            "ft1-rl-reduction",
            TOL_THEOREM,
            Check::Ft1 { triple: rl_pair, phi: TestFunction::monomial(1.0, 1) },
        ),
        spec(
            "ft1-caputo-reduction",
            TOL_THEOREM,
            Check::Ft1 { triple: caputo_pair.clone(), phi: TestFunction::exp() },
        ),
        spec(
            "ft2-hilfer",
            TOL_THEOREM,
            Check::Ft2 { triple: hilfer.clone(), f: TestFunction::monomial(1.0, 1) },
        ),
        spec(
            "ft2-caputo-reduction",
            TOL_THEOREM,
            Check::Ft2 {
                triple: caputo_pair,
                f: TestFunction::new(|t| 1.0 + t)
                    .with_derivative(|_| 1.0)
                    .with_value_at_zero(1.0),
            },
        ),
        spec(
            "index-law",
            TOL_TRANSCENDENTAL,
            Check::IndexLaw { alpha: 0.4, beta: 0.9, f: TestFunction::exp() },
        ),
        spec(
            "laplace-power",
            TOL_POWER,
            Check::LaplaceTriple { triple: hilfer, p_values: LAPLACE_POINTS.to_vec() },
        ),
        spec(
            "laplace-tempered",
            TOL_TRANSCENDENTAL,
            Check::LaplaceTriple {
                triple: KernelTriple::new(
                    Kernel::tempered(0.5, 1.0)?,
                    Kernel::H0,
                    Kernel::tempered_associated(0.5, 1.0)?,
                ),
                p_values: LAPLACE_POINTS.to_vec(),
            },
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite() {
        assert!(run_suite(&[]).is_empty());
    }

    #[test]
    fn impossible_tolerance_is_recorded_not_fatal() {
        let grid = Grid::new(64, 2.0, 2.0).unwrap();
        let specs = vec![
            CheckSpec::new(
                "too-tight",
                1e-300,
                grid.clone(),
                Check::SoninPair { kappa: power(0.5), k: power(0.5) },
            ),
            CheckSpec::new(
                "broken",
                1e-8,
                grid.clone(),
                Check::SoninPair { kappa: Kernel::H0, k: Kernel::H0 },
            ),
            CheckSpec::new(
                "fine",
                1e-8,
                grid,
                Check::SoninPair { kappa: power(0.5), k: power(0.5) },
            ),
        ];
        let reports = run_suite(&specs);
        assert_eq!(reports.len(), 3);
        assert!(!reports[0].pass);
        assert!(!reports[1].pass);
        assert!(reports[1].notes[0].starts_with("E_"));
        assert!(reports[2].pass);
    }

    #[test]
    fn triple_with_h0_is_a_pair() {
        let grid = Grid::new(64, 2.0, 2.0).unwrap();
        let t = KernelTriple::new(power(0.3), Kernel::H0, power(0.7));
        assert!(check_triple(&t, &grid, 1e-8).pass);
    }

    #[test]
    fn report_line() {
        let grid = Grid::new(64, 2.0, 2.0).unwrap();
        let r = check_sonin_pair(&power(0.5), &power(0.5), &grid, 1e-8);
        let line = r.to_string();
        assert!(line.contains("max=") && line.ends_with("pass"));
        let mut csv = Vec::new();
        r.write_residual_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 65);
    }
}
