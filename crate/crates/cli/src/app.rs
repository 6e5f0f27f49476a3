//! Command definitions and dispatch.

use crate::expr::{self, ExprError};
use crate::kernel_spec::{load_spec, parse_kernel, solved_third, SpecError};
use clap::{Args, Parser, Subcommand};
use sonin_core::kernel::{
    laplace_transform, solve_associated_pair, solve_associated_pair_with, solve_third_kernel,
    Kernel, KernelSeries, KernelTriple, DEFAULT_TERMS,
};
use sonin_core::operators::{
    apply_gfd_1l, apply_gfd_caputo, apply_gfd_rl, apply_gfi, apply_hilfer, projector_1l,
};
use sonin_core::quadrature::{Grid, GridFunction, Input, TestFunction};
use sonin_core::verify::{
    check_ft1, check_ft2, check_index_law, check_laplace_triple, check_sonin_pair, check_triple,
    default_suite, run_suite, ResidualReport, LAPLACE_POINTS, TOL_POWER, TOL_THEOREM,
    TOL_TRANSCENDENTAL,
};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "sonin", version, about = "General fractional calculus with Sonin kernels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate, pair, complete and transform kernels
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Apply integral and derivative operators
    #[command(subcommand)]
    Op(OpCmd),
    /// Run residual checks
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Debug, Args)]
pub struct KernelSource {
    /// Kernel as kind:params, e.g. tempered:0.5,1
    #[arg(long)]
    pub kernel: Option<String>,
    /// Kernel spec file (TOML)
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum KernelCmd {
    /// Kernel values at one or more points
    Eval {
        #[command(flatten)]
        src: KernelSource,
        /// Evaluation points (comma separated)
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
    },
    /// Associated (Sonin) kernel
    Associate {
        #[command(flatten)]
        src: KernelSource,
        /// Series order of κ
        #[arg(long, requires = "coeffs")]
        mu: Option<f64>,
        /// Series coefficients of κ (comma separated)
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        coeffs: Option<Vec<f64>>,
        /// Number of coefficients to solve for
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Third kernel k₂ of a triple from κ and k₁
    Third {
        #[arg(long)]
        kappa: String,
        #[arg(long)]
        k1: String,
        #[arg(long, default_value_t = DEFAULT_TERMS)]
        terms: usize,
    },
    /// Laplace transform values
    Laplace {
        #[command(flatten)]
        src: KernelSource,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
    },
}

#[derive(Debug, Args)]
pub struct FunctionArgs {
    /// Test function f(t) as an expression
    #[arg(long = "f", allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Its derivative; derived symbolically when omitted
    #[arg(long, allow_hyphen_values = true)]
    pub fprime: Option<String>,
    /// f(0); taken from the expression when finite there
    #[arg(long, allow_hyphen_values = true)]
    pub f0: Option<f64>,
    /// Exponent p in f(t) = t^p·(smooth part)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub fexp: f64,
    /// Samples of f as a `t,value` CSV instead of an expression
    #[arg(long, conflicts_with = "f")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// nodes:grading:horizon
    #[arg(long, default_value = "512:2:2")]
    pub grid: String,
    /// Output CSV path (standard output when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum OpCmd {
    /// κ * f
    Gfi {
        #[arg(long)]
        kappa: String,
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// d/dt (k * f)
    GfdRl {
        #[arg(long)]
        k: String,
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// k * f′
    GfdCaputo {
        #[arg(long)]
        k: String,
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// k₁ * d/dt (k₂ * f)
    #[command(name = "gfd-1l")]
    Gfd1l {
        #[arg(long)]
        k1: String,
        #[arg(long)]
        k2: String,
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Hilfer derivative of order α and type γ
    Hilfer {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// (I_{k₂} f)(0)·(k₁ * κ)(t)
    Projector {
        #[command(flatten)]
        triple: TripleArgs,
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Debug, Args)]
pub struct TripleArgs {
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long)]
    pub k1: Option<String>,
    /// Solved from κ and k₁ when omitted
    #[arg(long)]
    pub k2: Option<String>,
    /// Kernel spec file (TOML)
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Tolerance on the maximum residual
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// (κ * k)(t) = 1
    Sonin {
        #[arg(long)]
        kappa: Option<String>,
        /// Defaults to the known partner of κ
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// (κ * k₁ * k₂)(t) = 1
    Triple {
        #[command(flatten)]
        triple: TripleArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// 1st level derivative is a left inverse of the integral
    Ft1 {
        #[command(flatten)]
        triple: TripleArgs,
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// integral of the 1st level derivative gives f minus the projector
    Ft2 {
        #[command(flatten)]
        triple: TripleArgs,
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// I^α I^β f = I^{α+β} f
    Index {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// κ̃(p)·k̃₁(p)·k̃₂(p) = 1/p
    Laplace {
        #[command(flatten)]
        triple: TripleArgs,
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// The default suite
    Suite {
        #[command(flatten)]
        check: CheckArgs,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Core(#[from] sonin_core::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "E_USAGE",
            CliError::Expr(e) => e.code(),
            CliError::Spec(e) => e.code(),
            CliError::Core(e) => e.code(),
            CliError::Io(_) => "E_IO",
        }
    }

    /// 2 for bad input, 1 for computations that could not be completed.
    pub fn exit_code(&self) -> u8 {
        use sonin_core::Error as E;
        match self {
            CliError::Core(
                E::Divergent { .. }
                | E::ExtrapolationUnstable { .. }
                | E::NonFinite(_)
                | E::OutOfRange { .. }
                | E::Pole(_),
            ) => 1,
            _ => 2,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn parse_grid(src: &str) -> Result<Grid, CliError> {
    let bad = || CliError::Usage(format!("grid `{src}` must be nodes:grading:horizon"));
    let parts: Vec<&str> = src.split(':').collect();
    let [n, r, t] = parts[..] else {
        return Err(bad());
    };
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let r: f64 = r.trim().parse().map_err(|_| bad())?;
    let t: f64 = t.trim().parse().map_err(|_| bad())?;
    Ok(Grid::new(n, r, t)?)
}

/// A test function read from the command line.
pub enum FunctionInput {
    Expression(TestFunction),
    Samples(GridFunction),
}

impl FunctionInput {
    pub fn as_input(&self) -> Input<'_> {
        match self {
            FunctionInput::Expression(f) => Input::Function(f),
            FunctionInput::Samples(g) => Input::Samples(g),
        }
    }

    fn grid(&self, default: Grid) -> Grid {
        match self {
            FunctionInput::Samples(g) => g.grid().clone(),
            FunctionInput::Expression(_) => default,
        }
    }

    fn function(self) -> Result<TestFunction, CliError> {
        match self {
            FunctionInput::Expression(f) => Ok(f),
            FunctionInput::Samples(_) => {
                Err(CliError::Usage("this check needs --f, not --input".into()))
            }
        }
    }
}

/// Builds a test function from `--f`/`--fprime`/`--f0`/`--fexp`.
pub fn test_function(
    src: &str,
    fprime: Option<&str>,
    f0: Option<f64>,
    fexp: f64,
) -> Result<TestFunction, CliError> {
    let e = Arc::new(expr::parse(src)?);
    let ev = e.clone();
    let mut f = TestFunction::new(move |t| ev.eval(t)).with_exponent(fexp);
    let d = match fprime {
        Some(s) => Some(expr::parse(s)?),
        None => e.derivative().ok(),
    };
    if let Some(d) = d {
        f = f.with_derivative(move |t| d.eval(t));
    }
    let at_zero = f0.or_else(|| Some(e.eval(0.0)).filter(|v| v.is_finite()));
    if let Some(v) = at_zero {
        f = f.with_value_at_zero(v);
    }
    Ok(f)
}

fn function_input(a: &FunctionArgs) -> Result<FunctionInput, CliError> {
    match (&a.f, &a.input) {
        (Some(src), None) => Ok(FunctionInput::Expression(test_function(
            src,
            a.fprime.as_deref(),
            a.f0,
            a.fexp,
        )?)),
        (None, Some(path)) => {
            let file = File::open(path).map_err(|e| io_err(path, e))?;
            Ok(FunctionInput::Samples(GridFunction::read_csv(BufReader::new(file), a.fexp)?))
        }
        _ => Err(CliError::Usage("give exactly one of --f and --input".into())),
    }
}

fn kernel_from(src: &KernelSource) -> Result<Kernel, CliError> {
    match (&src.kernel, &src.spec) {
        (Some(k), None) => Ok(parse_kernel(k)?),
        (None, Some(p)) => Ok(load_spec(p)?.single()?),
        _ => Err(CliError::Usage("give exactly one of --kernel and --spec".into())),
    }
}

fn triple_from(a: &TripleArgs) -> Result<KernelTriple, CliError> {
    if let Some(p) = &a.spec {
        if a.kappa.is_some() || a.k1.is_some() || a.k2.is_some() {
            return Err(CliError::Usage("--spec excludes --kappa/--k1/--k2".into()));
        }
        return Ok(load_spec(p)?.triple()?);
    }
    let (Some(kappa), Some(k1)) = (&a.kappa, &a.k1) else {
        return Err(CliError::Usage("give --spec or both --kappa and --k1".into()));
    };
    let kappa = parse_kernel(kappa)?;
    let k1 = parse_kernel(k1)?;
    let k2 = match &a.k2 {
        Some(k) => parse_kernel(k)?,
        None => solved_third(&kappa, &k1)?,
    };
    Ok(KernelTriple::new(kappa, k1, k2))
}

fn closed_form(k: &Kernel) -> bool {
    matches!(k, Kernel::PowerLaw { .. } | Kernel::H0 | Kernel::H1)
}

fn default_tol(kernels: &[&Kernel]) -> f64 {
    if kernels.iter().all(|k| closed_form(k)) {
        TOL_POWER
    } else {
        TOL_TRANSCENDENTAL
    }
}

fn fmt_list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

fn print_series(out: &mut dyn Write, s: &KernelSeries) -> std::io::Result<()> {
    writeln!(out, "mu={}", s.mu())?;
    writeln!(out, "coeffs={}", fmt_list(s.coeffs()))?;
    if let Some(r) = s.tail_ratio() {
        writeln!(out, "tail_ratio={r:.3e}")?;
    }
    Ok(())
}

fn emit(g: &GridFunction, out_path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match out_path {
        Some(p) => {
            let file = File::create(p).map_err(|e| io_err(p, e))?;
            let mut w = BufWriter::new(file);
            g.write_csv(&mut w)?;
            w.flush().map_err(|e| io_err(p, e))
        }
        None => Ok(g.write_csv(out)?),
    }
}

fn report(
    reports: &[ResidualReport],
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let w = |e: std::io::Error| CliError::Io(e.to_string());
    for r in reports {
        writeln!(out, "{r}").map_err(w)?;
    }
    if let Some(p) = out_path {
        let file = File::create(p).map_err(|e| io_err(p, e))?;
        let mut f = BufWriter::new(file);
        if let [single] = reports {
            single.write_residual_csv(&mut f)?;
        } else {
            writeln!(f, "check,t,residual").map_err(|e| io_err(p, e))?;
            for r in reports {
                for (t, v) in &r.residuals {
                    writeln!(f, "{},{t:.14e},{v:.14e}", r.name).map_err(|e| io_err(p, e))?;
                }
            }
        }
        f.flush().map_err(|e| io_err(p, e))?;
    }
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { 1 })
}

/// Runs one command, writing its normal output to `out`. Returns the exit
/// status for a completed run: 0 on success, 1 when a check fails.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::Kernel(cmd) => run_kernel(cmd, out),
        Command::Op(cmd) => run_op(cmd, out),
        Command::Verify(cmd) => run_verify(cmd, out),
    }
}

fn run_kernel(cmd: KernelCmd, out: &mut dyn Write) -> Result<u8, CliError> {
    let w = |e: std::io::Error| CliError::Io(e.to_string());
    match cmd {
        KernelCmd::Eval { src, t } => {
            let k = kernel_from(&src)?;
            writeln!(out, "t,value").map_err(w)?;
            for t in t {
                writeln!(out, "{t},{:.15e}", k.evaluate(t)?).map_err(w)?;
            }
        }
        KernelCmd::Associate {
            src,
            mu,
            coeffs,
            terms,
        } => {
            let kappa = match (mu, coeffs) {
                (Some(mu), Some(c)) => {
                    if src.kernel.is_some() || src.spec.is_some() {
                        return Err(CliError::Usage("--mu/--coeffs exclude --kernel/--spec".into()));
                    }
                    Kernel::Series(KernelSeries::new(mu, c)?)
                }
                (None, Some(_)) => return Err(CliError::Usage("--coeffs needs --mu".into())),
                _ => kernel_from(&src)?,
            };
            match &kappa {
                Kernel::Series(s) => {
                    let k = match terms {
                        Some(n) => solve_associated_pair_with(s, n)?,
                        None => solve_associated_pair(s)?,
                    };
                    writeln!(out, "kernel={}", Kernel::Series(k.clone())).map_err(w)?;
                    print_series(out, &k).map_err(w)?;
                }
                k => {
                    let partner = k.sonin_partner()?;
                    writeln!(out, "kernel={partner}").map_err(w)?;
                    if let Kernel::Series(s) = &partner {
                        print_series(out, s).map_err(w)?;
                    }
                }
            }
        }
        KernelCmd::Third { kappa, k1, terms } => {
            let a = parse_kernel(&kappa)?.to_series(terms)?;
            let b = parse_kernel(&k1)?.to_series(terms)?;
            let k2 = solve_third_kernel(&a, &b)?;
            writeln!(out, "kernel={}", Kernel::Series(k2.clone())).map_err(w)?;
            print_series(out, &k2).map_err(w)?;
        }
        KernelCmd::Laplace { src, p } => {
            let k = kernel_from(&src)?;
            writeln!(out, "p,value").map_err(w)?;
            for p in p {
                writeln!(out, "{p},{:.15e}", laplace_transform(&k, p)?).map_err(w)?;
            }
        }
    }
    Ok(0)
}

fn run_op(cmd: OpCmd, out: &mut dyn Write) -> Result<u8, CliError> {
    let (f, grid_args) = match &cmd {
        OpCmd::Gfi { f, grid, .. }
        | OpCmd::GfdRl { f, grid, .. }
        | OpCmd::GfdCaputo { f, grid, .. }
        | OpCmd::Gfd1l { f, grid, .. }
        | OpCmd::Hilfer { f, grid, .. }
        | OpCmd::Projector { f, grid, .. } => (f, grid),
    };
    let input = function_input(f)?;
    let grid = input.grid(parse_grid(&grid_args.grid)?);
    let x = input.as_input();
    let result = match &cmd {
        OpCmd::Gfi { kappa, .. } => apply_gfi(&parse_kernel(kappa)?, x, &grid)?,
        OpCmd::GfdRl { k, .. } => apply_gfd_rl(&parse_kernel(k)?, x, &grid)?,
        OpCmd::GfdCaputo { k, .. } => apply_gfd_caputo(&parse_kernel(k)?, x, &grid)?,
        OpCmd::Gfd1l { k1, k2, .. } => {
            apply_gfd_1l(&parse_kernel(k1)?, &parse_kernel(k2)?, x, &grid)?
        }
        OpCmd::Hilfer { alpha, gamma, .. } => apply_hilfer(*alpha, *gamma, x, &grid)?,
        OpCmd::Projector { triple, .. } => {
            let t = triple_from(triple)?;
            projector_1l(&t.k1, &t.k2, &t.kappa, x, &grid)?
        }
    };
    emit(&result, grid_args.out.as_deref(), out)?;
    Ok(0)
}

fn run_verify(cmd: VerifyCmd, out: &mut dyn Write) -> Result<u8, CliError> {
    let check_tol = |tol: Option<f64>, default: f64| -> Result<f64, CliError> {
        match tol {
            Some(t) if t.is_nan() || t <= 0.0 => Err(CliError::Usage(format!("--tol {t} must be > 0"))),
            Some(t) => Ok(t),
            None => Ok(default),
        }
    };
    match cmd {
        VerifyCmd::Sonin {
            kappa,
            k,
            spec,
            check,
        } => {
            let (kappa, k) = match (kappa, spec) {
                (Some(kappa), None) => {
                    let kappa = parse_kernel(&kappa)?;
                    let k = match k {
                        Some(k) => parse_kernel(&k)?,
                        None => kappa.sonin_partner()?,
                    };
                    (kappa, k)
                }
                (None, Some(p)) if k.is_none() => load_spec(&p)?.pair()?,
                _ => return Err(CliError::Usage("give --kappa [--k] or --spec".into())),
            };
            let grid = parse_grid(&check.grid.grid)?;
            let tol = check_tol(check.tol, default_tol(&[&kappa, &k]))?;
            let r = check_sonin_pair(&kappa, &k, &grid, tol);
            report(&[r], check.grid.out.as_deref(), out)
        }
        VerifyCmd::Triple { triple, check } => {
            let t = triple_from(&triple)?;
            let grid = parse_grid(&check.grid.grid)?;
            let tol = check_tol(check.tol, default_tol(&[&t.kappa, &t.k1, &t.k2]))?;
            let r = check_triple(&t, &grid, tol);
            report(&[r], check.grid.out.as_deref(), out)
        }
        VerifyCmd::Ft1 { triple, f, check } => {
            let t = triple_from(&triple)?;
            let phi = function_input(&f)?.function()?;
            let grid = parse_grid(&check.grid.grid)?;
            let r = check_ft1(&t, &phi, &grid, check_tol(check.tol, TOL_THEOREM)?);
            report(&[r], check.grid.out.as_deref(), out)
        }
        VerifyCmd::Ft2 { triple, f, check } => {
            let t = triple_from(&triple)?;
            let f = function_input(&f)?.function()?;
            let grid = parse_grid(&check.grid.grid)?;
            let r = check_ft2(&t, &f, &grid, check_tol(check.tol, TOL_THEOREM)?);
            report(&[r], check.grid.out.as_deref(), out)
        }
        VerifyCmd::Index {
            alpha,
            beta,
            f,
            check,
        } => {
            let f = function_input(&f)?.function()?;
            let grid = parse_grid(&check.grid.grid)?;
            let tol = check_tol(check.tol, 1e-6)?;
            let r = check_index_law(alpha, beta, &f, &grid, tol);
            report(&[r], check.grid.out.as_deref(), out)
        }
        VerifyCmd::Laplace { triple, p, tol } => {
            let t = triple_from(&triple)?;
            let p = p.unwrap_or_else(|| LAPLACE_POINTS.to_vec());
            let tol = check_tol(tol, default_tol(&[&t.kappa, &t.k1, &t.k2]))?;
            let r = check_laplace_triple(&t, &p, tol);
            report(&[r], None, out)
        }
        VerifyCmd::Suite { check } => {
            let grid = parse_grid(&check.grid.grid)?;
            let mut specs = default_suite(&grid)?;
            if let Some(t) = check.tol {
                let t = check_tol(Some(t), t)?;
                for s in &mut specs {
                    s.tolerance = t;
                }
            }
            report(&run_suite(&specs), check.grid.out.as_deref(), out)
        }
    }
}
