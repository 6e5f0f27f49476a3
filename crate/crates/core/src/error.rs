use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the engine can report. `code()` gives a stable short tag
/// that front ends print instead of the free-form message when they need
/// something machine-matchable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma has a pole at {0}")]
    Pole(f64),
    #[error("argument {value} of {what} lies outside the supported range {bound}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        bound: &'static str,
    },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("the h0 kernel has no pointwise value")]
    NotEvaluable,
    #[error("kernel {0} has no power-series representation")]
    NotSeries(String),
    #[error("series order {0} exceeds the representable bound")]
    OrderOverflow(f64),
    #[error("leading series coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("numeric Laplace transform does not converge (tail estimate {tail:.3e})")]
    Divergent { tail: f64 },
    #[error("singularity exponent {0} is not integrable at the origin")]
    NonIntegrable(f64),
    #[error("grid with {0} nodes is too coarse (need at least 8)")]
    GridTooCoarse(usize),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("grid functions live on different grids")]
    GridMismatch,
    #[error("initial value f(0) is required on the analytic path")]
    MissingInitialValue,
    #[error("derivative f' is required")]
    MissingDerivative,
    #[error("limit estimate at the origin is unstable (spread {spread:.3e})")]
    ExtrapolationUnstable { spread: f64 },
    #[error("non-finite value at t = {0}")]
    NonFinite(f64),
    #[error("csv: {0}")]
    Csv(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Pole(_) => "E_POLE",
            Error::OutOfRange { .. } => "E_RANGE",
            Error::Parameter(_) => "E_PARAM",
            Error::NotEvaluable => "E_NOT_EVALUABLE",
            Error::NotSeries(_) => "E_NOT_SERIES",
            Error::OrderOverflow(_) => "E_ORDER",
            Error::ZeroLeadingCoefficient => "E_ZERO_LEAD",
            Error::Divergent { .. } => "E_DIVERGENT",
            Error::NonIntegrable(_) => "E_NON_INTEGRABLE",
            Error::GridTooCoarse(_) => "E_GRID_COARSE",
            Error::Grid(_) => "E_GRID",
            Error::GridMismatch => "E_GRID_MISMATCH",
            Error::MissingInitialValue => "E_MISSING_F0",
            Error::MissingDerivative => "E_MISSING_DERIVATIVE",
            Error::ExtrapolationUnstable { .. } => "E_EXTRAPOLATION",
            Error::NonFinite(_) => "E_NON_FINITE",
            Error::Csv(_) => "E_CSV",
        }
    }
}
