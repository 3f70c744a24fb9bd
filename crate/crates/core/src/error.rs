use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrecisionError {
    #[error("high precision needs at least 16 significant digits, got {0}")]
    TooFewDigits(u32),
    #[error("value overflows the double range (rounded to {0})")]
    Overflow(f64),
    #[error("value is not a number")]
    NotANumber,
    #[error("cannot parse {0:?} as a decimal number")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("parameter {name} = {value} is out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
}

impl ParamError {
    pub(crate) fn check(
        ok: bool,
        name: &'static str,
        value: f64,
        expected: &'static str,
    ) -> Result<(), ParamError> {
        if ok && !value.is_nan() {
            Ok(())
        } else {
            Err(ParamError::OutOfRange {
                name,
                value,
                expected,
            })
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrandError {
    #[error("k^2 - ik vanishes at k = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("degenerate parameters: 1 - g vanishes")]
    Degenerate,
    #[error("non-finite value in the {0} evaluation")]
    NonFinite(&'static str),
    #[error("variant {0} is not a quartic initial condition")]
    InvalidVariant(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Precision(#[from] PrecisionError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("integration bounds must satisfy a < b, got [{a}, {b}]")]
    Bounds { a: f64, b: f64 },
    #[error("tolerances must be strictly positive")]
    Tolerance,
    #[error("trapezoid step {step} does not divide [{a}, {b}] into a whole number of panels")]
    Step { a: f64, b: f64, step: f64 },
    #[error(transparent)]
    Param(#[from] ParamError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContourError {
    #[error(transparent)]
    Integrand(#[from] IntegrandError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticError {
    #[error("grid needs at least 16 points, got {0}")]
    GridTooSmall(usize),
    #[error("threshold must be positive, got {0}")]
    Threshold(f64),
    #[error("bounds must satisfy a < b, got [{0}, {1}]")]
    Bounds(f64, f64),
    #[error("high-precision reference is not finite at x = {0}")]
    ReferenceNotFinite(f64),
}

#[derive(Debug, Error)]
pub enum HeatError {
    #[error("diffusivity must be positive, got {0}")]
    Alpha(f64),
    #[error("truncation order must be at least 1")]
    Modes,
    #[error("grid point ({t}, {x}) lies outside [0, 1] x [-1, 1]")]
    Domain { t: f64, x: f64 },
    #[error("solution grids are not conformable: {0}")]
    Shape(String),
    #[error(transparent)]
    Integrand(#[from] IntegrandError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{0}")]
    Usage(String),
    #[error("reference row failed: {0}")]
    Reference(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed record: {0}")]
    Parse(String),
    #[error(transparent)]
    Integrand(#[from] IntegrandError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Heat(#[from] HeatError),
    #[error(transparent)]
    Diagnostic(#[from] DiagnosticError),
}
