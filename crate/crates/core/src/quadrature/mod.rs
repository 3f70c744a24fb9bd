//! Instrumented quadrature rules.
//!
//! Four rules share one result type: a global-adaptive Gauss–Kronrod (7,15),
//! recursive adaptive Simpson, Gander–Gautschi adaptive Lobatto, and the fixed
//! step composite trapezoid. Every rule counts integrand calls exactly and
//! reports why it stopped.

mod contour;
mod gk15;
mod lobatto;
mod simpson;
mod trapezoid;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{ParamError, QuadratureError};
use crate::precision::Complex;

pub use contour::{integrate_contour, ContourResult};
pub use gk15::{gauss_kronrod_15, gk15_rule, GK15_NODES, GK15_WEIGHTS, G7_WEIGHTS};
pub use lobatto::adaptive_lobatto;
pub use simpson::adaptive_simpson;
pub use trapezoid::trapezoid;

/// Absolute and relative tolerances; a run converges once its error estimate is
/// at most `max(abs_tol, rel_tol * |value|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    abs_tol: f64,
    rel_tol: f64,
}

impl Tolerances {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self, QuadratureError> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) || !abs_tol.is_finite() || !rel_tol.is_finite() {
            return Err(QuadratureError::Tolerance);
        }
        Ok(Tolerances { abs_tol, rel_tol })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn target(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abs_tol: 1e-12,
            rel_tol: 1e-8,
        }
    }
}

/// Refinement caps. `max_intervals` bounds Gauss–Kronrod, `max_fevals` bounds
/// Simpson and Lobatto.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_intervals: usize,
    pub max_fevals: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_intervals: 16384,
            max_fevals: 10000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warning {
    MaxIntervals,
    MaxFevals,
    NonFiniteValue,
    RadicandClamped,
}

impl Warning {
    pub fn as_str(&self) -> &'static str {
        match self {
            Warning::MaxIntervals => "max_intervals",
            Warning::MaxFevals => "max_fevals",
            Warning::NonFiniteValue => "non_finite_value",
            Warning::RadicandClamped => "radicand_clamped",
        }
    }

    /// Human-readable message in the style of the classic adaptive integrators.
    pub fn message(&self, error_bound: f64) -> String {
        match self {
            Warning::MaxIntervals => format!(
                "Reached the limit on the maximum number of intervals in use. \
                 Approximate bound on error is {error_bound:.1e}. The integral may not exist, \
                 or it may be difficult to approximate numerically to the requested accuracy."
            ),
            Warning::MaxFevals => "Maximum function count exceeded; singularity likely.".to_owned(),
            Warning::NonFiniteValue => {
                "Infinite or Not-a-Number value encountered; the result is not reliable.".to_owned()
            }
            Warning::RadicandClamped => {
                "Negative radicand clamped to zero while evaluating the integrand.".to_owned()
            }
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Warning {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max_intervals" => Ok(Warning::MaxIntervals),
            "max_fevals" => Ok(Warning::MaxFevals),
            "non_finite_value" => Ok(Warning::NonFiniteValue),
            "radicand_clamped" => Ok(Warning::RadicandClamped),
            other => Err(format!("unknown warning {other:?}")),
        }
    }
}

pub type Warnings = BTreeSet<Warning>;

/// Outcome of one integration run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult<V = f64> {
    pub value: V,
    pub error_estimate: f64,
    pub fevals: u64,
    pub warnings: Warnings,
    #[serde(with = "duration_secs")]
    pub elapsed: Duration,
}

impl<V> QuadratureResult<V> {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }

    /// Same run with everything but wall-clock time, for determinism checks.
    pub fn outcome(&self) -> (&V, f64, u64, &Warnings) {
        (&self.value, self.error_estimate, self.fevals, &self.warnings)
    }
}

mod duration_secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(secs.max(0.0)))
    }
}

/// Which rule to run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RuleId {
    Gk15,
    AdaptiveSimpson,
    AdaptiveLobatto,
    Trapezoid { step: f64 },
}

impl RuleId {
    pub fn trapezoid(step: f64) -> Result<Self, ParamError> {
        ParamError::check(step > 0.0 && step.is_finite(), "step", step, "h > 0")?;
        Ok(RuleId::Trapezoid { step })
    }

    /// Short name used by the CLI and in reports.
    pub fn name(&self) -> String {
        match self {
            RuleId::Gk15 => "gk15".to_owned(),
            RuleId::AdaptiveSimpson => "simpson".to_owned(),
            RuleId::AdaptiveLobatto => "lobatto".to_owned(),
            RuleId::Trapezoid { step } => format!("trapz-{step}"),
        }
    }

    /// Stable ordering key for report rows.
    pub fn rank(&self) -> u8 {
        match self {
            RuleId::Gk15 => 0,
            RuleId::AdaptiveSimpson => 1,
            RuleId::AdaptiveLobatto => 2,
            RuleId::Trapezoid { .. } => 3,
        }
    }

    pub fn is_adaptive(&self) -> bool {
        !matches!(self, RuleId::Trapezoid { .. })
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for RuleId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gk15" => Ok(RuleId::Gk15),
            "simpson" => Ok(RuleId::AdaptiveSimpson),
            "lobatto" => Ok(RuleId::AdaptiveLobatto),
            "trapz" => Ok(RuleId::Trapezoid { step: 0.01 }),
            other => match other.strip_prefix("trapz-") {
                Some(step) => step
                    .parse::<f64>()
                    .map_err(|e| e.to_string())
                    .and_then(|h| RuleId::trapezoid(h).map_err(|e| e.to_string())),
                None => Err(format!("unknown rule {other:?}")),
            },
        }
    }
}

/// Values a rule can integrate: real or complex doubles.
pub trait QuadValue:
    Copy + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    /// Norm used for error estimates; for complex values the larger of the
    /// real and imaginary magnitudes.
    fn error_norm(self) -> f64;
    /// Modulus used against the relative tolerance.
    fn magnitude(self) -> f64;
    fn is_finite(self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn error_norm(self) -> f64 {
        self.abs()
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Mul<f64> for Complex<f64> {
    type Output = Complex<f64>;
    fn mul(self, k: f64) -> Complex<f64> {
        Complex::new(self.re * k, self.im * k)
    }
}

impl QuadValue for Complex<f64> {
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn error_norm(self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
    fn magnitude(self) -> f64 {
        self.re.hypot(self.im)
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// One integrand value plus evaluation-side flags.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample<V> {
    pub value: V,
    pub radicand_clamped: bool,
}

impl<V> Sample<V> {
    pub fn plain(value: V) -> Self {
        Sample {
            value,
            radicand_clamped: false,
        }
    }
}

/// Anything a rule can integrate over a real interval.
///
/// Plain closures `Fn(f64) -> V` are integrands; structured integrands can
/// also raise evaluation flags through [`Sample`].
pub trait Integrand {
    type Value: QuadValue;
    fn sample(&self, x: f64) -> Sample<Self::Value>;
}

impl<V: QuadValue, F: Fn(f64) -> V> Integrand for F {
    type Value = V;
    fn sample(&self, x: f64) -> Sample<V> {
        Sample::plain(self(x))
    }
}

/// Counts evaluations and collects flags for one run.
pub(crate) struct Meter<'a, I: ?Sized> {
    integrand: &'a I,
    pub fevals: u64,
    pub clamped: bool,
    pub non_finite: bool,
}

impl<'a, I: Integrand + ?Sized> Meter<'a, I> {
    pub fn new(integrand: &'a I) -> Self {
        Meter {
            integrand,
            fevals: 0,
            clamped: false,
            non_finite: false,
        }
    }

    pub fn eval(&mut self, x: f64) -> I::Value {
        self.fevals += 1;
        let s = self.integrand.sample(x);
        self.clamped |= s.radicand_clamped;
        if !s.value.is_finite() {
            self.non_finite = true;
        }
        s.value
    }

    pub fn warnings(&self) -> Warnings {
        let mut w = Warnings::new();
        if self.clamped {
            w.insert(Warning::RadicandClamped);
        }
        if self.non_finite {
            w.insert(Warning::NonFiniteValue);
        }
        w
    }
}

pub(crate) fn check_bounds(a: f64, b: f64) -> Result<(), QuadratureError> {
    if a < b && a.is_finite() && b.is_finite() {
        Ok(())
    } else {
        Err(QuadratureError::Bounds { a, b })
    }
}

/// Runs `rule` with default limits.
pub fn integrate<I: Integrand + ?Sized>(
    rule: RuleId,
    f: &I,
    a: f64,
    b: f64,
    tol: Tolerances,
) -> Result<QuadratureResult<I::Value>, QuadratureError> {
    integrate_with_limits(rule, f, a, b, tol, Limits::default())
}

pub fn integrate_with_limits<I: Integrand + ?Sized>(
    rule: RuleId,
    f: &I,
    a: f64,
    b: f64,
    tol: Tolerances,
    limits: Limits,
) -> Result<QuadratureResult<I::Value>, QuadratureError> {
    match rule {
        RuleId::Gk15 => gauss_kronrod_15(f, a, b, tol, limits.max_intervals),
        RuleId::AdaptiveSimpson => adaptive_simpson(f, a, b, tol, limits.max_fevals),
        RuleId::AdaptiveLobatto => adaptive_lobatto(f, a, b, tol, limits.max_fevals),
        RuleId::Trapezoid { step } => trapezoid(f, a, b, step),
    }
}
