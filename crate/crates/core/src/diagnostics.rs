//! Grid-based detection of corrupted double-precision evaluation.

use serde::{Deserialize, Serialize};

use crate::error::DiagnosticError;
use crate::integrands::{IntegrandVariant, Quartic, QuarticParams};
use crate::precision::PrecisionContext;
use crate::quadrature::Integrand;

pub const DEFAULT_GRID_SIZE: usize = 129;
pub const DEFAULT_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recommendation {
    DoubleOk,
    EscalatePrecision,
    Collapsed,
}

/// Deviation of a double-precision integrand from its high-precision twin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseReport {
    pub max_abs_dev: f64,
    /// `max_abs_dev` over the largest high-precision magnitude on the grid
    /// (equal to `max_abs_dev` when that magnitude is zero).
    pub max_rel_dev: f64,
    /// Every double value is exactly zero while the reference is not.
    pub collapse: bool,
    pub grid_size: usize,
    pub recommendation: Recommendation,
    /// The double path produced NaN or infinity somewhere on the grid.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub non_finite: bool,
}

/// Uniform grid of `n` points from `a` to `b`, both ends included.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + i as f64 * step })
        .collect()
}

/// Compares `f_double` with `f_hiprec` on a uniform grid over `[a, b]`.
///
/// Non-finite double values mark the report and force escalation; a
/// non-finite reference aborts the diagnostic.
pub fn noise_floor<D, H>(
    f_double: &D,
    f_hiprec: &H,
    a: f64,
    b: f64,
    grid_size: usize,
    threshold: f64,
) -> Result<NoiseReport, DiagnosticError>
where
    D: Integrand<Value = f64> + ?Sized,
    H: Integrand<Value = f64> + ?Sized,
{
    if grid_size < 16 {
        return Err(DiagnosticError::GridTooSmall(grid_size));
    }
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(DiagnosticError::Threshold(threshold));
    }
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(DiagnosticError::Bounds(a, b));
    }

    let mut max_abs_dev: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut all_zero = true;
    let mut non_finite = false;
    for x in uniform_grid(a, b, grid_size) {
        let reference = f_hiprec.sample(x).value;
        if !reference.is_finite() {
            return Err(DiagnosticError::ReferenceNotFinite(x));
        }
        let value = f_double.sample(x).value;
        if !value.is_finite() {
            non_finite = true;
            continue;
        }
        all_zero &= value == 0.0;
        scale = scale.max(reference.abs());
        max_abs_dev = max_abs_dev.max((value - reference).abs());
    }
    let collapse = all_zero && scale > 0.0 && !non_finite;
    let max_rel_dev = if scale > 0.0 { max_abs_dev / scale } else { max_abs_dev };
    let recommendation = if collapse {
        Recommendation::Collapsed
    } else if non_finite || max_rel_dev > threshold {
        Recommendation::EscalatePrecision
    } else {
        Recommendation::DoubleOk
    };
    Ok(NoiseReport {
        max_abs_dev,
        max_rel_dev,
        collapse,
        grid_size,
        recommendation,
        non_finite,
    })
}

/// Double-precision quartic against its `digits`-digit evaluation on [-1, 1].
pub fn quartic_noise_report(
    delta: f64,
    digits: u32,
    grid_size: usize,
    threshold: f64,
) -> Result<NoiseReport, crate::error::ReportError> {
    let p = QuarticParams::new(delta).map_err(crate::error::IntegrandError::from)?;
    let double = Quartic::new(IntegrandVariant::QuarticDouble, p, digits)?;
    let hiprec = Quartic::new(IntegrandVariant::QuarticHighPrec, p, digits)?;
    Ok(noise_floor(&double, &hiprec, -1.0, 1.0, grid_size, threshold)?)
}

/// Double when the report is clean, otherwise the default 32-digit context.
pub fn recommend_regime(report: &NoiseReport) -> PrecisionContext {
    match report.recommendation {
        Recommendation::DoubleOk => PrecisionContext::double(),
        Recommendation::EscalatePrecision | Recommendation::Collapsed => PrecisionContext::default_high(),
    }
}
