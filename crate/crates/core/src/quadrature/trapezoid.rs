use std::time::Instant;

use super::{check_bounds, Integrand, Meter, QuadValue, QuadratureResult};
use crate::error::QuadratureError;

fn panel_count(a: f64, b: f64, step: f64) -> Result<usize, QuadratureError> {
    let bad = || QuadratureError::Step { a, b, step };
    if !(step > 0.0 && step.is_finite()) || step > b - a {
        return Err(bad());
    }
    let ratio = (b - a) / step;
    let n = ratio.round();
    let spacing = if ratio == 0.0 { 0.0 } else { ratio.abs() * f64::EPSILON };
    // (b - a) / h must sit within half an ulp of a whole number
    if (ratio - n).abs() > 0.5 * spacing || n < 1.0 {
        return Err(bad());
    }
    Ok(n as usize)
}

/// Composite trapezoid on the uniform grid `a + i (b - a) / n`, `n = round((b - a) / h)`.
///
/// Values are summed left to right, end points halved, and scaled by the
/// panel width once at the end. The error estimate is `|T(h) - T(2h)| / 3`
/// when the panel count is even, otherwise zero; it is informational only.
pub fn trapezoid<I: Integrand + ?Sized>(
    f: &I,
    a: f64,
    b: f64,
    step: f64,
) -> Result<QuadratureResult<I::Value>, QuadratureError> {
    check_bounds(a, b)?;
    let n = panel_count(a, b, step)?;
    let start = Instant::now();
    let mut m = Meter::new(f);
    let h = (b - a) / n as f64;

    let mut fine = I::Value::zero();
    let mut coarse = I::Value::zero();
    for i in 0..=n {
        let x = if i == n { b } else { a + i as f64 * h };
        let y = m.eval(x);
        let weight = if i == 0 || i == n { 0.5 } else { 1.0 };
        fine = fine + y * weight;
        if i % 2 == 0 {
            coarse = coarse + y * weight;
        }
    }
    let value = fine * h;
    let error_estimate = if n % 2 == 0 {
        (value - coarse * (2.0 * h)).error_norm() / 3.0
    } else {
        0.0
    };
    Ok(QuadratureResult {
        value,
        error_estimate,
        fevals: m.fevals,
        warnings: m.warnings(),
        elapsed: start.elapsed(),
    })
}
