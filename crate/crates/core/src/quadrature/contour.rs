use serde::{Deserialize, Serialize};

use super::{integrate_with_limits, Limits, QuadratureResult, RuleId, Tolerances};
use crate::error::ContourError;
use crate::integrands::{Finance, FinanceParams};
use crate::precision::{Complex, PrecisionContext};

/// Complex integral of the finance integrand along `k = u + i/2`, `u` in `[0, L]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourResult {
    pub result: QuadratureResult<Complex<f64>>,
}

impl ContourResult {
    pub fn value(&self) -> Complex<f64> {
        self.result.value
    }

    pub fn real_part(&self) -> f64 {
        self.result.value.re
    }
}

/// Integrates `f(u + i/2)` over `[0, length]`. Real and imaginary parts share
/// one adaptive subdivision; the error estimate is the larger of the two.
pub fn integrate_contour(
    p: &FinanceParams,
    length: f64,
    rule: RuleId,
    ctx: &PrecisionContext,
    tol: Tolerances,
) -> Result<ContourResult, ContourError> {
    let f = Finance::new(*p, *ctx)?;
    let result = integrate_with_limits(rule, &f, 0.0, length, tol, Limits::default())?;
    Ok(ContourResult { result })
}
