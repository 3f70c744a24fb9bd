//! The two integrand families: the cancellation-prone quartic and the
//! jump-diffusion inverse-Fourier integrand, plus the sine basis used for
//! Fourier coefficients.
//!
//! Both families are written once over [`Real`] and evaluated in the regime
//! selected by a [`PrecisionContext`]; high-precision results are rounded back
//! to `f64` on return.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{IntegrandError, ParamError};
use crate::precision::{Complex, HpReal, PrecisionContext, Real};
use crate::quadrature::{Integrand, Sample};

/// Bundle for the quartic family; `delta` is the hidden internal parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuarticParams {
    delta: f64,
}

impl QuarticParams {
    pub fn new(delta: f64) -> Result<Self, ParamError> {
        ParamError::check(delta > 0.0 && delta.is_finite(), "delta", delta, "delta > 0")?;
        Ok(QuarticParams { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Value of the literal quartic plus whether its radicand had to be clamped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuarticValue {
    pub value: f64,
    pub radicand_clamped: bool,
}

/// `(b^2 - a^2) / delta` with `a = x + delta^2`, `b = sqrt(a^2 + delta (x-1)^2 (x+1)^2)`.
///
/// Evaluated operation by operation exactly as written. The subtraction is the
/// point: in double it cancels catastrophically for large `delta`. Do not
/// rewrite this expression algebraically.
fn literal_quartic<T: Real>(x: T, delta: T) -> (T, bool) {
    let one = x.lift(1.0);
    let a = x.clone() + delta.clone() * delta.clone();
    let below = x.clone() - one.clone();
    let above = x + one;
    let radicand =
        a.clone() * a.clone() + delta.clone() * (below.clone() * below) * (above.clone() * above);
    let (radicand, clamped) = if radicand.is_sign_negative() && !radicand.is_zero() {
        (radicand.lift(0.0), true)
    } else {
        (radicand, false)
    };
    let b = radicand.sqrt();
    ((b.clone() * b - a.clone() * a) / delta, clamped)
}

/// The quartic through its cancelling definition, in the arithmetic of `ctx`.
pub fn phi_delta_checked(x: f64, p: &QuarticParams, ctx: &PrecisionContext) -> QuarticValue {
    let (value, radicand_clamped) = if ctx.is_double() {
        literal_quartic(x, p.delta)
    } else {
        let bits = ctx.bits();
        let (v, c) = literal_quartic(HpReal::from_f64(x, bits), HpReal::from_f64(p.delta, bits));
        (v.to_f64(), c)
    };
    QuarticValue {
        value,
        radicand_clamped,
    }
}

pub fn phi_delta(x: f64, p: &QuarticParams, ctx: &PrecisionContext) -> f64 {
    phi_delta_checked(x, p, ctx).value
}

/// Simplified form `(x - 1)^2 (x + 1)^2`.
pub fn phi_exact(x: f64) -> f64 {
    let below = x - 1.0;
    let above = x + 1.0;
    below * below * (above * above)
}

/// Orthonormal sine basis on [-1, 1]: `sin(pi (2n - 1) (x + 1) / 2)`.
pub fn basis_g(n: u32, x: f64) -> f64 {
    debug_assert!(n >= 1);
    (PI * (2 * n - 1) as f64 * (x + 1.0) / 2.0).sin()
}

/// Equivalent cosine form `(-1)^(n+1) cos(pi (2n - 1) x / 2)`.
pub fn basis_g_cosine(n: u32, x: f64) -> f64 {
    let c = (PI * (2 * n - 1) as f64 * x / 2.0).cos();
    if n % 2 == 1 {
        c
    } else {
        -c
    }
}

/// Integrand family and evaluation regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrandVariant {
    QuarticDouble,
    QuarticHighPrec,
    QuarticExact,
    FinanceDouble,
    FinanceHighPrec,
}

impl IntegrandVariant {
    pub fn is_quartic(&self) -> bool {
        matches!(
            self,
            IntegrandVariant::QuarticDouble | IntegrandVariant::QuarticHighPrec | IntegrandVariant::QuarticExact
        )
    }

    /// Regime label within the family: `double`, `hiprec` or `exact`.
    pub fn regime_label(&self) -> &'static str {
        match self {
            IntegrandVariant::QuarticDouble | IntegrandVariant::FinanceDouble => "double",
            IntegrandVariant::QuarticHighPrec | IntegrandVariant::FinanceHighPrec => "hiprec",
            IntegrandVariant::QuarticExact => "exact",
        }
    }

    pub fn family_label(&self) -> &'static str {
        if self.is_quartic() {
            "quartic"
        } else {
            "finance"
        }
    }

    pub fn from_labels(family: &str, regime: &str) -> Result<Self, String> {
        match (family, regime) {
            ("quartic", "double") => Ok(IntegrandVariant::QuarticDouble),
            ("quartic", "hiprec") => Ok(IntegrandVariant::QuarticHighPrec),
            ("quartic", "exact") => Ok(IntegrandVariant::QuarticExact),
            ("finance", "double") => Ok(IntegrandVariant::FinanceDouble),
            ("finance", "hiprec") => Ok(IntegrandVariant::FinanceHighPrec),
            ("finance", "exact") => Err("the finance integrand has no simplified exact form".to_owned()),
            _ => Err(format!("unknown integrand/variant {family}/{regime}")),
        }
    }

    /// Precision the variant evaluates in, given the digit count for high precision.
    pub fn context(&self, digits: u32) -> Result<PrecisionContext, IntegrandError> {
        match self {
            IntegrandVariant::QuarticHighPrec | IntegrandVariant::FinanceHighPrec => {
                Ok(PrecisionContext::high_precision(digits)?)
            }
            _ => Ok(PrecisionContext::double()),
        }
    }
}

impl fmt::Display for IntegrandVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.family_label(), self.regime_label())
    }
}

impl FromStr for IntegrandVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (family, regime) = s
            .split_once('-')
            .ok_or_else(|| format!("expected family-regime, got {s:?}"))?;
        IntegrandVariant::from_labels(family, regime)
    }
}

/// The quartic as a quadrature integrand, optionally weighted by `g_n`.
#[derive(Clone, Debug)]
pub struct Quartic {
    variant: IntegrandVariant,
    params: QuarticParams,
    ctx: PrecisionContext,
    weight: Option<u32>,
}

impl Quartic {
    pub fn new(variant: IntegrandVariant, params: QuarticParams, digits: u32) -> Result<Self, IntegrandError> {
        if !variant.is_quartic() {
            return Err(IntegrandError::InvalidVariant(variant.to_string()));
        }
        let ctx = variant.context(digits)?;
        Ok(Quartic {
            variant,
            params,
            ctx,
            weight: None,
        })
    }

    /// Multiplies the quartic by the basis function `g_n` (for coefficient `A_n`).
    pub fn weighted(mut self, n: u32) -> Self {
        self.weight = Some(n);
        self
    }

    pub fn variant(&self) -> IntegrandVariant {
        self.variant
    }

    pub fn params(&self) -> QuarticParams {
        self.params
    }

    pub fn evaluate(&self, x: f64) -> QuarticValue {
        let base = match self.variant {
            IntegrandVariant::QuarticExact => QuarticValue {
                value: phi_exact(x),
                radicand_clamped: false,
            },
            _ => phi_delta_checked(x, &self.params, &self.ctx),
        };
        match self.weight {
            Some(n) => QuarticValue {
                value: base.value * basis_g(n, x),
                ..base
            },
            None => base,
        }
    }
}

impl Integrand for Quartic {
    type Value = f64;
    fn sample(&self, x: f64) -> Sample<f64> {
        let v = self.evaluate(x);
        Sample {
            value: v.value,
            radicand_clamped: v.radicand_clamped,
        }
    }
}

/// Deterministic evaluation of a quartic variant on `grid`, order preserved.
pub fn sample_initial_condition(
    variant: IntegrandVariant,
    p: &QuarticParams,
    digits: u32,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>, IntegrandError> {
    let q = Quartic::new(variant, *p, digits)?;
    Ok(grid.iter().map(|&x| (x, q.evaluate(x).value)).collect())
}

/// Market data and model parameters of the jump-diffusion integrand.
///
/// Field names follow the model: `eps` is the fractional approximation
/// parameter, `hurst` the Hurst exponent, `v` the instantaneous variance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinanceParams {
    pub spot: f64,
    pub strike: f64,
    pub rate: f64,
    pub tau: f64,
    pub kappa: f64,
    pub theta: f64,
    pub sigma: f64,
    pub rho: f64,
    pub eps: f64,
    pub hurst: f64,
    pub lambda: f64,
    pub mu_j: f64,
    pub sigma_j: f64,
    pub v: f64,
}

impl FinanceParams {
    /// Documented reference set with the volatility of volatility `sigma` left free.
    pub fn reference(sigma: f64) -> Self {
        FinanceParams {
            spot: 6721.8,
            strike: 6250.0,
            rate: 0.009,
            tau: 0.120548,
            kappa: 1.5,
            theta: 0.02,
            sigma,
            rho: -0.6,
            eps: 1.0 / 252.0,
            hurst: 0.9,
            lambda: 0.2,
            mu_j: -0.05,
            sigma_j: 0.1,
            v: 0.02,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        ParamError::check(self.tau > 0.0, "tau", self.tau, "tau > 0")?;
        ParamError::check(self.strike > 0.0, "strike", self.strike, "K > 0")?;
        ParamError::check(self.spot > 0.0, "spot", self.spot, "S > 0")?;
        ParamError::check(self.sigma > 0.0, "sigma", self.sigma, "sigma > 0")?;
        ParamError::check(self.eps > 0.0, "eps", self.eps, "eps > 0")?;
        ParamError::check(self.sigma_j >= 0.0, "sigma_j", self.sigma_j, "sigma_J >= 0")?;
        ParamError::check(self.rho.abs() <= 1.0, "rho", self.rho, "|rho| <= 1")?;
        ParamError::check(self.hurst > 0.0 && self.hurst < 1.0, "hurst", self.hurst, "0 < H < 1")?;
        for (name, value) in [
            ("rate", self.rate),
            ("kappa", self.kappa),
            ("theta", self.theta),
            ("lambda", self.lambda),
            ("mu_j", self.mu_j),
            ("v", self.v),
        ] {
            ParamError::check(value.is_finite(), name, value, "finite")?;
        }
        Ok(())
    }

    /// `X = ln(S/K) + r tau`.
    pub fn log_moneyness(&self) -> f64 {
        (self.spot / self.strike).ln() + self.rate * self.tau
    }

    /// `B = eps^(H - 1/2) sigma`.
    pub fn vol_scale(&self) -> f64 {
        self.eps.powf(self.hurst - 0.5) * self.sigma
    }

    /// `beta = exp(mu_J + sigma_J^2 / 2) - 1`.
    pub fn jump_compensator(&self) -> f64 {
        (self.mu_j + 0.5 * self.sigma_j * self.sigma_j).exp() - 1.0
    }
}

/// Characteristic function of the log-normal jump size, `exp(i mu_J k - sigma_J^2 k^2 / 2)`.
pub fn jump_size_transform<T: Real>(k: &Complex<T>, p: &FinanceParams) -> Complex<T> {
    let c = |v: f64| k.re.lift(v);
    let i = Complex::i(&k.re);
    let drift = (i * k.clone()).scale(c(p.mu_j));
    let spread = (k.clone() * k.clone()).scale(c(0.5) * c(p.sigma_j) * c(p.sigma_j));
    (drift - spread).exp()
}

/// Jump factor `exp(-i lambda beta k tau + lambda tau (jump_size_transform(k) - 1))`.
pub fn jump_factor<T: Real>(k: &Complex<T>, p: &FinanceParams) -> Complex<T> {
    let c = |v: f64| k.re.lift(v);
    let i = Complex::i(&k.re);
    let beta = (c(p.mu_j) + c(p.sigma_j) * c(p.sigma_j) / c(2.0)).exp() - c(1.0);
    let lt = c(p.lambda) * c(p.tau);
    let compensator = (i * k.clone()).scale(-(lt.clone() * beta));
    let jumps = (jump_size_transform(k, p) - Complex::from_real(c(1.0))).scale(lt);
    (compensator + jumps).exp()
}

/// `f(k) = exp(-i k X) F(k, v, tau) / (k^2 - i k) * jump_factor(-k)` at `k = u + i/2`.
fn finance_kernel<T: Real>(u: T, p: &FinanceParams) -> Result<Complex<T>, IntegrandError> {
    let c = |v: f64| u.lift(v);
    let one = Complex::from_real(c(1.0));
    let i = Complex::i(&u);
    let k = Complex::new(u.clone(), c(0.5));

    let x_log = (c(p.spot) / c(p.strike)).ln() + c(p.rate) * c(p.tau);
    let vol = c(p.eps).powf(&(c(p.hurst) - c(0.5))) * c(p.sigma);
    let tau = c(p.tau);

    let kk = k.clone() * k.clone() - i.clone() * k.clone();
    if kk.is_zero() {
        return Err(IntegrandError::Pole {
            re: k.re.to_f64(),
            im: k.im.to_f64(),
        });
    }
    let b = Complex::from_real(c(p.kappa)) + (i.clone() * k.clone()).scale(c(p.rho) * vol.clone());
    let d = (b.clone() * b.clone() + kk.clone().scale(vol.clone() * vol.clone())).sqrt();
    let g = (b.clone() - d.clone()) / (b.clone() + d.clone());
    let y = -(kk.clone() / (b + d.clone()));
    let decay = (-d.scale(tau.clone())).exp();
    let one_minus_g = one.clone() - g.clone();
    if one_minus_g.is_zero() {
        return Err(IntegrandError::Degenerate);
    }
    let g_decay = one.clone() - g * decay.clone();
    let c2 = (g_decay.clone() / one_minus_g).ln();
    let two_over_b2 = c(2.0) / (vol.clone() * vol);
    let big_c = (y.clone().scale(tau) - c2.scale(two_over_b2)).scale(c(p.kappa) * c(p.theta));
    let big_d = y * (one - decay) / g_decay;
    let transform = (big_c + big_d.scale(c(p.v))).exp();

    let phase = (-(i * k.clone()).scale(x_log)).exp();
    let jumps = jump_factor(&(-k), p);
    Ok(phase * transform / kk * jumps)
}

/// The inverse-Fourier integrand on the contour `k = u + i/2`, rounded to double.
pub fn finance_f(u: f64, p: &FinanceParams, ctx: &PrecisionContext) -> Result<Complex<f64>, IntegrandError> {
    p.validate()?;
    finance_f_unchecked(u, p, ctx)
}

fn finance_f_unchecked(u: f64, p: &FinanceParams, ctx: &PrecisionContext) -> Result<Complex<f64>, IntegrandError> {
    let value = if ctx.is_double() {
        finance_kernel(u, p)?
    } else {
        finance_kernel(HpReal::from_f64(u, ctx.bits()), p)?.to_f64()
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(IntegrandError::NonFinite("finance"))
    }
}

/// The finance integrand as a quadrature integrand over `u`; domain errors
/// become NaN samples so the run is flagged rather than aborted.
#[derive(Clone, Debug)]
pub struct Finance {
    params: FinanceParams,
    ctx: PrecisionContext,
}

impl Finance {
    pub fn new(params: FinanceParams, ctx: PrecisionContext) -> Result<Self, IntegrandError> {
        params.validate()?;
        Ok(Finance { params, ctx })
    }

    pub fn params(&self) -> &FinanceParams {
        &self.params
    }

    pub fn context(&self) -> PrecisionContext {
        self.ctx
    }
}

impl Integrand for Finance {
    type Value = Complex<f64>;
    fn sample(&self, u: f64) -> Sample<Complex<f64>> {
        let value = finance_f_unchecked(u, &self.params, &self.ctx)
            .unwrap_or(Complex::new(f64::NAN, f64::NAN));
        Sample::plain(value)
    }
}
