//! Dual-regime scalar arithmetic.
//!
//! Every integrand in this crate is written once, generically over [`Real`], and
//! evaluated either in native `f64` or in [`HpReal`], a binary multiprecision
//! float whose working precision is derived from a decimal digit count. Values
//! computed in high precision are rounded back to `f64` (nearest, ties to even)
//! before they reach a quadrature rule.
//!
//! `HpReal` is backed by `astro-float`. Basic arithmetic and `sqrt` are
//! correctly rounded at the working precision; `exp`, `ln`, `sin`, `cos` and
//! `atan` are at least faithfully rounded (error below one ulp).

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use serde::{Deserialize, Serialize};

use crate::error::PrecisionError;

const ROUNDING: RoundingMode = RoundingMode::ToEven;

/// Largest relative spacing of doubles, `2^-52`.
pub fn machine_epsilon() -> f64 {
    f64::EPSILON
}

/// Arithmetic regime used to evaluate an integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Double,
    HighPrecision,
}

/// Evaluation regime plus its decimal digit count.
///
/// The digit count is only meaningful for [`Regime::HighPrecision`] and must
/// be at least 16 there, otherwise the regime would not beat `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    regime: Regime,
    digits: u32,
}

impl PrecisionContext {
    pub const DEFAULT_DIGITS: u32 = 32;
    pub const MIN_DIGITS: u32 = 16;
    const GUARD_BITS: usize = 8;

    pub const fn double() -> Self {
        PrecisionContext {
            regime: Regime::Double,
            digits: 16,
        }
    }

    pub fn high_precision(digits: u32) -> Result<Self, PrecisionError> {
        if digits < Self::MIN_DIGITS {
            return Err(PrecisionError::TooFewDigits(digits));
        }
        Ok(PrecisionContext {
            regime: Regime::HighPrecision,
            digits,
        })
    }

    /// High precision at the default 32 significant digits.
    pub fn default_high() -> Self {
        PrecisionContext {
            regime: Regime::HighPrecision,
            digits: Self::DEFAULT_DIGITS,
        }
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn is_double(&self) -> bool {
        self.regime == Regime::Double
    }

    /// Binary precision backing the decimal digit count:
    /// `ceil(digits * log2(10)) + 8` guard bits. Double contexts report 53.
    pub fn bits(&self) -> usize {
        match self.regime {
            Regime::Double => 53,
            Regime::HighPrecision => {
                (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + Self::GUARD_BITS
            }
        }
    }

    /// Evaluates `f` with its argument lifted into this context's arithmetic and
    /// rounds the result back to `f64`.
    pub fn eval<F>(&self, x: f64, f: F) -> f64
    where
        F: RealFn,
    {
        match self.regime {
            Regime::Double => f.call(x).to_f64(),
            Regime::HighPrecision => f.call(HpReal::from_f64(x, self.bits())).to_f64(),
        }
    }
}

impl fmt::Display for PrecisionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.regime {
            Regime::Double => write!(f, "double"),
            Regime::HighPrecision => write!(f, "hiprec({})", self.digits),
        }
    }
}

/// A scalar-generic function, callable in either regime.
pub trait RealFn {
    fn call<T: Real>(&self, x: T) -> T;
}

/// Scalar operations shared by `f64` and [`HpReal`].
///
/// Operators consume their operands; generic code clones where needed, which is
/// free for `f64`.
pub trait Real:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `value` at the same working precision as `self`.
    fn lift(&self, value: f64) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    /// Four-quadrant arctangent of `self / x`.
    fn atan2(&self, x: &Self) -> Self;
    fn abs(&self) -> Self;
    fn is_sign_negative(&self) -> bool;
    fn is_zero(&self) -> bool;
    fn is_finite(&self) -> bool;
    /// Nearest double, ties to even. Overflow yields a signed infinity.
    fn to_f64(&self) -> f64;

    fn powf(&self, exponent: &Self) -> Self {
        (exponent.clone() * self.ln()).exp()
    }
}

impl Real for f64 {
    fn lift(&self, value: f64) -> Self {
        value
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_sign_negative(&self) -> bool {
        f64::is_sign_negative(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn powf(&self, exponent: &Self) -> Self {
        f64::powf(*self, *exponent)
    }
}

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("allocating the multiprecision constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Multiprecision real with a fixed binary working precision.
///
/// Immutable once built; every operation returns a new value at the larger of
/// its operands' precisions.
#[derive(Clone)]
pub struct HpReal {
    value: BigFloat,
    bits: usize,
}

impl HpReal {
    /// Exact conversion (the working precision always exceeds 53 bits).
    pub fn from_f64(x: f64, bits: usize) -> Self {
        let bits = bits.max(64);
        if x != 0.0 && x.abs() < f64::MIN_POSITIVE {
            // astro-float misplaces the exponent of subnormal inputs; lift the
            // value into the normal range first and scale back exactly.
            let lifted = BigFloat::from_f64(x * 2f64.powi(64), bits);
            let scale = BigFloat::from_f64(2f64.powi(-64), bits);
            return HpReal {
                value: lifted.mul(&scale, bits, ROUNDING),
                bits,
            };
        }
        HpReal {
            value: BigFloat::from_f64(x, bits),
            bits,
        }
    }

    /// `x` at the precision of `ctx` (53 bits are widened to 64 for double contexts).
    pub fn with_context(x: f64, ctx: &PrecisionContext) -> Self {
        Self::from_f64(x, ctx.bits())
    }

    /// Parses a decimal literal, rounding to nearest at `bits`.
    pub fn parse(text: &str, bits: usize) -> Result<Self, PrecisionError> {
        let bits = bits.max(64);
        let value = with_consts(|cc| {
            BigFloat::parse(text, astro_float::Radix::Dec, bits, ROUNDING, cc)
        });
        if value.is_nan() {
            return Err(PrecisionError::Parse(text.to_owned()));
        }
        Ok(HpReal { value, bits })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn pi(bits: usize) -> Self {
        let bits = bits.max(64);
        HpReal {
            value: with_consts(|cc| cc.pi(bits, ROUNDING)),
            bits,
        }
    }

    /// Nearest double, ties to even.
    ///
    /// Results whose magnitude exceeds the double range are reported as
    /// [`PrecisionError::Overflow`] carrying the signed infinity.
    pub fn to_double(&self) -> Result<f64, PrecisionError> {
        let d = self.to_f64();
        if d.is_infinite() && !self.value.is_inf() {
            return Err(PrecisionError::Overflow(d));
        }
        if self.value.is_nan() {
            return Err(PrecisionError::NotANumber);
        }
        Ok(d)
    }

    fn wrap(&self, value: BigFloat, bits: usize) -> Self {
        HpReal { value, bits }
    }

    fn binary(self, rhs: HpReal, op: impl FnOnce(&BigFloat, &BigFloat, usize) -> BigFloat) -> Self {
        let bits = self.bits.max(rhs.bits);
        let value = op(&self.value, &rhs.value, bits);
        HpReal { value, bits }
    }
}

/// Rounds a finite, nonzero multiprecision value to the nearest double.
///
/// astro-float stores `0.1m × 2^e` with the mantissa normalised so the top bit
/// of the most significant word is set.
fn round_to_double(v: &BigFloat) -> f64 {
    if v.is_nan() {
        return f64::NAN;
    }
    if v.is_inf_pos() {
        return f64::INFINITY;
    }
    if v.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if v.is_zero() {
        return 0.0;
    }
    let (words, _, sign, exponent, _) = v.as_raw_parts().expect("finite value has raw parts");
    let negative = sign == Sign::Neg;
    let top = *words.last().expect("nonempty mantissa");
    let sticky_below = words[..words.len() - 1].iter().any(|&w| w != 0);
    debug_assert!(top >> 63 == 1, "mantissa is normalised");

    // Value lies in [2^(e-1), 2^e); keep the bits down to weight 2^-1074.
    let e = exponent as i64;
    let magnitude = if e > 1024 {
        f64::INFINITY
    } else {
        let keep = (e + 1074).min(53);
        if keep < 0 {
            0.0
        } else if keep == 0 {
            // [2^-1075, 2^-1074): exactly 2^-1075 ties to zero.
            let above_half = (top << 1) != 0 || sticky_below;
            if above_half {
                f64::from_bits(1)
            } else {
                0.0
            }
        } else {
            let shift = 64 - keep as u32;
            let mut q = top >> shift;
            let rem = top & ((1u64 << shift) - 1);
            let half = 1u64 << (shift - 1);
            if rem > half || (rem == half && (sticky_below || q & 1 == 1)) {
                q += 1;
            }
            scale_by_pow2(q as f64, e - keep)
        }
    };
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

fn scale_by_pow2(x: f64, mut exp: i64) -> f64 {
    let mut out = x;
    while exp > 1023 {
        out *= f64::from_bits(0x7FE0_0000_0000_0000); // 2^1023
        exp -= 1023;
    }
    while exp < -1022 {
        // x is an integer below 2^54, so stepping via 2^-1022 keeps it exact
        // until the final (exact) subnormal scaling.
        if exp >= -1074 {
            let factor = f64::from_bits(1u64 << (exp + 1074));
            return out * factor;
        }
        out *= f64::from_bits(1u64 << 52); // 2^-1022
        exp += 1022;
    }
    out * f64::from_bits(((exp + 1023) as u64) << 52)
}

impl fmt::Debug for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HpReal({}, {} bits)", self.value, self.bits)
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for HpReal {
    type Output = HpReal;
    fn add(self, rhs: HpReal) -> HpReal {
        self.binary(rhs, |a, b, p| a.add(b, p, ROUNDING))
    }
}

impl Sub for HpReal {
    type Output = HpReal;
    fn sub(self, rhs: HpReal) -> HpReal {
        self.binary(rhs, |a, b, p| a.sub(b, p, ROUNDING))
    }
}

impl Mul for HpReal {
    type Output = HpReal;
    fn mul(self, rhs: HpReal) -> HpReal {
        self.binary(rhs, |a, b, p| a.mul(b, p, ROUNDING))
    }
}

impl Div for HpReal {
    type Output = HpReal;
    fn div(self, rhs: HpReal) -> HpReal {
        self.binary(rhs, |a, b, p| a.div(b, p, ROUNDING))
    }
}

impl Neg for HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        HpReal {
            value: self.value.neg(),
            bits: self.bits,
        }
    }
}

impl PartialEq for HpReal {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for HpReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl Real for HpReal {
    fn lift(&self, value: f64) -> Self {
        HpReal::from_f64(value, self.bits)
    }

    fn sqrt(&self) -> Self {
        self.wrap(self.value.sqrt(self.bits, ROUNDING), self.bits)
    }

    fn exp(&self) -> Self {
        let v = with_consts(|cc| self.value.exp(self.bits, ROUNDING, cc));
        self.wrap(v, self.bits)
    }

    fn ln(&self) -> Self {
        let v = with_consts(|cc| self.value.ln(self.bits, ROUNDING, cc));
        self.wrap(v, self.bits)
    }

    fn sin(&self) -> Self {
        let v = with_consts(|cc| self.value.sin(self.bits, ROUNDING, cc));
        self.wrap(v, self.bits)
    }

    fn cos(&self) -> Self {
        let v = with_consts(|cc| self.value.cos(self.bits, ROUNDING, cc));
        self.wrap(v, self.bits)
    }

    fn atan2(&self, x: &Self) -> Self {
        let bits = self.bits.max(x.bits);
        let pi = HpReal::pi(bits);
        if x.is_zero() {
            if self.is_zero() {
                return HpReal::from_f64(0.0, bits);
            }
            let half_pi = pi / HpReal::from_f64(2.0, bits);
            return if self.is_sign_negative() {
                -half_pi
            } else {
                half_pi
            };
        }
        let ratio = self.value.div(&x.value, bits, ROUNDING);
        let base = HpReal {
            value: with_consts(|cc| ratio.atan(bits, ROUNDING, cc)),
            bits,
        };
        if !x.is_sign_negative() {
            base
        } else if self.is_sign_negative() {
            base - pi
        } else {
            base + pi
        }
    }

    fn abs(&self) -> Self {
        self.wrap(self.value.abs(), self.bits)
    }

    fn is_sign_negative(&self) -> bool {
        self.value.is_negative()
    }

    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn is_finite(&self) -> bool {
        !(self.value.is_nan() || self.value.is_inf())
    }

    fn to_f64(&self) -> f64 {
        round_to_double(&self.value)
    }
}

/// Complex number over any [`Real`] scalar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Complex<T> {
    pub re: T,
    pub im: T,
}

/// Complex with `HpReal` parts at equal precision.
pub type HpComplex = Complex<HpReal>;

impl<T> Complex<T> {
    pub const fn new(re: T, im: T) -> Self {
        Complex { re, im }
    }
}

impl<T: Real> Complex<T> {
    pub fn from_real(re: T) -> Self {
        let im = re.lift(0.0);
        Complex { re, im }
    }

    /// `i` at the precision of `like`.
    pub fn i(like: &T) -> Self {
        Complex::new(like.lift(0.0), like.lift(1.0))
    }

    pub fn scale(self, k: T) -> Self {
        Complex::new(self.re * k.clone(), self.im * k)
    }

    pub fn norm_sqr(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn abs(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Principal square root (branch cut along the negative real axis).
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let two = self.re.lift(2.0);
        let r = self.abs();
        if !self.re.is_sign_negative() {
            let t = ((r + self.re.clone()) / two.clone()).sqrt();
            let im = self.im.clone() / (two * t.clone());
            Complex::new(t, im)
        } else {
            let t = ((r - self.re.clone()) / two.clone()).sqrt();
            let re = self.im.abs() / (two * t.clone());
            let im = if self.im.is_sign_negative() { -t } else { t };
            Complex::new(re, im)
        }
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Complex::new(m.clone() * self.im.cos(), m * self.im.sin())
    }

    /// Principal logarithm, imaginary part in (-pi, pi].
    pub fn ln(&self) -> Self {
        Complex::new(self.abs().ln(), self.im.atan2(&self.re))
    }

    pub fn to_f64(&self) -> Complex<f64> {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl<T: Real> Add for Complex<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Complex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<T: Real> Sub for Complex<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Complex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<T: Real> Mul for Complex<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        Complex::new(re, im)
    }
}

impl<T: Real> Div for Complex<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let den = rhs.norm_sqr();
        let re = self.re.clone() * rhs.re.clone() + self.im.clone() * rhs.im.clone();
        let im = self.im * rhs.re - self.re * rhs.im;
        Complex::new(re / den.clone(), im / den)
    }
}

impl<T: Real> Neg for Complex<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Complex::new(-self.re, -self.im)
    }
}

impl fmt::Display for Complex<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_sign_negative() {
            write!(f, "{:.15} - {:.15}i", self.re, -self.im)
        } else {
            write!(f, "{:.15} + {:.15}i", self.re, self.im)
        }
    }
}
