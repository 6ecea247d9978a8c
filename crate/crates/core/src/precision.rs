//! Adaptive-precision arithmetic.
//!
//! Every approximate quantity in the crate is carried as an [`Interval`]
//! whose endpoints are computed with directed rounding, so a sign read off
//! an interval that excludes zero is certified. When an interval is too wide
//! to decide a question, callers recompute at a larger mantissa through
//! [`certified_sign`] until the answer is certain or the budget's cap is
//! reached.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::{Constant, Round};
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MANTISSA: u32 = 256;
pub const DEFAULT_CAP: u32 = 8192;
pub const DEFAULT_EPS: f64 = 1e-12;
pub const MIN_MANTISSA: u32 = 64;

pub const PRECISION_BITS_VAR: &str = "FEWOPT_PRECISION_BITS";
pub const PRECISION_CAP_VAR: &str = "FEWOPT_PRECISION_CAP";

/// Working precision, target accuracy and the escalation ceiling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionBudget {
    pub mantissa: u32,
    pub cap: u32,
    pub target_eps: f64,
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        PrecisionBudget {
            mantissa: DEFAULT_MANTISSA,
            cap: DEFAULT_CAP,
            target_eps: DEFAULT_EPS,
        }
    }
}

impl PrecisionBudget {
    pub fn new(mantissa: u32, cap: u32, target_eps: f64) -> Result<Self> {
        if mantissa < MIN_MANTISSA || mantissa > cap {
            return Err(Error::InvalidInput(format!(
                "precision budget requires {MIN_MANTISSA} <= mantissa ({mantissa}) <= cap ({cap})"
            )));
        }
        if !(target_eps > 0.0 && target_eps.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "target eps must be positive and finite, got {target_eps}"
            )));
        }
        Ok(PrecisionBudget {
            mantissa,
            cap,
            target_eps,
        })
    }

    /// Defaults overridden by `FEWOPT_PRECISION_BITS` / `FEWOPT_PRECISION_CAP`.
    pub fn from_env() -> Result<Self> {
        let read = |name: &str, default: u32| -> Result<u32> {
            match std::env::var(name) {
                Ok(raw) => raw.trim().parse::<u32>().map_err(|_| {
                    Error::InvalidInput(format!("{name} must be a positive integer, got {raw:?}"))
                }),
                Err(_) => Ok(default),
            }
        };
        let mantissa = read(PRECISION_BITS_VAR, DEFAULT_MANTISSA)?;
        let cap = read(PRECISION_CAP_VAR, DEFAULT_CAP.max(mantissa))?;
        PrecisionBudget::new(mantissa, cap, DEFAULT_EPS)
    }

    pub fn with_eps(self, target_eps: f64) -> Result<Self> {
        PrecisionBudget::new(self.mantissa, self.cap, target_eps)
    }

    /// Same budget starting at `bits` (clamped into `[MIN_MANTISSA, cap]`).
    pub fn at(self, bits: u32) -> Self {
        PrecisionBudget {
            mantissa: bits.clamp(MIN_MANTISSA, self.cap),
            ..self
        }
    }

    /// Doubled mantissa, or `None` once the cap has been used.
    pub fn escalated(self) -> Option<Self> {
        if self.mantissa >= self.cap {
            None
        } else {
            Some(self.at(self.mantissa.saturating_mul(2)))
        }
    }

    /// Mantissa large enough that a relative error of `eps` is comfortably
    /// representable, never below the budget's own mantissa.
    pub fn bits_for_eps(&self, eps: f64) -> u32 {
        let needed = if eps > 0.0 && eps < 1.0 {
            (-eps.log2()).ceil() as u32 * 2 + 32
        } else {
            0
        };
        needed.clamp(self.mantissa, self.cap)
    }

    /// `2^{-mantissa/2}`, the default relative tolerance.
    pub fn half_tolerance(&self) -> Float {
        pow2(self.mantissa, -(self.mantissa as i32 / 2))
    }

    /// `2^{-mantissa/4}`, the vanishing threshold for discriminant forms.
    pub fn quarter_tolerance(&self) -> Float {
        pow2(self.mantissa, -(self.mantissa as i32 / 4))
    }
}

/// `2^k` at precision `prec` (exact).
pub fn pow2(prec: u32, k: i32) -> Float {
    Float::with_val(prec, 1) << k
}

pub fn euler(prec: u32) -> Float {
    Float::with_val(prec, 1).exp()
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// A closed interval `[lo, hi]` with outward-rounded endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

fn round_to(prec: u32, x: &Float, round: Round) -> Float {
    Float::with_val_round(prec, x, round).0
}

impl Interval {
    /// Encloses `x`; exact whenever `x` fits in `prec` bits.
    pub fn point(x: &Float, prec: u32) -> Self {
        Interval {
            lo: round_to(prec, x, Round::Down),
            hi: round_to(prec, x, Round::Up),
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        let x = Float::with_val(prec.max(64), v);
        Interval::point(&x, prec)
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        let x = Float::with_val(prec.max(53), v);
        Interval::point(&x, prec)
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        Interval {
            lo: Float::with_val_round(prec, q, Round::Down).0,
            hi: Float::with_val_round(prec, q, Round::Up).0,
        }
    }

    /// Panics if `lo > hi`; both endpoints are re-rounded outward to `prec`.
    pub fn from_bounds(lo: &Float, hi: &Float, prec: u32) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        Interval {
            lo: round_to(prec, lo, Round::Down),
            hi: round_to(prec, hi, Round::Up),
        }
    }

    pub fn euler(prec: u32) -> Self {
        Interval::from_i64(1, prec).exp()
    }

    pub fn pi(prec: u32) -> Self {
        Interval {
            lo: Float::with_val_round(prec, Constant::Pi, Round::Down).0,
            hi: Float::with_val_round(prec, Constant::Pi, Round::Up).0,
        }
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn mid(&self) -> Float {
        let prec = self.prec();
        if self.lo.is_infinite() || self.hi.is_infinite() {
            return Float::with_val(prec, f64::NAN);
        }
        let mut m = Float::with_val(prec + 1, &self.lo + &self.hi);
        m >>= 1;
        Float::with_val(prec, m)
    }

    pub fn radius(&self) -> Float {
        let prec = self.prec();
        let mid = self.mid();
        let up = Float::with_val_round(prec, &self.hi - &mid, Round::Up).0;
        let down = Float::with_val_round(prec, &mid - &self.lo, Round::Up).0;
        up.max(&down)
    }

    pub fn width(&self) -> Float {
        Float::with_val_round(self.prec(), &self.hi - &self.lo, Round::Up).0
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn contains(&self, x: &Float) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0
    }

    /// Certified sign, `None` when the interval straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.is_positive() {
            Some(Ordering::Greater)
        } else if self.is_negative() {
            Some(Ordering::Less)
        } else if self.lo == 0 && self.hi == 0 {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Largest relative distance between the midpoint and either endpoint.
    pub fn relative_radius(&self) -> f64 {
        let r = self.radius();
        if r.is_zero() {
            return 0.0;
        }
        let m = self.mid();
        if m.is_zero() {
            return f64::INFINITY;
        }
        Float::with_val(64, &r / &*m.as_abs()).to_f64()
    }

    /// `radius / max(1, |mid|)`: relative above one, absolute below.
    pub fn mixed_radius(&self) -> f64 {
        let r = self.radius();
        let m = self.mid();
        let scale = if m.cmp_abs(&Float::with_val(16, 1)) == Some(Ordering::Greater) {
            Float::with_val(64, &*m.as_abs())
        } else {
            Float::with_val(64, 1)
        };
        Float::with_val(64, &r / &scale).to_f64()
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(&other.lo),
            hi: self.hi.clone().max(&other.hi),
        }
    }

    /// Enclosure of `max(x, y)` for `x` in `self`, `y` in `other`.
    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(&other.lo),
            hi: self.hi.clone().max(&other.hi),
        }
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0 {
            self.clone()
        } else if self.hi <= 0 {
            -self
        } else {
            let prec = self.prec();
            let neg_lo = Float::with_val(prec, -&self.lo);
            Interval {
                lo: Float::with_val(prec, 0),
                hi: neg_lo.max(&self.hi),
            }
        }
    }

    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        let prec = self.prec();
        Some(Interval {
            lo: Float::with_val_round(prec, self.hi.recip_ref(), Round::Down).0,
            hi: Float::with_val_round(prec, self.lo.recip_ref(), Round::Up).0,
        })
    }

    pub fn checked_div(&self, other: &Interval) -> Option<Interval> {
        other.recip().map(|r| self * &r)
    }

    pub fn ln(&self) -> Result<Interval> {
        if self.lo <= 0 {
            return Err(Error::NonpositiveBase);
        }
        let prec = self.prec();
        Ok(Interval {
            lo: Float::with_val_round(prec, self.lo.ln_ref(), Round::Down).0,
            hi: Float::with_val_round(prec, self.hi.ln_ref(), Round::Up).0,
        })
    }

    pub fn exp(&self) -> Interval {
        let prec = self.prec();
        Interval {
            lo: Float::with_val_round(prec, self.lo.exp_ref(), Round::Down).0,
            hi: Float::with_val_round(prec, self.hi.exp_ref(), Round::Up).0,
        }
    }

    pub fn sqrt(&self) -> Result<Interval> {
        if self.lo < 0 {
            return Err(Error::NonpositiveBase);
        }
        let prec = self.prec();
        Ok(Interval {
            lo: Float::with_val_round(prec, self.lo.sqrt_ref(), Round::Down).0,
            hi: Float::with_val_round(prec, self.hi.sqrt_ref(), Round::Up).0,
        })
    }

    pub fn square(&self) -> Interval {
        let a = self.abs();
        &a * &a
    }

    /// `self^exponent = exp(exponent · ln self)` for a positive base.
    pub fn powf(&self, exponent: &Interval) -> Result<Interval> {
        Ok((exponent * &self.ln()?).exp())
    }

    pub fn mul_float(&self, x: &Float) -> Interval {
        self * &Interval::point(x, self.prec())
    }

    pub fn to_certified(&self) -> CertifiedValue {
        CertifiedValue {
            value: self.mid(),
            error_radius: self.radius(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            self.lo.to_string_radix(10, Some(20)),
            self.hi.to_string_radix(10, Some(20))
        )
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        let prec = self.prec().max(rhs.prec());
        Interval {
            lo: Float::with_val_round(prec, &self.lo + &rhs.lo, Round::Down).0,
            hi: Float::with_val_round(prec, &self.hi + &rhs.hi, Round::Up).0,
        }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        let prec = self.prec().max(rhs.prec());
        Interval {
            lo: Float::with_val_round(prec, &self.lo - &rhs.hi, Round::Down).0,
            hi: Float::with_val_round(prec, &self.hi - &rhs.lo, Round::Up).0,
        }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let prec = self.prec().max(rhs.prec());
        let pairs = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in pairs {
            let down = Float::with_val_round(prec, a * b, Round::Down).0;
            let up = Float::with_val_round(prec, a * b, Round::Up).0;
            lo = Some(match lo {
                Some(l) if l <= down => l,
                _ => down,
            });
            hi = Some(match hi {
                Some(h) if h >= up => h,
                _ => up,
            });
        }
        Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: Float::with_val(self.hi.prec(), -&self.hi),
            hi: Float::with_val(self.lo.prec(), -&self.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        -&self
    }
}

/// A value with a rigorous absolute error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedValue {
    pub value: Float,
    pub error_radius: Float,
}

impl CertifiedValue {
    pub fn exact(value: Float) -> Self {
        let prec = value.prec();
        CertifiedValue {
            value,
            error_radius: Float::with_val(prec, 0),
        }
    }

    pub fn to_interval(&self) -> Interval {
        let prec = self.value.prec().max(self.error_radius.prec());
        Interval {
            lo: Float::with_val_round(prec, &self.value - &self.error_radius, Round::Down).0,
            hi: Float::with_val_round(prec, &self.value + &self.error_radius, Round::Up).0,
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.to_interval().contains_zero()
    }

    pub fn contains(&self, x: &Float) -> bool {
        self.to_interval().contains(x)
    }

    pub fn relative_error(&self) -> f64 {
        self.to_interval().relative_radius()
    }
}

/// Outcome of a sign determination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifiedSign {
    Negative,
    ZeroAtCap,
    Positive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignReport {
    pub sign: CertifiedSign,
    pub value: CertifiedValue,
    pub bits: u32,
}

/// Determines the sign of a quantity, recomputing it with a doubled mantissa
/// until zero is excluded from its enclosure or the cap is reached.
///
/// `recompute(bits)` must return an enclosure of the same quantity computed
/// at `bits` of working precision.
pub fn certified_sign<F>(
    initial: CertifiedValue,
    budget: &PrecisionBudget,
    mut recompute: F,
) -> Result<SignReport>
where
    F: FnMut(u32) -> Result<CertifiedValue>,
{
    let mut bits = budget.mantissa;
    let mut value = initial;
    loop {
        let enclosure = value.to_interval();
        if enclosure.is_positive() {
            return Ok(SignReport {
                sign: CertifiedSign::Positive,
                value,
                bits,
            });
        }
        if enclosure.is_negative() {
            return Ok(SignReport {
                sign: CertifiedSign::Negative,
                value,
                bits,
            });
        }
        if bits >= budget.cap {
            return Ok(SignReport {
                sign: CertifiedSign::ZeroAtCap,
                value,
                bits,
            });
        }
        bits = bits.saturating_mul(2).min(budget.cap);
        value = recompute(bits)?;
    }
}

/// One term `weight · ln(base)` of a log-linear form, both given as enclosures.
#[derive(Clone, Debug)]
pub struct LogTerm {
    pub weight: Interval,
    pub base: Interval,
}

/// Enclosure of `Σ weight_i · ln(base_i)`.
pub fn log_linear_form_enclosure(terms: &[LogTerm]) -> Result<Interval> {
    let prec = terms
        .iter()
        .map(|t| t.weight.prec().max(t.base.prec()))
        .max()
        .unwrap_or(MIN_MANTISSA);
    let mut acc = Interval::from_i64(0, prec);
    for term in terms {
        let ln = term.base.ln()?;
        acc = &acc + &(&term.weight * &ln);
    }
    Ok(acc)
}

/// `Σ weight · ln(base)` for exactly-known weights and bases, at `prec` bits.
pub fn log_linear_form(terms: &[(Float, Float)], prec: u32) -> Result<CertifiedValue> {
    let mut enclosed = Vec::with_capacity(terms.len());
    for (weight, base) in terms {
        if *base <= 0 || base.is_nan() {
            return Err(Error::NonpositiveBase);
        }
        enclosed.push(LogTerm {
            weight: Interval::point(weight, prec),
            base: Interval::point(base, prec),
        });
    }
    Ok(log_linear_form_enclosure(&enclosed)?.to_certified())
}

/// `base^exponent` with relative error at most `2^{-prec/2}`.
pub fn power(base: &Float, exponent: &Float, prec: u32) -> Result<CertifiedValue> {
    if *base <= 0 || base.is_nan() {
        return Err(Error::NonpositiveBase);
    }
    if exponent.is_zero() {
        return Ok(CertifiedValue::exact(Float::with_val(prec, 1)));
    }
    let target = pow2(64, -(prec as i32 / 2)).to_f64();
    let mut bits = prec + 32;
    loop {
        let b = Interval::point(base, bits);
        let e = Interval::point(exponent, bits);
        let value = b.powf(&e)?;
        let rel = value.relative_radius();
        if rel <= target || bits >= prec.saturating_mul(16) {
            return Ok(value.to_certified());
        }
        bits *= 2;
    }
}
