//! Scalar types shared by every pipeline stage.
//!
//! Two concrete scalars implement the [`Scalar`] trait: [`ExactScalar`]
//! (arbitrary-precision rationals, always gcd-reduced with positive
//! denominator) and [`PrecisionScalar`] (multiprecision floats tagged with a
//! decimal working-digit count). Pipeline code — elimination, band
//! extraction, matrix powers — is generic over the trait, so the exact and
//! numeric modes share one implementation.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Minimum decimal working precision carried by a [`PrecisionScalar`].
pub const MIN_DIGITS: u32 = 16;

/// Arbitrary-precision rational number.
///
/// Invariants (maintained by the underlying representation): denominator > 0
/// and gcd(|numerator|, denominator) = 1 after every operation, so equality
/// and ordering are exact.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactScalar(pub BigRational);

impl ExactScalar {
    pub fn int(v: i64) -> Self {
        ExactScalar(BigRational::from_integer(BigInt::from(v)))
    }

    /// `p/q`; panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        ExactScalar(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn zero_v() -> Self {
        ExactScalar(BigRational::zero())
    }

    pub fn one_v() -> Self {
        ExactScalar(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Integer power with negative exponents allowed (requires nonzero base).
    pub fn pow(&self, e: i32) -> Self {
        ExactScalar(self.0.pow(e))
    }

    pub fn recip(&self) -> Self {
        ExactScalar(self.0.recip())
    }

    pub fn abs_v(&self) -> Self {
        ExactScalar(self.0.abs())
    }

    pub fn min_v(a: &Self, b: &Self) -> Self {
        if a <= b { a.clone() } else { b.clone() }
    }

    pub fn max_v(a: &Self, b: &Self) -> Self {
        if a >= b { a.clone() } else { b.clone() }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ExactScalar {
    /// Displays as `p/q` (or plain `p` for integers), matching the exchange
    /// format used in JSON exports and CLI parameters.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl serde::Serialize for ExactScalar {
    /// Serializes as the `p/q` string form so JSON stays exact (no float
    /// round-trip) and human-diffable.
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for ExactScalar {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    /// Accepts `p/q` fractions, plain integers, and decimal literals.
    /// Decimals are expanded digit-for-digit (`0.25` -> `25/100`), never
    /// routed through binary floating point.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty rational literal".into()));
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let q: BigInt = q
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(ExactScalar(BigRational::new(p, q)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.starts_with('-');
            let int_part: BigInt = if int.is_empty() || int == "-" {
                BigInt::zero()
            } else {
                int.parse()
                    .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?
            };
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("bad decimal in {s:?}")));
            }
            let frac_num: BigInt = frac
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?;
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let mag = int_part.abs() * &scale + frac_num;
            let signed = if neg { -mag } else { mag };
            return Ok(ExactScalar(BigRational::new(signed, scale)));
        }
        let v: BigInt = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational literal {s:?}")))?;
        Ok(ExactScalar(BigRational::from_integer(v)))
    }
}

macro_rules! exact_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                ExactScalar(std::ops::$trait::$method(&self.0, &rhs.0))
            }
        }
        impl std::ops::$trait for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                ExactScalar(std::ops::$trait::$method(self.0, rhs.0))
            }
        }
        impl std::ops::$trait<&ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                ExactScalar(std::ops::$trait::$method(self.0, &rhs.0))
            }
        }
    };
}

exact_binop!(Add, add);
exact_binop!(Sub, sub);
exact_binop!(Mul, mul);
exact_binop!(Div, div);

impl std::ops::Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(-&self.0)
    }
}

impl std::ops::Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(-self.0)
    }
}

impl From<i64> for ExactScalar {
    fn from(v: i64) -> Self {
        ExactScalar::int(v)
    }
}

impl From<(i64, i64)> for ExactScalar {
    fn from((p, q): (i64, i64)) -> Self {
        ExactScalar::ratio(p, q)
    }
}

fn digits_to_bits(digits: u32) -> u32 {
    // log2(10) = 3.3219...; 16 guard bits absorb rounding in conversions.
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

/// Multiprecision float tagged with its decimal working precision.
///
/// Binary operations carry the minimum of the two operand digit counts
/// (a value cannot gain accuracy by arithmetic); the count never drops
/// below [`MIN_DIGITS`].
#[derive(Clone)]
pub struct PrecisionScalar {
    f: rug::Float,
    digits: u32,
}

impl PrecisionScalar {
    pub fn from_f64(v: f64, digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        PrecisionScalar { f: rug::Float::with_val(digits_to_bits(digits), v), digits }
    }

    pub fn from_i64_digits(v: i64, digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        PrecisionScalar { f: rug::Float::with_val(digits_to_bits(digits), v), digits }
    }

    pub fn from_exact_digits(v: &ExactScalar, digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        let bits = digits_to_bits(digits);
        let num = rug::Integer::from_str_radix(&v.numer().to_str_radix(16), 16)
            .expect("hex bigint route is infallible");
        let den = rug::Integer::from_str_radix(&v.denom().to_str_radix(16), 16)
            .expect("hex bigint route is infallible");
        let q = rug::Rational::from((num, den));
        PrecisionScalar { f: rug::Float::with_val(bits, q), digits }
    }

    pub fn from_rug(f: rug::Float, digits: u32) -> Self {
        PrecisionScalar { f, digits: digits.max(MIN_DIGITS) }
    }

    pub fn working_digits(&self) -> u32 {
        self.digits
    }

    pub fn rug(&self) -> &rug::Float {
        &self.f
    }

    pub fn bits(&self) -> u32 {
        digits_to_bits(self.digits)
    }

    fn carry(&self, rhs: &Self) -> u32 {
        self.digits.min(rhs.digits)
    }

    fn wrap(&self, digits: u32, f: rug::Float) -> Self {
        PrecisionScalar { f, digits }
    }

    /// The circle constant at the given working precision.
    pub fn pi(digits: u32) -> Self {
        let digits = digits.max(MIN_DIGITS);
        PrecisionScalar {
            f: rug::Float::with_val(digits_to_bits(digits), rug::float::Constant::Pi),
            digits,
        }
    }

    pub fn sqrt(&self) -> Self {
        self.wrap(self.digits, rug::Float::with_val(self.bits(), self.f.clone().sqrt()))
    }

    pub fn cbrt(&self) -> Self {
        self.wrap(self.digits, rug::Float::with_val(self.bits(), self.f.clone().cbrt()))
    }

    pub fn exp(&self) -> Self {
        self.wrap(self.digits, rug::Float::with_val(self.bits(), self.f.clone().exp()))
    }

    pub fn ln(&self) -> Result<Self> {
        if self.f <= 0 {
            return Err(Error::Domain("ln of a nonpositive value".into()));
        }
        Ok(self.wrap(self.digits, rug::Float::with_val(self.bits(), self.f.clone().ln())))
    }

    /// `self^e` for a real exponent; requires `self > 0` unless `e` is an
    /// integer value.
    pub fn pow(&self, e: &Self) -> Result<Self> {
        if self.f < 0 && !e.f.is_integer() {
            return Err(Error::Domain("negative base with non-integer exponent".into()));
        }
        let d = self.carry(e);
        Ok(self.wrap(
            d,
            rug::Float::with_val(digits_to_bits(d), rug::ops::Pow::pow(&self.f, &e.f)),
        ))
    }

    pub fn powi(&self, e: i32) -> Self {
        self.wrap(self.digits, rug::Float::with_val(self.bits(), rug::ops::Pow::pow(&self.f, e)))
    }

    pub fn is_finite(&self) -> bool {
        self.f.is_finite()
    }

    pub fn abs_f64(&self) -> f64 {
        self.f.clone().abs().to_f64()
    }
}

impl PartialEq for PrecisionScalar {
    /// Value equality only; the digit tag is bookkeeping, not identity.
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f
    }
}

impl fmt::Debug for PrecisionScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}~{}d", self.f.to_string_radix(10, Some(20.min(self.digits as usize))), self.digits)
    }
}

impl fmt::Display for PrecisionScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.f.to_string_radix(10, Some(self.digits as usize)))
    }
}

/// Serializes as the full-precision decimal string (the same text
/// [`fmt::Display`] produces), so exports keep every working digit.
impl serde::Serialize for PrecisionScalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Field operations shared by [`ExactScalar`] and [`PrecisionScalar`].
///
/// Constructors take `&self` as a context prototype so that numeric code
/// pieces inherit the right working precision without threading a separate
/// configuration value.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Caller guarantees `rhs` is nonzero (checked with [`Scalar::is_zero`]
    /// where zero is reachable, e.g. elimination pivots).
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn zero(&self) -> Self;
    fn one(&self) -> Self;
    fn from_i64(&self, v: i64) -> Self;
    fn from_exact(&self, v: &ExactScalar) -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    /// `|self| < |rhs|`.
    fn lt_abs(&self, rhs: &Self) -> bool;
    /// Re-expresses the value as a multiprecision float carrying the given
    /// decimal digit tag (exact values are converted at that precision;
    /// numeric values keep their mantissa and are re-stamped).
    fn to_precision(&self, digits: u32) -> PrecisionScalar;
    /// The magnitude below which a computed entry counts as a structural
    /// zero: `None` for exact arithmetic (zero means zero), `10^(5-digits)`
    /// for numeric arithmetic.
    fn structural_tol(&self) -> Option<f64>;
}

impl Scalar for ExactScalar {
    fn add(&self, rhs: &Self) -> Self {
        ExactScalar(&self.0 + &rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        ExactScalar(&self.0 - &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        ExactScalar(&self.0 * &rhs.0)
    }
    fn div(&self, rhs: &Self) -> Self {
        ExactScalar(&self.0 / &rhs.0)
    }
    fn neg(&self) -> Self {
        ExactScalar(-&self.0)
    }
    fn abs(&self) -> Self {
        ExactScalar(self.0.abs())
    }
    fn zero(&self) -> Self {
        ExactScalar::zero_v()
    }
    fn one(&self) -> Self {
        ExactScalar::one_v()
    }
    fn from_i64(&self, v: i64) -> Self {
        ExactScalar::int(v)
    }
    fn from_exact(&self, v: &ExactScalar) -> Self {
        v.clone()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn to_f64(&self) -> f64 {
        // Falls back to a quotient of float approximations when the parts
        // individually overflow f64.
        self.0
            .to_f64()
            .unwrap_or_else(|| {
                let n = self.0.numer().to_f64().unwrap_or(f64::NAN);
                let d = self.0.denom().to_f64().unwrap_or(f64::NAN);
                n / d
            })
    }
    fn lt_abs(&self, rhs: &Self) -> bool {
        self.0.abs() < rhs.0.abs()
    }
    fn to_precision(&self, digits: u32) -> PrecisionScalar {
        PrecisionScalar::from_exact_digits(self, digits)
    }
    fn structural_tol(&self) -> Option<f64> {
        None
    }
}

impl Scalar for PrecisionScalar {
    fn add(&self, rhs: &Self) -> Self {
        let d = self.carry(rhs);
        self.wrap(d, rug::Float::with_val(digits_to_bits(d), &self.f + &rhs.f))
    }
    fn sub(&self, rhs: &Self) -> Self {
        let d = self.carry(rhs);
        self.wrap(d, rug::Float::with_val(digits_to_bits(d), &self.f - &rhs.f))
    }
    fn mul(&self, rhs: &Self) -> Self {
        let d = self.carry(rhs);
        self.wrap(d, rug::Float::with_val(digits_to_bits(d), &self.f * &rhs.f))
    }
    fn div(&self, rhs: &Self) -> Self {
        let d = self.carry(rhs);
        self.wrap(d, rug::Float::with_val(digits_to_bits(d), &self.f / &rhs.f))
    }
    fn neg(&self) -> Self {
        self.wrap(self.digits, rug::Float::with_val(self.bits(), -&self.f))
    }
    fn abs(&self) -> Self {
        self.wrap(self.digits, rug::Float::with_val(self.bits(), self.f.clone().abs()))
    }
    fn zero(&self) -> Self {
        PrecisionScalar::from_i64_digits(0, self.digits)
    }
    fn one(&self) -> Self {
        PrecisionScalar::from_i64_digits(1, self.digits)
    }
    fn from_i64(&self, v: i64) -> Self {
        PrecisionScalar::from_i64_digits(v, self.digits)
    }
    fn from_exact(&self, v: &ExactScalar) -> Self {
        PrecisionScalar::from_exact_digits(v, self.digits)
    }
    fn is_zero(&self) -> bool {
        self.f.is_zero()
    }
    fn to_f64(&self) -> f64 {
        self.f.to_f64()
    }
    fn lt_abs(&self, rhs: &Self) -> bool {
        self.f.clone().abs() < rhs.f.clone().abs()
    }
    fn to_precision(&self, digits: u32) -> PrecisionScalar {
        PrecisionScalar::from_rug(self.f.clone(), digits)
    }
    fn structural_tol(&self) -> Option<f64> {
        Some(10f64.powi(5 - self.digits as i32))
    }
}
