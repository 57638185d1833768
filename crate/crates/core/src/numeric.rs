//! Scalars in two modes: exact rationals and tolerance-aware `f64`.
//!
//! Every engine is generic over [`Scalar`]. Sign decisions go through
//! [`Scalar::sign`], which is exact for [`Rational`] and compares against
//! the policy tolerance for `f64`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub const DEFAULT_EPSILON: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericPolicy {
    pub mode: Mode,
    /// Zero band for float comparisons; ignored in exact mode.
    pub epsilon: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            mode: Mode::Exact,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl NumericPolicy {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn float(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )));
        }
        Ok(NumericPolicy {
            mode: Mode::Float,
            epsilon,
        })
    }

    /// `a ≥ b` up to the policy tolerance.
    pub fn ge<S: Scalar>(&self, a: &S, b: &S) -> Result<bool> {
        Ok((a.clone() - b.clone()).sign(self)? != Sign::Negative)
    }

    /// `a = b` up to the policy tolerance.
    pub fn eq<S: Scalar>(&self, a: &S, b: &S) -> Result<bool> {
        Ok((a.clone() - b.clone()).sign(self)? == Sign::Zero)
    }
}

/// Field element usable by the coefficient engines.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const MODE: Mode;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    fn sign(&self, policy: &NumericPolicy) -> Result<Sign>;

    /// Exact values serialize as `"a/b"` strings, floats as JSON numbers.
    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;

    fn parse(s: &str) -> Result<Self> {
        parse_rational(s).map(|r| Self::from_rational(&r))
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sign(&self, _policy: &NumericPolicy) -> Result<Sign> {
        Ok(if self.is_zero() {
            Sign::Zero
        } else if self.is_negative() {
            Sign::Negative
        } else {
            Sign::Positive
        })
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            // Numbers go through their decimal text so "0.1" stays 1/10.
            Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(Error::Parse {
                at: "value".into(),
                msg: format!("expected number or \"a/b\" string, found {other}"),
            }),
        }
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_rational(r: &Rational) -> Self {
        Scalar::to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sign(&self, policy: &NumericPolicy) -> Result<Sign> {
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(if self.abs() <= policy.epsilon {
            Sign::Zero
        } else if *self < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        })
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n.as_f64().ok_or(Error::NonFinite),
            Value::String(s) => Ok(Scalar::to_f64(&parse_rational(s)?)),
            other => Err(Error::Parse {
                at: "value".into(),
                msg: format!("expected number or \"a/b\" string, found {other}"),
            }),
        }
    }
}

/// Parses `"a/b"`, an integer, or a decimal with optional exponent
/// (`"0.25"`, `"1e-6"`, `"-3.5E2"`) into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = |msg: &str| Error::Parse {
        at: format!("`{t}`"),
        msg: msg.to_string(),
    };
    if t.is_empty() {
        return Err(bad("empty number"));
    }
    if let Some((num, den)) = t.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad("bad numerator"))?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad("bad denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }

    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e = t[pos + 1..]
                .parse::<i32>()
                .map_err(|_| bad("bad exponent"))?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, mantissa) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad("no digits"));
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(bad("not a number"));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&digits).map_err(|_| bad("bad digits"))?);
    let scale = exp as i64 - frac_part.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= pow;
    } else {
        value /= pow;
    }
    Ok(if negative { -value } else { value })
}

/// Exact value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or(Error::NonFinite)
}

/// Continued-fraction convergent of `x` closest in denominator size whose
/// relative error is at most `rel_tol`.
pub fn rationalize(x: f64, rel_tol: f64) -> Result<Rational> {
    let target = rational_from_f64(x)?;
    if target.is_zero() {
        return Ok(target);
    }
    let tol = target.abs() * rational_from_f64(rel_tol)?;

    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut rest = target.clone();
    loop {
        let a = rest.numer().div_floor(rest.denom());
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let approx = Rational::new(h.clone(), k.clone());
        let frac = &rest - Rational::from_integer(a);
        if (&approx - &target).abs() <= tol || frac.is_zero() {
            return Ok(approx);
        }
        rest = frac.recip();
    }
}

/// Parses a per-vertex vector document: `{"uniform": v}` or
/// `{"values": [v, ...]}` with exactly `n` entries. Each `v` is a JSON number
/// or an `"a/b"` / decimal string.
pub fn parse_vector_json<S: Scalar>(document: &str, n: usize) -> Result<Vec<S>> {
    let doc: Value = serde_json::from_str(document).map_err(|e| Error::Parse {
        at: format!("line {} column {}", e.line(), e.column()),
        msg: e.to_string(),
    })?;
    let obj = doc.as_object().ok_or_else(|| Error::Parse {
        at: "document".into(),
        msg: "expected an object with `uniform` or `values`".into(),
    })?;
    match (obj.get("uniform"), obj.get("values")) {
        (Some(u), None) => Ok(vec![S::from_json(u)?; n]),
        (None, Some(Value::Array(vals))) => {
            if vals.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: vals.len(),
                });
            }
            vals.iter().map(S::from_json).collect()
        }
        _ => Err(Error::Parse {
            at: "document".into(),
            msg: "expected exactly one of `uniform` or `values` (array)".into(),
        }),
    }
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
