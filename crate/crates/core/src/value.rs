use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Relative tolerance used when at least one side of a comparison is a float.
pub const APPROX_REL_TOL: f64 = 1e-9;

/// Value of an arithmetic function: exact whenever the function is, a float
/// only once a transcendental transform (real exponent base, logarithm) has
/// been applied.
#[derive(Clone, Debug)]
pub enum Value {
    Exact(BigRational),
    Approx(f64),
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Value::Exact(BigRational::one())
    }

    pub fn from_int<T: Into<BigInt>>(n: T) -> Self {
        Value::Exact(BigRational::from_integer(n.into()))
    }

    pub fn from_biguint(n: BigUint) -> Self {
        Value::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational_to_f64(r),
            Value::Approx(x) => *x,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_positive(),
            Value::Approx(x) => *x > 0.0,
        }
    }

    /// Natural logarithm, `None` for nonpositive values.
    pub fn ln(&self) -> Option<f64> {
        match self {
            Value::Exact(r) if r.is_positive() => Some(ln_rational(r)),
            Value::Approx(x) if *x > 0.0 => Some(x.ln()),
            _ => None,
        }
    }

    /// Exact equality for two exact values, relative tolerance otherwise.
    pub fn approx_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                a == b || (a - b).abs() <= APPROX_REL_TOL * a.abs().max(b.abs()).max(1.0)
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(r * c),
            Value::Approx(x) => Value::Approx(x * rational_to_f64(c)),
        }
    }
}

impl Add for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Approx(self.to_f64() + rhs.to_f64()),
        }
    }
}

impl Mul for &Value {
    type Output = Value;
    fn mul(self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            _ => Value::Approx(self.to_f64() * rhs.to_f64()),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Approx(x) => write!(f, "{}", format_float(*x)),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Exact(_) => s.serialize_str(&self.to_string()),
            Value::Approx(x) => s.serialize_f64(round_sig(*x, 12)),
        }
    }
}

/// Serializes anything printable as a JSON string; used for big integers.
pub(crate) fn serialize_display<T: fmt::Display, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub(crate) fn serialize_display_vec<T: fmt::Display, S: Serializer>(
    xs: &[T],
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

/// Float conversion that survives numerators and denominators beyond `f64`
/// range as long as the quotient itself is representable.
pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * ln_rational(&r.abs()).exp()
}

fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub(crate) fn ln_rational(r: &BigRational) -> f64 {
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    ln_biguint(num) - ln_biguint(den)
}

/// Rounds to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

pub(crate) fn format_float(x: f64) -> String {
    round_sig(x, 12).to_string()
}
