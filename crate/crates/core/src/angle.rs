//! Exact angles measured in degrees.
//!
//! Every interior angle of a regular polygon is a rational number of degrees,
//! so all curvature bookkeeping stays in exact arithmetic. Conversion to
//! floating point happens only at presentation boundaries.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// An exact rational number of degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct AngleValue(Rational64);

impl AngleValue {
    pub const ZERO: AngleValue = AngleValue(Rational64::new_raw(0, 1));

    pub fn degrees(whole: i64) -> Self {
        AngleValue(Rational64::from_integer(whole))
    }

    /// `numer / denom` degrees. Panics if `denom == 0`.
    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        AngleValue(Rational64::new(numer, denom))
    }

    pub fn from_rational(r: Rational64) -> Self {
        AngleValue(r)
    }

    pub fn rational(self) -> Rational64 {
        self.0
    }

    pub fn numer(self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(self) -> Self {
        AngleValue(self.0.abs())
    }

    pub fn to_degrees_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_radians_f64(self) -> f64 {
        self.to_degrees_f64().to_radians()
    }

    /// `p/q` or `p` for integers; the wire form of an exact angle.
    pub fn exact_string(self) -> String {
        if self.denom() == 1 {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    /// Mixed-number rendering without the degree sign, e.g. `-8 4/7`.
    pub fn mixed_string(self) -> String {
        let (n, d) = (self.numer(), self.denom());
        if d == 1 {
            return n.to_string();
        }
        let sign = if n < 0 { "-" } else { "" };
        let whole = n.abs() / d;
        let rem = n.abs() % d;
        if whole == 0 {
            format!("{sign}{rem}/{d}")
        } else {
            format!("{sign}{whole} {rem}/{d}")
        }
    }

    /// Structured form used in machine-readable documents.
    pub fn to_doc(self) -> AngleDoc {
        AngleDoc {
            exact: self.exact_string(),
            display: self.to_string(),
            degrees: self.to_degrees_f64(),
        }
    }
}

/// Display uses mixed numbers and a degree sign: `128 4/7°`, `-60°`.
impl fmt::Display for AngleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}°", self.mixed_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid exact angle `{0}`")]
pub struct ParseAngleError(pub String);

/// Accepts `p`, `p/q` and mixed numbers `w p/q`, with an optional trailing `°`.
impl FromStr for AngleValue {
    type Err = ParseAngleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseAngleError(s.to_string());
        let t = s.trim().trim_end_matches('°').trim();
        if t.is_empty() {
            return Err(err());
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, t),
        };
        let parse_frac = |p: &str| -> Result<Rational64, ParseAngleError> {
            match p.split_once('/') {
                Some((a, b)) => {
                    let a: i64 = a.trim().parse().map_err(|_| err())?;
                    let b: i64 = b.trim().parse().map_err(|_| err())?;
                    if b <= 0 || a < 0 {
                        return Err(err());
                    }
                    Ok(Rational64::new(a, b))
                }
                None => {
                    let a: i64 = p.trim().parse().map_err(|_| err())?;
                    if a < 0 {
                        return Err(err());
                    }
                    Ok(Rational64::from_integer(a))
                }
            }
        };
        let value = match body.split_once(' ') {
            Some((whole, frac)) => {
                let w: i64 = whole.parse().map_err(|_| err())?;
                if w < 0 || !frac.contains('/') {
                    return Err(err());
                }
                Rational64::from_integer(w) + parse_frac(frac)?
            }
            None => parse_frac(body)?,
        };
        Ok(AngleValue(if neg { -value } else { value }))
    }
}

impl PartialOrd for AngleValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AngleValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl Add for AngleValue {
    type Output = AngleValue;
    fn add(self, rhs: Self) -> Self {
        AngleValue(self.0 + rhs.0)
    }
}

impl AddAssign for AngleValue {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl Sub for AngleValue {
    type Output = AngleValue;
    fn sub(self, rhs: Self) -> Self {
        AngleValue(self.0 - rhs.0)
    }
}

impl SubAssign for AngleValue {
    fn sub_assign(&mut self, rhs: Self) {
        self.0 -= rhs.0;
    }
}

impl Neg for AngleValue {
    type Output = AngleValue;
    fn neg(self) -> Self {
        AngleValue(-self.0)
    }
}

impl Mul<i64> for AngleValue {
    type Output = AngleValue;
    fn mul(self, rhs: i64) -> Self {
        AngleValue(self.0 * rhs)
    }
}

impl Sum for AngleValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(AngleValue::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a AngleValue> for AngleValue {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.copied().sum()
    }
}

/// Serialized as its [`AngleDoc`].
impl Serialize for AngleValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_doc().serialize(serializer)
    }
}

/// Wire form of an angle: exact rational string plus float convenience values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleDoc {
    pub exact: String,
    pub display: String,
    pub degrees: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_number_display() {
        assert_eq!(AngleValue::from_ratio(900, 7).to_string(), "128 4/7°");
        assert_eq!(AngleValue::from_ratio(-60, 7).to_string(), "-8 4/7°");
        assert_eq!(AngleValue::degrees(720).to_string(), "720°");
        assert_eq!(AngleValue::from_ratio(4, 7).to_string(), "4/7°");
        assert_eq!(AngleValue::ZERO.to_string(), "0°");
    }

    #[test]
    fn parse_forms() {
        for s in ["128 4/7°", "-8 4/7", "900/7", "0", "-60/7°", "720"] {
            let a: AngleValue = s.parse().unwrap();
            let back: AngleValue = a.to_string().parse().unwrap();
            assert_eq!(a, back, "{s}");
        }
        assert_eq!("900/7".parse::<AngleValue>().unwrap(), AngleValue::from_ratio(900, 7));
        assert!("1/0".parse::<AngleValue>().is_err());
        assert!("abc".parse::<AngleValue>().is_err());
        assert!("".parse::<AngleValue>().is_err());
    }

    #[test]
    fn exact_string_is_reduced() {
        assert_eq!(AngleValue::from_ratio(120, 14).exact_string(), "60/7");
        assert_eq!(AngleValue::from_ratio(14, 7).exact_string(), "2");
    }
}
