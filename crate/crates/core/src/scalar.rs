//! Exact arithmetic in the quadratic field ℚ[√3].
//!
//! Every quantity the Bishop-Rook engine and the potential monitor touch
//! (positions, lengths, offsets, phase-switch points) lives in this field, so
//! comparisons are decided exactly and no tolerance ever enters the engine.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A number `a + b·√3` with rational `a` and `b`.
///
/// The representation is canonical (reduced fractions, positive
/// denominators), so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    a: BigRational,
    b: BigRational,
}

/// The four field operations accepted by [`scalar_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Scalar {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Scalar { a, b }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar {
            a: BigRational::from_integer(BigInt::from(n)),
            b: BigRational::zero(),
        }
    }

    /// `num/den` as a rational scalar. Panics when `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar {
            a: BigRational::new(BigInt::from(num), BigInt::from(den)),
            b: BigRational::zero(),
        }
    }

    pub fn from_rational(a: BigRational) -> Self {
        Scalar {
            a,
            b: BigRational::zero(),
        }
    }

    /// `√3`.
    pub fn sqrt3() -> Self {
        Scalar {
            a: BigRational::zero(),
            b: BigRational::one(),
        }
    }

    /// Builds `a + b√3` from small integer fractions `(an/ad) + (bn/bd)√3`.
    pub fn from_parts(an: i64, ad: i64, bn: i64, bd: i64) -> Self {
        Scalar {
            a: BigRational::new(BigInt::from(an), BigInt::from(ad)),
            b: BigRational::new(BigInt::from(bn), BigInt::from(bd)),
        }
    }

    /// Rational part.
    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient of √3.
    pub fn sqrt3_part(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Exact sign of `a + b√3`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // Opposite signs: the larger of a² and 3b² wins.
        let a2 = &self.a * &self.a;
        let b2 = &self.b * &self.b * BigRational::from_integer(BigInt::from(3));
        if a2 > b2 {
            sa
        } else {
            sb
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Field norm `a² − 3b²`; zero only for zero.
    fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(BigInt::from(3))
    }

    /// Conjugate `a − b√3`.
    pub fn conjugate(&self) -> Scalar {
        Scalar {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    pub fn recip(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(Scalar {
            a: &self.a / &n,
            b: -(&self.b / &n),
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self * &rhs.recip()?)
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Greatest integer `≤ self`, computed exactly.
    pub fn floor(&self) -> BigInt {
        let guess = self.to_f64().floor();
        let mut k = BigInt::from_f64(guess).unwrap_or_else(BigInt::zero);
        let as_scalar = |k: &BigInt| Scalar::from_rational(BigRational::from_integer(k.clone()));
        while as_scalar(&k) > *self {
            k -= 1;
        }
        while as_scalar(&(&k + 1)) <= *self {
            k += 1;
        }
        k
    }

    /// Least integer `≥ self`.
    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Closest `f64`. When `a` and `b` have opposite signs the value is
    /// evaluated as `(a² − 3b²) / (a − b√3)` to avoid cancellation.
    pub fn to_f64(&self) -> f64 {
        let r3 = 3f64.sqrt();
        let af = self.a.to_f64().unwrap_or(f64::NAN);
        let bf = self.b.to_f64().unwrap_or(f64::NAN);
        let v = if self.b.is_zero() {
            af
        } else if self.a.is_zero() || self.a.is_positive() == self.b.is_positive() {
            af + bf * r3
        } else {
            self.norm().to_f64().unwrap_or(f64::NAN) / (af - bf * r3)
        };
        if v.is_finite() {
            v
        } else {
            self.to_f64_slow()
        }
    }

    /// Exact rounding toward zero to 53 significant bits; used when the
    /// parts overflow `f64`.
    fn to_f64_slow(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let x = self.abs();
        let pow2 = |k: i64| -> Scalar {
            let p = BigRational::from_integer(BigInt::one() << k.unsigned_abs());
            Scalar::from_rational(if k < 0 { p.recip() } else { p })
        };
        let bits = |r: &BigRational| r.numer().bits() as i64 - r.denom().bits() as i64;
        let mut k = bits(&x.a).max(bits(&x.b) + 1);
        while x < pow2(k) {
            k -= 1;
        }
        while x >= pow2(k + 1) {
            k += 1;
        }
        let m = (x * pow2(52 - k)).floor();
        let v = m.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi((k - 52).clamp(-1074, 1023) as i32);
        if self.is_negative() {
            -v
        } else {
            v
        }
    }
}

/// Exact `lhs op rhs`; division by zero is reported, never panics.
pub fn scalar_arith(lhs: &Scalar, rhs: &Scalar, op: ArithOp) -> Result<Scalar> {
    Ok(match op {
        ArithOp::Add => lhs + rhs,
        ArithOp::Sub => lhs - rhs,
        ArithOp::Mul => lhs * rhs,
        ArithOp::Div => lhs.checked_div(rhs)?,
    })
}

pub fn scalar_cmp(lhs: &Scalar, rhs: &Scalar) -> Ordering {
    lhs.cmp(rhs)
}

pub fn to_float(s: &Scalar) -> f64 {
    s.to_f64()
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).signum()
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_rational(r)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| Scalar {
    a: &x.a + &y.a,
    b: &x.b + &y.b,
});
forward_binop!(Sub, sub, |x, y| Scalar {
    a: &x.a - &y.a,
    b: &x.b - &y.b,
});
forward_binop!(Mul, mul, |x, y| {
    let three = BigRational::from_integer(BigInt::from(3));
    Scalar {
        a: &x.a * &y.a + &x.b * &y.b * three,
        b: &x.a * &y.b + &x.b * &y.a,
    }
});
// Panics on a zero divisor, like `BigRational`; use `checked_div` where the
// divisor is not known to be nonzero.
forward_binop!(Div, div, |x, y| x
    .checked_div(y)
    .expect("division by zero in ℚ[√3]"));

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `a`, `b·√3`, or `a + b·√3` with exact fractions.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = |b: &BigRational| {
            if b.is_one() {
                "√3".to_string()
            } else {
                format!("{}·√3", fmt_rational(b))
            }
        };
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.a)),
            (true, false) => {
                if self.b.is_negative() {
                    write!(f, "-{}", root(&-self.b.clone()))
                } else {
                    write!(f, "{}", root(&self.b))
                }
            }
            (false, false) => {
                let sign = if self.b.is_negative() { '-' } else { '+' };
                write!(
                    f,
                    "{} {} {}",
                    fmt_rational(&self.a),
                    sign,
                    root(&self.b.abs())
                )
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

/// Parses an exact rational: an integer (`-3`), a fraction (`7/4`) or a
/// decimal (`0.125`, read as a fraction over a power of ten).
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not an exact number: {text:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match t.as_bytes()[0] {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scalar> {
        parse_rational(s).map(Scalar::from_rational)
    }
}

struct RationalJson<'a>(&'a BigRational);

impl Serialize for RationalJson<'_> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.numer().to_string(), self.0.denom().to_string()].serialize(ser)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = ser.serialize_map(Some(2))?;
        m.serialize_entry("a", &RationalJson(&self.a))?;
        m.serialize_entry("b", &RationalJson(&self.b))?;
        m.end()
    }
}

/// One rational component of the object encoding: `[num, den]`, a bare
/// integer, or an exact decimal/fraction string.
struct RationalComponent(BigRational);

impl<'de> Deserialize<'de> for RationalComponent {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        de.deserialize_any(RationalVisitor).map(RationalComponent)
    }
}

struct IntPart(BigInt);

impl<'de> Deserialize<'de> for IntPart {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = BigInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or an integer string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<BigInt, E> {
                Ok(BigInt::from(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<BigInt, E> {
                Ok(BigInt::from(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<BigInt, E> {
                BigInt::from_str(v.trim()).map_err(|_| E::custom(format!("bad integer {v:?}")))
            }
        }
        de.deserialize_any(V).map(IntPart)
    }
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = BigRational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("[numerator, denominator], an integer, or an exact decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<BigRational, E> {
        Ok(BigRational::from_integer(BigInt::from(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<BigRational, E> {
        Ok(BigRational::from_integer(BigInt::from(v)))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<BigRational, E> {
        Err(E::custom(format!(
            "inexact JSON number {v}; write non-integers as decimal strings such as \"0.5\""
        )))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<BigRational, E> {
        parse_rational(v).map_err(E::custom)
    }

    fn visit_seq<A: SeqAccess<'de>>(
        self,
        mut seq: A,
    ) -> std::result::Result<BigRational, A::Error> {
        let n: IntPart = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(0, &self))?;
        let d: IntPart = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(1, &self))?;
        if seq.next_element::<de::IgnoredAny>()?.is_some() {
            return Err(de::Error::invalid_length(3, &self));
        }
        if d.0.is_zero() {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(BigRational::new(n.0, d.0))
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct ScalarVisitor;
        impl<'de> Visitor<'de> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str(
                    "{\"a\": [num, den], \"b\": [num, den]}, an integer, or a decimal string",
                )
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
                RationalVisitor.visit_i64(v).map(Scalar::from_rational)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
                RationalVisitor.visit_u64(v).map(Scalar::from_rational)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Scalar, E> {
                RationalVisitor.visit_f64(v).map(Scalar::from_rational)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Scalar, E> {
                RationalVisitor.visit_str(v).map(Scalar::from_rational)
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Scalar, A::Error> {
                let mut a = None;
                let mut b = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "a" if a.is_none() => a = Some(map.next_value::<RationalComponent>()?.0),
                        "b" if b.is_none() => b = Some(map.next_value::<RationalComponent>()?.0),
                        "a" | "b" => return Err(de::Error::duplicate_field("a/b")),
                        other => return Err(de::Error::unknown_field(other, &["a", "b"])),
                    }
                }
                let a = a.ok_or_else(|| de::Error::missing_field("a"))?;
                Ok(Scalar::new(a, b.unwrap_or_else(BigRational::zero)))
            }
        }
        de.deserialize_any(ScalarVisitor)
    }
}
