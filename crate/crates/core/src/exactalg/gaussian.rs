use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::field::{Field, Ring, Scalar};

/// Exact element of Q(i).
///
/// Both parts are `BigRational`, which keeps denominators positive and in
/// lowest terms, so `==` is structural equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    /// `a + b i` with integer parts.
    pub fn from_ints(a: i64, b: i64) -> Self {
        Self::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()))
    }

    /// The real number `num / den`. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(BigRational::new(num.into(), den.into()), BigRational::zero())
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::new(r, BigRational::zero())
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// |self|², exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    /// Exact value of a finite double.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Self::from_rational)
    }

    /// Least common denominator of both parts.
    pub fn denominator_lcm(&self) -> BigInt {
        num_integer::Integer::lcm(self.re.denom(), self.im.denom())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::from_rational(&self.re * &rhs.re);
        }
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        assert!(!rhs.is_zero(), "division by zero in Q(i)");
        if rhs.im.is_zero() {
            return GaussianRational::new(&self.re / &rhs.re, &self.im / &rhs.re);
        }
        let n = rhs.norm_sqr();
        let num = self * &rhs.conj();
        GaussianRational::new(num.re / &n, num.im / &n)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Ring for GaussianRational {
    fn from_i64(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl Field for GaussianRational {}

impl Scalar for GaussianRational {
    const EXACT: bool = true;

    fn from_gaussian(g: &GaussianRational) -> Self {
        g.clone()
    }

    fn to_c64(&self) -> Complex64 {
        GaussianRational::to_c64(self)
    }

    fn conj(&self) -> Self {
        GaussianRational::conj(self)
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return f.write_str(&fmt_ratio(&self.re));
        }
        let mag = self.im.abs();
        let imag = if mag.is_one() { "i".to_string() } else { format!("{}i", fmt_ratio(&mag)) };
        let neg = self.im.is_negative();
        if self.re.is_zero() {
            write!(f, "{}{}", if neg { "-" } else { "" }, imag)
        } else {
            write!(f, "{}{}{}", fmt_ratio(&self.re), if neg { "-" } else { "+" }, imag)
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"p"`, `"p/q"` or a decimal such as `"-0.25"`.
fn parse_real(s: &str) -> Option<BigRational> {
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_real(n)?;
        let d = parse_real(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (sign, body) = match s.as_bytes()[0] {
        b'-' => (-1, &s[1..]),
        b'+' => (1, &s[1..]),
        _ => (1, s),
    };
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit() || b == b'.') {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if frac_part.contains('.') || (int_part.is_empty() && frac_part.is_empty()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().ok()?;
    let d = num_traits::pow(BigInt::from(10), frac_part.len());
    Some(BigRational::new(n * sign, d))
}

impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("invalid Gaussian rational {s:?}"));
        if s.is_empty() || s.chars().any(char::is_whitespace) {
            return Err(bad());
        }
        let Some(body) = s.strip_suffix('i') else {
            return parse_real(s).map(Self::from_rational).ok_or_else(bad);
        };
        // Split at the last sign that is not the leading one.
        let split = body
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .next_back();
        let (re_str, im_str) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let re = if re_str.is_empty() { BigRational::zero() } else { parse_real(re_str).ok_or_else(bad)? };
        let im = match im_str {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            t => parse_real(t).ok_or_else(bad)?,
        };
        Ok(Self::new(re, im))
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

struct GrVisitor;

impl Visitor<'_> for GrVisitor {
    type Value = GaussianRational;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a Gaussian rational string such as \"1/2-3i\" or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<GaussianRational, E> {
        v.parse().map_err(|e: Error| E::custom(e.to_string()))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<GaussianRational, E> {
        Ok(GaussianRational::from_integer(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<GaussianRational, E> {
        Ok(GaussianRational::from_rational(BigRational::from_integer(v.into())))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<GaussianRational, E> {
        // Go through the shortest decimal form so 0.1 means 1/10.
        self.visit_str(&format!("{v}"))
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(GrVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn parse_forms() {
        assert_eq!(g("3"), GaussianRational::from_integer(3));
        assert_eq!(g("-1/2"), GaussianRational::from_ratio(-1, 2));
        assert_eq!(g("3i"), GaussianRational::from_ints(0, 3));
        assert_eq!(g("-i"), GaussianRational::from_ints(0, -1));
        assert_eq!(g("1-2i"), GaussianRational::from_ints(1, -2));
        assert_eq!(g("1/2+3/4i"), GaussianRational::new(BigRational::new(1.into(), 2.into()), BigRational::new(3.into(), 4.into())));
        assert_eq!(g("0.25"), GaussianRational::from_ratio(1, 4));
        assert_eq!(g("2/4"), GaussianRational::from_ratio(1, 2));
        assert!("1 + i".parse::<GaussianRational>().is_err());
        assert!("1/0".parse::<GaussianRational>().is_err());
        assert!("abc".parse::<GaussianRational>().is_err());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["0", "-3", "5/7", "i", "-i", "2i", "-1/3i", "1+i", "-2/5-7/3i"] {
            assert_eq!(g(s).to_string(), s);
            assert_eq!(g(&g(s).to_string()), g(s));
        }
    }

    #[test]
    fn field_ops() {
        let a = g("1+2i");
        let b = g("3-i");
        assert_eq!(&a * &b, g("5+5i"));
        assert_eq!(&(&a / &b) * &b, a);
        assert_eq!(&a - &a, GaussianRational::zero());
        assert_eq!(g("i").pow(2), g("-1"));
    }

    #[test]
    fn serde_string_and_number() {
        let v: Vec<GaussianRational> = serde_json::from_str(r#"["1/2", 3, "-i"]"#).unwrap();
        assert_eq!(v, vec![g("1/2"), g("3"), g("-i")]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1/2","3","-i"]"#);
    }
}
