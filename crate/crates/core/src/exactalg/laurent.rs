use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GaussianRational;
use crate::field::Ring;
use crate::Poly;

/// Element of Q(i)[t, t⁻¹], stored as `t^low · body` with `body(0) != 0`.
#[derive(Clone, PartialEq)]
pub struct LaurentPoly {
    low: i64,
    body: Poly,
}

impl LaurentPoly {
    /// `t^low · (coeffs[0] + coeffs[1] t + …)`, renormalised.
    pub fn new(low: i64, coeffs: Vec<GaussianRational>) -> Self {
        Self::from_poly_shifted(Poly::new(coeffs), low)
    }

    /// `t^shift · p`.
    pub fn from_poly_shifted(p: Poly, shift: i64) -> Self {
        if p.is_zero() {
            return LaurentPoly { low: 0, body: p };
        }
        let v = p.valuation();
        LaurentPoly { low: shift + v as i64, body: p.shift_down(v) }
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::from_poly_shifted(p, 0)
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn monomial(c: GaussianRational, k: i64) -> Self {
        Self::from_poly_shifted(Poly::constant(c), k)
    }

    pub fn t() -> Self {
        Self::monomial(GaussianRational::one(), 1)
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    /// Highest exponent; equals `low` for monomials. `None` for zero.
    pub fn high(&self) -> Option<i64> {
        self.body.degree().map(|d| self.low + d as i64)
    }

    /// The polynomial part with all powers of `t` removed.
    pub fn body(&self) -> &Poly {
        &self.body
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        self.body.coeffs()
    }

    /// Units of the Laurent ring are exactly the nonzero monomials.
    pub fn is_unit(&self) -> bool {
        self.body.degree() == Some(0)
    }

    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentPoly { low: self.low + k, body: self.body.clone() }
    }

    /// `t^k · self` as an honest polynomial; `None` if `k + low < 0`.
    pub fn to_poly_times(&self, k: i64) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let e = usize::try_from(self.low + k).ok()?;
        Some(&Poly::monomial(GaussianRational::one(), e) * &self.body)
    }

    pub fn eval(&self, t: &GaussianRational) -> GaussianRational {
        let b = self.body.eval(t);
        let p = t.pow(self.low.unsigned_abs() as u32);
        if self.low >= 0 {
            &b * &p
        } else {
            &b / &p
        }
    }

    pub fn eval_c64(&self, t: Complex64) -> Complex64 {
        self.body.eval_c64(t) * t.powi(self.low as i32)
    }

    /// `t ↦ t⁻¹`.
    pub fn bar(&self) -> Self {
        match self.body.degree() {
            None => self.clone(),
            Some(d) => {
                let rev: Vec<_> = self.body.coeffs().iter().rev().cloned().collect();
                Self::new(-(self.low + d as i64), rev)
            }
        }
    }
}

impl Zero for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly { low: 0, body: Poly::zero() }
    }

    fn is_zero(&self) -> bool {
        self.body.is_zero()
    }
}

impl One for LaurentPoly {
    fn one() -> Self {
        Self::constant(GaussianRational::one())
    }
}

fn aligned(a: &LaurentPoly, b: &LaurentPoly) -> (Poly, Poly, i64) {
    let low = a.low.min(b.low);
    let pa = a.to_poly_times(-low).expect("aligned shift is non-negative");
    let pb = b.to_poly_times(-low).expect("aligned shift is non-negative");
    (pa, pb, low)
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, low) = aligned(self, rhs);
        LaurentPoly::from_poly_shifted(&a + &b, low)
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs.clone())
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::from_poly_shifted(&self.body * &rhs.body, self.low + rhs.low)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { low: self.low, body: -self.body }
    }
}

impl Ring for LaurentPoly {
    fn from_i64(n: i64) -> Self {
        Self::constant(GaussianRational::from_integer(n))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.low == 0 || self.is_zero() {
            write!(f, "{}", self.body)
        } else {
            write!(f, "t^{}·({})", self.low, self.body)
        }
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{{low: {}, coeffs: {:?}}}", self.low, self.body)
    }
}

#[derive(Serialize, Deserialize)]
struct LaurentRepr {
    low: i64,
    coeffs: Vec<GaussianRational>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LaurentRepr { low: self.low, coeffs: self.body.coeffs().to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = LaurentRepr::deserialize(d)?;
        Ok(LaurentPoly::new(r.low, r.coeffs))
    }
}
