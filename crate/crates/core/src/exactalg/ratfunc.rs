use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::GaussianRational;
use crate::field::{Field, Ring};
use crate::Poly;

/// Element of Q(i)(z) in lowest terms with a monic denominator.
#[derive(Clone, PartialEq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    /// Panics if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let num = num.exact_div(&g).expect("gcd divides");
        let den = den.exact_div(&g).expect("gcd divides");
        let l = den.lead().expect("nonzero").inv();
        RationalFunction { num: num.scale(&l), den: den.scale(&l) }
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction { num: p, den: Poly::one() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The variable `z`.
    pub fn z() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    /// `None` at a pole.
    pub fn eval(&self, z: &GaussianRational) -> Option<GaussianRational> {
        let d = self.den.eval(z);
        (!d.is_zero()).then(|| &self.num.eval(z) / &d)
    }

    /// Order of vanishing at `z0`: negative for a pole. `i64::MAX` for zero.
    pub fn order_at(&self, z0: &GaussianRational) -> i64 {
        if self.num.is_zero() {
            return i64::MAX;
        }
        self.num.root_multiplicity(z0) as i64 - self.den.root_multiplicity(z0) as i64
    }

    /// Coefficients `c_k` of `(z - z0)^k` for `k` in `lo..=hi`.
    pub fn laurent_at(&self, z0: &GaussianRational, lo: i64, hi: i64) -> Vec<GaussianRational> {
        let width = (hi - lo + 1).max(0) as usize;
        if self.num.is_zero() {
            return vec![GaussianRational::zero(); width];
        }
        let n = self.num.shift(z0);
        let d = self.den.shift(z0);
        let (vn, vd) = (n.valuation(), d.valuation());
        let n = n.shift_down(vn);
        let d = d.shift_down(vd);
        let lead = vn as i64 - vd as i64;
        // Power series n/d with d(0) != 0, up to the needed order.
        let terms = (hi - lead + 1).max(0) as usize;
        let d0inv = d.coeff(0).inv();
        let mut s: Vec<GaussianRational> = Vec::with_capacity(terms);
        for k in 0..terms {
            let mut acc = n.coeff(k);
            for j in 1..=k {
                let dj = d.coeff(j);
                if !dj.is_zero() {
                    acc = &acc - &(&dj * &s[k - j]);
                }
            }
            s.push(&acc * &d0inv);
        }
        (lo..=hi)
            .map(|k| {
                let idx = k - lead;
                if idx < 0 {
                    GaussianRational::zero()
                } else {
                    s[idx as usize].clone()
                }
            })
            .collect()
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        RationalFunction { num: Poly::zero(), den: Poly::one() }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunction::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs.clone())
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction::from_poly(&self.num * &rhs.num);
        }
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<'a> Div<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RationalFunction::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -self.num, den: self.den }
    }
}

impl Ring for RationalFunction {
    fn from_i64(n: i64) -> Self {
        Self::constant(GaussianRational::from_integer(n))
    }
}

impl Field for RationalFunction {}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num.pretty("z"))
        } else {
            write!(f, "({})/({})", self.num.pretty("z"), self.den.pretty("z"))
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
