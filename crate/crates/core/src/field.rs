//! Scalar traits shared by every algorithm in the crate.
//!
//! [`Ring`] is the minimum needed to store values in a [`crate::Matrix`] and
//! multiply matrices. [`Field`] adds division and the two hooks elimination
//! needs: a zero test that may honour a tolerance, and an optional pivot
//! magnitude. Exact fields keep the defaults (exact zero test, first nonzero
//! pivot), floating fields override both (tolerance test, largest pivot).
//!
//! [`Scalar`] is a field that embeds the Gaussian rationals and can be
//! approximated by a `Complex<f64>`; the twisted-family code is generic over
//! it so the same routines run in exact and floating mode.

use std::fmt::Debug;
use std::ops::{Div, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, One, Zero};

use crate::exactalg::GaussianRational;

pub trait Ring:
    Clone + Debug + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Send + Sync
{
    fn from_i64(n: i64) -> Self;
}

pub trait Field: Ring + Div<Output = Self> {
    /// Zero test used by elimination. `tol` is already scaled by the caller.
    fn is_zero_tol(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    /// Magnitude used for partial pivoting; `None` selects the first nonzero entry.
    fn pivot_magnitude(&self) -> Option<f64> {
        None
    }

    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }
}

pub trait Scalar: Field {
    const EXACT: bool;

    fn from_gaussian(g: &GaussianRational) -> Self;
    fn to_c64(&self) -> Complex<f64>;
    fn conj(&self) -> Self;
}

impl<T> Ring for Complex<T>
where
    T: Float + Debug + Send + Sync,
{
    fn from_i64(n: i64) -> Self {
        Complex::new(T::from(n).unwrap_or_else(T::nan), T::zero())
    }
}

impl<T> Field for Complex<T>
where
    T: Float + Debug + Send + Sync,
{
    fn is_zero_tol(&self, tol: f64) -> bool {
        self.norm().to_f64().unwrap_or(f64::INFINITY) <= tol
    }

    fn pivot_magnitude(&self) -> Option<f64> {
        self.norm().to_f64()
    }
}

impl<T> Scalar for Complex<T>
where
    T: Float + Debug + Send + Sync,
{
    const EXACT: bool = false;

    fn from_gaussian(g: &GaussianRational) -> Self {
        let c = g.to_c64();
        Complex::new(T::from(c.re).unwrap_or_else(T::nan), T::from(c.im).unwrap_or_else(T::nan))
    }

    fn to_c64(&self) -> Complex<f64> {
        Complex::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

impl Ring for num_rational::BigRational {
    fn from_i64(n: i64) -> Self {
        num_rational::BigRational::from_integer(n.into())
    }
}

impl Field for num_rational::BigRational {}
