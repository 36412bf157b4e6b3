//! The scalar abstraction shared by the exact and floating backends.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{FieldError, GaussianRational};

/// A commutative field containing `i`.
///
/// Implemented by [`GaussianRational`] (exact numbers), [`super::RationalExpr`]
/// (exact symbolic values) and [`Complex64`] (floating backend). Map and matrix
/// builders are written once against this trait.
pub trait Field:
    Clone + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_gaussian(c: &GaussianRational) -> Self;
    fn is_zero(&self) -> bool;
    fn try_div(&self, rhs: &Self) -> Result<Self, FieldError>;

    /// Whether the value should be treated as a vanishing denominator.
    /// Exact fields ignore `guard`.
    fn near_zero(&self, _guard: f64) -> bool {
        self.is_zero()
    }

    /// A free symbol with the given name, for fields that have them.
    fn named(_name: &str) -> Option<Self> {
        None
    }

    fn from_i64(n: i64) -> Self {
        Self::from_gaussian(&GaussianRational::from_integer(n))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_gaussian(&GaussianRational::from_ratio(n, d))
    }

    fn imag_unit() -> Self {
        Self::from_gaussian(&GaussianRational::i())
    }

    fn inv(&self) -> Result<Self, FieldError> {
        Self::one().try_div(self)
    }

    fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }

    /// Integer power, negative exponents through the inverse.
    fn powi(&self, exp: i32) -> Result<Self, FieldError> {
        if exp >= 0 {
            Ok(self.pow(exp as u32))
        } else {
            Ok(self.inv()?.pow(exp.unsigned_abs()))
        }
    }
}

impl Field for GaussianRational {
    fn zero() -> Self {
        GaussianRational::zero()
    }
    fn one() -> Self {
        GaussianRational::one()
    }
    fn from_gaussian(c: &GaussianRational) -> Self {
        c.clone()
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn try_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.checked_div(rhs)
    }
    fn pow(&self, exp: u32) -> Self {
        GaussianRational::pow(self, exp)
    }
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_gaussian(c: &GaussianRational) -> Self {
        c.to_complex()
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn try_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        if Field::is_zero(rhs) {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self / rhs)
    }
    fn near_zero(&self, guard: f64) -> bool {
        self.norm() <= guard
    }
    fn pow(&self, exp: u32) -> Self {
        self.powu(exp)
    }
}
