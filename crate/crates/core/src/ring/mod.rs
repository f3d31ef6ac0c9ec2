//! Exact coefficient rings.
//!
//! [`Scalar`] is the field of Gaussian rationals, [`Poly`] a sparse
//! multivariate polynomial ring over it and [`RatFn`] the corresponding
//! field of fractions. All three implement [`Ring`], which is the only
//! interface the matrix and factorization code relies on.

mod parse;
mod poly;
mod ratfn;
mod scalar;

pub use parse::{parse_poly, parse_scalar};
pub use poly::{Monomial, Poly};
pub use ratfn::RatFn;
pub use scalar::Scalar;

use std::fmt;

/// A commutative ring with 1 containing the Gaussian rationals.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_scalar(s: Scalar) -> Self;

    /// Exact quotient `self / other`, or `None` when `other` does not divide
    /// `self` (in particular when `other` is zero).
    fn div_exact(&self, other: &Self) -> Option<Self>;

    /// Multiplicative inverse of a unit.
    fn unit_inverse(&self) -> Option<Self> {
        Self::one().div_exact(self)
    }

    /// True when every nonzero element is a unit.
    fn is_field() -> bool;

    /// Largest bit length of any integer stored in the element.
    fn bit_size(&self) -> u64;

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Marker for rings in which every nonzero element is invertible.
pub trait Field: Ring {
    fn inv(&self) -> crate::Result<Self> {
        self.unit_inverse().ok_or(crate::Error::DivisionByZero)
    }

    fn div(&self, other: &Self) -> crate::Result<Self> {
        self.div_exact(other).ok_or(crate::Error::DivisionByZero)
    }
}

impl Field for Scalar {}
impl Field for RatFn {}
