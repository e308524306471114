//! Scalar backends shared by the whole crate.
//!
//! Every algorithm here is generic over a [`Scalar`]: either exact
//! arbitrary-precision rationals (for identities that must hold on the nose)
//! or complex double precision (for root finding, ranks and flows). A given
//! computation runs entirely in one backend; conversions are explicit.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Complex double-precision scalar, the floating backend.
pub type C64 = Complex64;

/// Arbitrary-precision rational scalar, the exact backend.
pub type Rat = BigRational;

/// Field operations needed by the generic linear algebra and polynomial code.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and zero tests are decidable.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(value: i64) -> Self;

    /// Absolute value as a double, used for pivot selection and tolerance
    /// checks. Exact backends may round; they never use it for zero tests.
    fn magnitude(&self) -> f64;

    fn is_zero_elem(&self) -> bool;

    /// Backend-appropriate negligibility test against a scale: exact zero for
    /// the rational backend, relative threshold for the floating one.
    fn is_negligible(&self, scale: f64, rel_tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero_elem()
        } else {
            self.magnitude() <= scale.max(1.0) * rel_tol
        }
    }
}

impl Scalar for C64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::ZERO
    }

    fn one() -> Self {
        Complex64::ONE
    }

    fn from_int(value: i64) -> Self {
        Complex64::new(value as f64, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn is_zero_elem(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }

    fn one() -> Self {
        <BigRational as One>::one()
    }

    fn from_int(value: i64) -> Self {
        BigRational::from_integer(value.into())
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

/// Ratio constructor for the exact backend.
pub fn rat(numer: i64, denom: i64) -> Rat {
    BigRational::new(numer.into(), denom.into())
}

/// Lossy conversion from the exact backend into the floating one.
pub fn rat_to_c64(value: &Rat) -> C64 {
    Complex64::new(value.to_f64().unwrap_or(f64::NAN), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_is_exact() {
        let a = rat(1, 3);
        let b = rat(1, 6);
        assert_eq!(a.clone() + b.clone(), rat(1, 2));
        assert_eq!(a - b, rat(1, 6));
    }

    #[test]
    fn magnitudes_agree_across_backends() {
        let r = rat(-7, 2);
        let c = C64::new(-3.5, 0.0);
        assert_eq!(r.magnitude(), 3.5);
        assert_eq!(c.magnitude(), 3.5);
    }

    #[test]
    fn negligibility_is_exact_for_rationals() {
        let tiny = rat(1, 1_000_000_000);
        assert!(!tiny.is_negligible(1.0, 1e-6));
        assert!(<Rat as Scalar>::zero().is_negligible(1.0, 0.0));
    }
}
