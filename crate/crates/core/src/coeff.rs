//! Coefficient rings for truncated q-series.
//!
//! Two rings are used throughout the crate: arbitrary-precision rationals
//! for everything the operator algebra touches (Hecke transforms, cusp
//! constants, dimension bookkeeping) and complex doubles for Weierstrass
//! data, whose coefficients are transcendental. The complex ring compares
//! approximately, with a single fixed tolerance shared by every comparison.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Comparison tolerance of the approximate (complex double) ring.
pub const COMPLEX_EPS: f64 = 1e-12;

/// Ring operations needed by the series layer.
///
/// `is_zero` is exact for rationals and tolerance-based for complex
/// doubles; every normalization and equality decision in [`crate::qseries`]
/// goes through it.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Multiplicative inverse of a unit, `None` for (near-)zero elements.
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn from_ratio(num: i64, den: i64) -> Self;
}

impl Coeff for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn is_zero(&self) -> bool {
        self.norm() <= COMPLEX_EPS
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Complex64::new(num as f64 / den as f64, 0.0)
    }
}

/// Shorthand for an exact rational.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::from_ratio(num, den)
}

/// Rational-to-double conversion, good to the last ulp for the sizes that
/// occur here.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Split off the integer part so huge numerators stay accurate.
    let int_part = num / den;
    let rem = num - &int_part * den;
    let int_f = bigint_to_f64(&int_part);
    let frac = bigint_to_f64(&rem) / bigint_to_f64(den);
    int_f + frac
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    let s = n.abs().to_string();
    let v: f64 = s.parse().unwrap_or(f64::INFINITY);
    if n.is_negative() {
        -v
    } else {
        v
    }
}

/// Lift an exact rational into the complex ring.
pub fn rat_to_c64(r: &BigRational) -> Complex64 {
    Complex64::new(rat_to_f64(r), 0.0)
}
