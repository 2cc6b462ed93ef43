//! Scalar coefficients that are either exact rationals or doubles.
//!
//! Arithmetic between two rationals stays rational. Any operation that
//! touches a float promotes the result to float; there is no path from
//! float back to rational except [`Coefficient::from_f64_exact`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone)]
pub enum Coefficient {
    Rational(BigRational),
    Float(f64),
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Coefficient::Rational(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Coefficient::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Coefficient::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Coefficient::Rational(BigRational::from_integer(v))
    }

    /// The exact binary value of a finite double, as a rational.
    pub fn from_f64_exact(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Coefficient::Rational)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coefficient::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coefficient::Rational(r) => Some(r),
            Coefficient::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_zero(),
            Coefficient::Float(f) => *f == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_one(),
            Coefficient::Float(f) => *f == 1.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_negative(),
            Coefficient::Float(f) => *f < 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coefficient::Rational(r) => rational_to_f64(r),
            Coefficient::Float(f) => *f,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Coefficient::Rational(r) => Coefficient::Rational(r.abs()),
            Coefficient::Float(f) => Coefficient::Float(f.abs()),
        }
    }

    pub fn powi(&self, e: u32) -> Self {
        match self {
            Coefficient::Rational(r) => Coefficient::Rational(num_traits::pow(r.clone(), e as usize)),
            Coefficient::Float(f) => Coefficient::Float(f.powi(e as i32)),
        }
    }

    /// Converts to float, dropping exactness.
    pub fn into_float(self) -> Self {
        Coefficient::Float(self.to_f64())
    }

    pub fn sqrt_f64(&self) -> f64 {
        self.to_f64().sqrt()
    }

    /// Total order; floats compare through `f64::total_cmp`, mixed pairs
    /// through the exact rational value of the float.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => a.cmp(b),
            (Coefficient::Float(a), Coefficient::Float(b)) => a.total_cmp(b),
            (Coefficient::Rational(a), Coefficient::Float(b)) => match BigRational::from_float(*b) {
                Some(bb) => a.cmp(&bb),
                None => rational_to_f64(a).total_cmp(b),
            },
            (Coefficient::Float(_), Coefficient::Rational(_)) => other.cmp_value(self).reverse(),
        }
    }

    fn binop(
        self,
        rhs: Self,
        exact: impl FnOnce(BigRational, BigRational) -> BigRational,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Self {
        match (self, rhs) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => Coefficient::Rational(exact(a, b)),
            (a, b) => Coefficient::Float(float(a.to_f64(), b.to_f64())),
        }
    }
}

/// Correctly handles rationals whose numerator and denominator both
/// overflow `f64` individually.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift > 0 {
        BigRational::new(r.numer().clone(), r.denom().clone() << shift as usize)
    } else {
        BigRational::new(r.numer().clone() << (-shift) as usize, r.denom().clone())
    };
    let q = scaled.to_integer().to_f64().unwrap_or(f64::NAN);
    q * 2f64.powi(shift as i32)
}

impl PartialEq for Coefficient {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl From<BigRational> for Coefficient {
    fn from(r: BigRational) -> Self {
        Coefficient::Rational(r)
    }
}

impl From<f64> for Coefficient {
    fn from(f: f64) -> Self {
        Coefficient::Float(f)
    }
}

impl From<i64> for Coefficient {
    fn from(v: i64) -> Self {
        Coefficient::from_int(v)
    }
}

impl Add for Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: Self) -> Self {
        self.binop(rhs, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: Self) -> Self {
        self.binop(rhs, |a, b| a - b, |a, b| a - b)
    }
}

impl Mul for Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: Self) -> Self {
        self.binop(rhs, |a, b| a * b, |a, b| a * b)
    }
}

impl Div for Coefficient {
    type Output = Coefficient;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero() || !rhs.is_exact(), "exact division by zero");
        self.binop(rhs, |a, b| a / b, |a, b| a / b)
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Self {
        match self {
            Coefficient::Rational(r) => Coefficient::Rational(-r),
            Coefficient::Float(f) => Coefficient::Float(-f),
        }
    }
}

macro_rules! ref_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<'a> $tr<&'a Coefficient> for &'a Coefficient {
            type Output = Coefficient;
            fn $m(self, rhs: &'a Coefficient) -> Coefficient {
                $tr::$m(self.clone(), rhs.clone())
            }
        }
    )*};
}
ref_ops!(Add add, Sub sub, Mul mul, Div div);

impl std::iter::Sum for Coefficient {
    fn sum<I: Iterator<Item = Coefficient>>(iter: I) -> Self {
        iter.fold(Coefficient::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Coefficient::Float(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let c = Coefficient::ratio(6, -4);
        let r = c.as_rational().unwrap();
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(c.to_string(), "-3/2");
    }

    #[test]
    fn mixed_arithmetic_promotes_to_float() {
        let a = Coefficient::ratio(1, 3);
        let b = Coefficient::Float(0.5);
        assert!(!(a.clone() + b.clone()).is_exact());
        assert!(!(b * a.clone()).is_exact());
        assert!((a.clone() * a).is_exact());
    }

    #[test]
    fn huge_rational_converts() {
        let big = BigRational::new(BigInt::from(10).pow(400) * 3, BigInt::from(10).pow(400));
        assert!((rational_to_f64(&big) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_equality_is_by_value() {
        assert_eq!(Coefficient::ratio(1, 2), Coefficient::Float(0.5));
        assert_ne!(Coefficient::ratio(1, 3), Coefficient::Float(1.0 / 3.0));
    }
}
