//! Scalar abstractions.
//!
//! Coefficient pipelines (moment matrix, target moments, generator
//! coefficients) only need field arithmetic and run over [`Scalar`], which is
//! implemented for `f32`, `f64` and exact [`Rational`]s. Anything that touches
//! `exp`, `sqrt` or trigonometry requires [`Real`].

use std::fmt::{Debug, Display, LowerExp};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, Num, One, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

/// Exact rational number used for the moment pipeline.
pub type Rational = BigRational;

/// Field-like scalar usable in coefficient computations.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static {
    /// Converts an exact rational into this scalar (rounding for floats).
    fn from_rational(r: &Rational) -> Self;

    fn from_integer(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    /// Nearest `f64`.
    fn as_f64(&self) -> f64;

    /// Exact value (floats convert through their binary expansion).
    fn to_rational(&self) -> Rational;

    /// Absolute value.
    fn magnitude(&self) -> Self;

    /// True when arithmetic on this type carries no rounding.
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).unwrap_or_else(Rational::zero)
    }
    fn magnitude(&self) -> Self {
        self.abs()
    }
}

impl Scalar for f32 {
    fn from_rational(r: &Rational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }
    fn as_f64(&self) -> f64 {
        f64::from(*self)
    }
    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).unwrap_or_else(Rational::zero)
    }
    fn magnitude(&self) -> Self {
        self.abs()
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn magnitude(&self) -> Self {
        self.abs()
    }
    fn is_exact() -> bool {
        true
    }
}

/// Floating point scalar for evaluation: `f32`, `f64` or double-double.
pub trait Real: Scalar + Float + FloatConst + Display + LowerExp + Default {
    fn from_f64(v: f64) -> Self;

    fn from_usize(v: usize) -> Self {
        <Self as Real>::from_f64(v as f64)
    }

    /// `1 / self`, correctly rounded to the working precision.
    fn reciprocal(self) -> Self {
        Self::one() / self
    }

    /// `e^self` accurate to the working precision over the whole range.
    fn exp_accurate(self) -> Self {
        self.exp()
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
}

impl Real for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
}

/// Double-double arithmetic (about 32 significant digits).
pub type DoubleDouble = TwoFloat;

impl Scalar for TwoFloat {
    fn from_rational(r: &Rational) -> Self {
        let hi = r.to_f64().unwrap_or(f64::NAN);
        let rest = r - Rational::from_float(hi).unwrap_or_else(Rational::zero);
        TwoFloat::new_add(hi, rest.to_f64().unwrap_or(0.0))
    }
    fn as_f64(&self) -> f64 {
        self.hi() + self.lo()
    }
    fn to_rational(&self) -> Rational {
        Rational::from_float(self.hi()).unwrap_or_else(Rational::zero)
            + Rational::from_float(self.lo()).unwrap_or_else(Rational::zero)
    }
    fn magnitude(&self) -> Self {
        self.abs()
    }
}

impl Real for TwoFloat {
    fn from_f64(v: f64) -> Self {
        TwoFloat::from(v)
    }

    // The library quotient is only accurate to double precision; one Newton
    // step on the residual restores the full width.
    fn reciprocal(self) -> Self {
        let q = TwoFloat::from(1.0 / self.hi());
        let r = TwoFloat::from(1.0) - self * q;
        q + r * q
    }

    // The library exponential loses about six digits for negative arguments.
    fn exp_accurate(self) -> Self {
        if self.hi() < 0.0 {
            (-self).exp().reciprocal()
        } else {
            self.exp()
        }
    }
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `n!` as an exact rational.
pub fn factorial_q(n: u32) -> Rational {
    Rational::from_integer(factorial(n))
}

/// `2^k` as an exact rational; negative `k` allowed.
pub fn pow2_q(k: i32) -> Rational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Shorthand for the rational `num/den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
