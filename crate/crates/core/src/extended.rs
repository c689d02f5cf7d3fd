//! The extended complex plane `C ∪ {∞}`.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtComplex<T = f64> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Scalar> ExtComplex<T> {
    pub fn finite(re: T, im: T) -> Self {
        ExtComplex::Finite(Complex::new(re, im))
    }

    pub fn zero() -> Self {
        ExtComplex::Finite(Complex::new(T::zero(), T::zero()))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex<T>> {
        match *self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    /// Complex conjugate; `conj(∞) = ∞`.
    pub fn conj(&self) -> Self {
        match *self {
            ExtComplex::Finite(z) => ExtComplex::Finite(z.conj()),
            ExtComplex::Infinity => ExtComplex::Infinity,
        }
    }

    /// `1/w` with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(&self) -> Self {
        match *self {
            ExtComplex::Infinity => Self::zero(),
            ExtComplex::Finite(z) if z.re == T::zero() && z.im == T::zero() => {
                ExtComplex::Infinity
            }
            ExtComplex::Finite(z) => ExtComplex::Finite(z.inv()),
        }
    }

    /// Chordal distance on the unit sphere, in `[0, 2]`.
    pub fn chordal_distance(&self, other: &Self) -> T {
        let two = T::lit(2.0);
        match (*self, *other) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => T::zero(),
            (ExtComplex::Finite(z), ExtComplex::Infinity)
            | (ExtComplex::Infinity, ExtComplex::Finite(z)) => {
                two / (T::one() + z.norm_sqr()).sqrt()
            }
            (ExtComplex::Finite(a), ExtComplex::Finite(b)) => {
                two * (a - b).norm()
                    / ((T::one() + a.norm_sqr()).sqrt() * (T::one() + b.norm_sqr()).sqrt())
            }
        }
    }

    /// Treats huge or non-finite moduli as `∞`.
    pub fn from_complex(z: Complex<T>) -> Self {
        if !z.re.is_finite() || !z.im.is_finite() {
            ExtComplex::Infinity
        } else {
            ExtComplex::Finite(z)
        }
    }
}

impl<T: Scalar> From<Complex<T>> for ExtComplex<T> {
    fn from(z: Complex<T>) -> Self {
        ExtComplex::Finite(z)
    }
}

impl<T: Scalar> fmt::Display for ExtComplex<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtComplex::Infinity => write!(f, "inf"),
            ExtComplex::Finite(z) => {
                if z.im < T::zero() {
                    write!(f, "{}-{}i", z.re, -z.im)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conj_of_infinity_is_infinity() {
        assert_eq!(ExtComplex::<f64>::Infinity.conj(), ExtComplex::Infinity);
    }

    #[test]
    fn recip_swaps_zero_and_infinity() {
        assert_eq!(ExtComplex::<f64>::zero().recip(), ExtComplex::Infinity);
        assert_eq!(ExtComplex::<f64>::Infinity.recip(), ExtComplex::zero());
        let w = ExtComplex::finite(0.0, 2.0);
        assert!(w.recip().chordal_distance(&ExtComplex::finite(0.0, -0.5)) < 1e-15);
    }

    #[test]
    fn chordal_distance_between_poles_is_two() {
        let d = ExtComplex::<f64>::zero().chordal_distance(&ExtComplex::Infinity);
        assert!((d - 2.0).abs() < 1e-15);
    }
}
