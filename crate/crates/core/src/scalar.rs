//! Scalar fields the dense linear algebra is generic over.

use core::fmt::Debug;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use num_traits::{One, Zero};

/// `f64` or `Complex64`. Real matrices take the same code paths as Hermitian
/// complex ones, with `conj` as the identity.
pub trait Field:
    Copy
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn abs_sq(self) -> f64;
    fn from_real(x: f64) -> Self;
    fn to_complex(self) -> Complex64;
    /// Real fields keep only the real part.
    fn from_complex_lossy(z: Complex64) -> Self;
    fn is_finite(self) -> bool;

    fn abs(self) -> f64 {
        libm::sqrt(self.abs_sq())
    }

    fn scale(self, s: f64) -> Self {
        self * Self::from_real(s)
    }

    /// Componentwise division by a real number.
    fn unscale(self, s: f64) -> Self;
}

impl Field for f64 {
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn abs_sq(self) -> f64 {
        self * self
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    #[inline]
    fn from_complex_lossy(z: Complex64) -> Self {
        z.re
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn unscale(self, s: f64) -> Self {
        self / s
    }
}

impl Field for Complex64 {
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn abs_sq(self) -> f64 {
        self.norm_sqr()
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        self
    }
    #[inline]
    fn from_complex_lossy(z: Complex64) -> Self {
        z
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn unscale(self, s: f64) -> Self {
        Complex64::unscale(&self, s)
    }
}
