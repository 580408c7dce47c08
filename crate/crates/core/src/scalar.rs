//! Scalar abstractions shared by the numerical modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Floating-point type the grid numerics are generic over (`f32` or `f64`).
pub trait Real:
    Sample<Real = Self>
    + Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Default
    + Display
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every literal used in the crate is finite.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("representable count")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Coefficient ring for exact symbol arithmetic (`f64`, `Ratio<i64>`, ...).
pub trait Ring: Clone + Debug + PartialEq + Num + Neg<Output = Self> + FromPrimitive + Send + Sync + 'static {}

impl<S> Ring for S where S: Clone + Debug + PartialEq + Num + Neg<Output = S> + FromPrimitive + Send + Sync + 'static {}

impl Real for f32 {}
impl Real for f64 {}

/// Whether a [`crate::grid::SpatialField`] carries complex or real samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Complex,
    Real,
}

/// Sample type stored in a spatial field: a [`Real`] or a `Complex<Real>`.
pub trait Sample: Copy + Debug + Num + Neg<Output = Self> + Send + Sync + 'static {
    type Real: Real;
    const KIND: FieldKind;

    fn to_complex(self) -> Complex<Self::Real>;
    /// Real part for real fields, identity for complex ones.
    fn from_complex(c: Complex<Self::Real>) -> Self;
    fn from_real(r: Self::Real) -> Self;
    fn scale(self, s: Self::Real) -> Self;
    fn abs2(self) -> Self::Real;
    fn finite(self) -> bool;
}

macro_rules! real_sample {
    ($t:ty) => {
        impl Sample for $t {
            type Real = $t;
            const KIND: FieldKind = FieldKind::Real;
            #[inline]
            fn to_complex(self) -> Complex<$t> {
                Complex::new(self, 0.0)
            }
            #[inline]
            fn from_complex(c: Complex<$t>) -> Self {
                c.re
            }
            #[inline]
            fn from_real(r: $t) -> Self {
                r
            }
            #[inline]
            fn scale(self, s: $t) -> Self {
                self * s
            }
            #[inline]
            fn abs2(self) -> $t {
                self * self
            }
            #[inline]
            fn finite(self) -> bool {
                <$t>::is_finite(self)
            }
        }
    };
}

real_sample!(f32);
real_sample!(f64);

impl<T: Real> Sample for Complex<T> {
    type Real = T;
    const KIND: FieldKind = FieldKind::Complex;
    #[inline]
    fn to_complex(self) -> Complex<T> {
        self
    }
    #[inline]
    fn from_complex(c: Complex<T>) -> Self {
        c
    }
    #[inline]
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    #[inline]
    fn scale(self, s: T) -> Self {
        self * s
    }
    #[inline]
    fn abs2(self) -> T {
        Complex::norm_sqr(&self)
    }
    #[inline]
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Wraps an angle into `(-pi, pi]`.
#[inline]
pub fn wrap_angle<T: Real>(a: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut w = a - two_pi * (a / two_pi).round();
    if w <= -T::PI() {
        w = w + two_pi;
    } else if w > T::PI() {
        w = w - two_pi;
    }
    w
}
