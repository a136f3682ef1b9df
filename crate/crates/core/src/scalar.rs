//! Scalar abstraction for amplitudes and phases.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type usable as the real part of an amplitude: `f32` or `f64`.
///
/// The default tolerances scale with the precision of the type. For `f64`
/// they are `1e-12` (unitarity, norm, purity) and `1e-9` (classification).
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Default tolerance for norm, unitarity and purity checks.
    const UNITARITY_TOL: Self;
    /// Default tolerance for recognising GBS amplitudes and phases.
    const CLASSIFY_TOL: Self;

    /// Lossy conversion from `f64`; used for literals and user input.
    fn of(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64;
}

impl Real for f64 {
    const UNITARITY_TOL: Self = 1e-12;
    const CLASSIFY_TOL: Self = 1e-9;

    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Real for f32 {
    const UNITARITY_TOL: Self = 1e-5;
    const CLASSIFY_TOL: Self = 1e-4;

    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

/// Wraps an angle into `(-π, π]`; `-π` maps to `π`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut t = theta % two_pi;
    if t > T::PI() {
        t = t - two_pi;
    } else if t <= -T::PI() {
        t = t + two_pi;
    }
    t
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn angle_distance<T: Real>(a: T, b: T) -> T {
    wrap_angle(a - b).abs()
}
