//! Scalar abstraction shared by the matrix and mesh code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type the complex linear algebra is generic over.
///
/// Implemented for `f32` and `f64`. The associated tolerance is what
/// constructors use when checking unitarity, so it has to reflect the
/// precision of the type.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Max-norm tolerance on `U†U - I` accepted when building a `Unitary`.
    fn unitarity_tol() -> Self;

    /// Lossless conversion from a literal; panics only on non-representable
    /// input, which cannot happen for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f64 {
    #[inline]
    fn unitarity_tol() -> Self {
        1e-10
    }
}

impl Real for f32 {
    #[inline]
    fn unitarity_tol() -> Self {
        1e-4
    }
}

/// Wrap an angle into `[0, 2π)`.
///
/// Negative inputs take the `x % 2π + 2π` branch; a result that rounds up
/// to exactly `2π` is folded back to zero.
pub fn wrap_phase<T: Real>(x: T) -> T {
    let two_pi = T::two_pi();
    let mut r = x % two_pi;
    if r < T::zero() {
        r = r + two_pi;
    }
    if r >= two_pi {
        r = T::zero();
    }
    r
}

/// `atan2` with the tie `atan2(0, 0) = 0` made explicit.
#[inline]
pub fn atan2_or_zero<T: Real>(y: T, x: T) -> T {
    if y == T::zero() && x == T::zero() {
        T::zero()
    } else {
        y.atan2(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn wrap_phase_branches() {
        assert_eq!(wrap_phase(0.0_f64), 0.0);
        assert!((wrap_phase(-PI / 2.0) - 1.5 * PI).abs() < 1e-15);
        assert!((wrap_phase(5.0 * PI) - PI).abs() < 1e-12);
        assert_eq!(wrap_phase(TAU), 0.0);
        assert_eq!(wrap_phase(-TAU), 0.0);
        let tiny = wrap_phase(-1e-300_f64);
        assert!((0.0..TAU).contains(&tiny));
        let w = wrap_phase(-1.0_f32);
        assert!((w - (std::f32::consts::TAU - 1.0)).abs() < 1e-6);
    }

    #[test]
    fn atan2_tie() {
        assert_eq!(atan2_or_zero(0.0_f64, 0.0), 0.0);
        assert_eq!(atan2_or_zero(-0.0_f64, -0.0), 0.0);
        assert!((atan2_or_zero(1.0_f64, 0.0) - PI / 2.0).abs() < 1e-15);
    }
}
