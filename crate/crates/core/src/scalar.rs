//! Scalar abstraction shared by every module.
//!
//! All of the numerics are written against [`Real`], so the same code runs
//! in `f64` (the default, used by the CLI and the tolerance tiers) and in
//! `f32` for quick, low-precision sweeps.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Reduces an angle into `(-π, π]`.
pub fn wrap_pi<T: Real>(x: T) -> T {
    let two_pi = T::TAU();
    let mut r = x % two_pi;
    if r > T::PI() {
        r -= two_pi;
    } else if r <= -T::PI() {
        r += two_pi;
    }
    r
}

/// Reduces an angle into `[0, 2π)`.
pub fn wrap_two_pi<T: Real>(x: T) -> T {
    let two_pi = T::TAU();
    let mut r = x % two_pi;
    if r < T::zero() {
        r += two_pi;
    }
    // `-tiny % 2π + 2π` can round up to exactly 2π.
    if r >= two_pi {
        r -= two_pi;
    }
    r
}

/// Distance between two phases on the circle, in `[0, π]`.
pub fn phase_gap<T: Real>(a: T, b: T) -> T {
    wrap_pi(a - b).abs()
}

/// Returns the representative of `x` modulo 2π that lies closest to `near`.
pub fn nearest_branch<T: Real>(x: T, near: T) -> T {
    near + wrap_pi(x - near)
}

#[inline]
pub fn deg<T: Real>(degrees: T) -> T {
    degrees.to_radians()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_pi_range() {
        assert_eq!(wrap_pi(PI), PI);
        assert!((wrap_pi(-PI) - PI).abs() < 1e-15);
        assert!((wrap_pi(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_pi(-400.0 * PI + 0.25) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn wrap_two_pi_range() {
        assert_eq!(wrap_two_pi(0.0_f64), 0.0);
        assert!((wrap_two_pi(-PI / 2.0) - 3.0 * PI / 2.0).abs() < 1e-15);
        let r = wrap_two_pi(-1e-18_f64);
        assert!((0.0..2.0 * PI).contains(&r));
    }

    #[test]
    fn branch_selection() {
        let x = nearest_branch(0.1_f64, -2.0 * PI);
        assert!((x - (0.1 - 2.0 * PI)).abs() < 1e-12);
        assert!(phase_gap(2.0 * PI - 1e-3, 1e-3) < 2.1e-3);
    }

    #[test]
    fn f32_lit() {
        assert_eq!(f32::lit(0.5), 0.5_f32);
        assert_eq!(<f32 as Real>::half(), 0.5);
    }
}
