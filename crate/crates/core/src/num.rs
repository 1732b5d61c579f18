//! Scalar abstraction. Everything numeric in this crate is generic over
//! [`Real`], so the same pipeline runs in `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::num::ParseFloatError;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, Signed};

/// Floating-point scalar: `f32` or `f64`.
///
/// The `FromStr` bound gives exact text parsing (file formats), `Display`
/// gives shortest round-trip rendering, and the remaining bounds cover the
/// numeric kernels (including the FFT backend).
pub trait Real:
    Float
    + FromPrimitive
    + Signed
    + NumAssign
    + FromStr<Err = ParseFloatError>
    + Display
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Cast a constant. Panics only on non-finite input, which never occurs
    /// for the literals this is used with.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite constant")
    }

    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("usize fits in scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + Signed
        + NumAssign
        + FromStr<Err = ParseFloatError>
        + Display
        + Debug
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn midpoint<T: Real>(a: T, b: T) -> T {
        (a + b) / T::of(2.0)
    }

    #[test]
    fn works_for_both_widths() {
        assert_eq!(midpoint(1.0f64, 2.0f64), 1.5);
        assert_eq!(midpoint(1.0f32, 2.0f32), 1.5);
    }

    #[test]
    fn parse_and_render_round_trip() {
        let x: f64 = "0.1".parse().unwrap();
        assert_eq!(format!("{x}"), "0.1");
    }
}
