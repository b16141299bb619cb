//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the geometry is generic over (`f32`, `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Lossy conversion used for error payloads and reports.
    #[inline]
    fn as_f64(self) -> f64 {
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
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// `x - sin(x)` without the cancellation of the direct formula near zero.
pub fn x_minus_sin<T: Real>(x: T) -> T {
    if x.abs() < T::half() {
        // x^3/3! - x^5/5! + ...
        let x2 = x * x;
        let mut term = x * x2 / T::lit(6.0);
        let mut sum = term;
        let mut k = 3.0;
        while k < 21.0 {
            term = -term * x2 / T::lit((2.0 * k - 2.0) * (2.0 * k - 1.0));
            sum = sum + term;
            k += 1.0;
        }
        sum
    } else {
        x - x.sin()
    }
}

/// `sin(x) - x cos(x)`, again with a series near zero.
pub fn sin_minus_x_cos<T: Real>(x: T) -> T {
    if x.abs() < T::half() {
        // sum_{k>=1} (-1)^{k+1} 2k x^{2k+1} / (2k+1)!
        let x2 = x * x;
        let mut pow_fact = x * x2 / T::lit(6.0); // x^{2k+1}/(2k+1)! at k = 1
        let mut sum = pow_fact * T::two();
        let mut k = 2.0;
        while k < 11.0 {
            pow_fact = -pow_fact * x2 / T::lit((2.0 * k) * (2.0 * k + 1.0));
            sum = sum + pow_fact * T::lit(2.0 * k);
            k += 1.0;
        }
        sum
    } else {
        x.sin() - x * x.cos()
    }
}
