//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All matrix builders, quadrature rules and phase statistics are written
//! against [`Real`], implemented for `f32` and `f64`. The crate root exposes
//! `f64` aliases for the common case.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for the implemented types.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_int(i: i64) -> Self {
        Self::from_i64(i).expect("integer representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `(-1)^k` as a scalar.
pub fn parity_sign<T: Real>(k: i64) -> T {
    if k.rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// `exp(i * k * phi)` for an integer `k`.
///
/// When `k * phi` is an exact multiple of `pi / 2` the result is returned
/// exactly (`1`, `i`, `-1`, `-i`), so phase factors at the canonical
/// reference phase `-pi` carry no rounding.
pub fn integer_phase<T: Real>(k: i64, phi: T) -> Complex<T> {
    let quarter_turns = T::lit(2.0) * phi / T::PI() * T::from_int(k);
    if quarter_turns.fract() == T::zero() && quarter_turns.abs() < T::lit(1e15) {
        let q = quarter_turns.to_i64().unwrap_or(0).rem_euclid(4);
        return match q {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
    }
    Complex::from_polar(T::one(), T::from_int(k) * phi)
}

/// `sin(pi x) / (pi x)` for a half-integer `x = twice / 2`, evaluated exactly.
///
/// Integers give the Kronecker delta; odd `twice` gives
/// `2 (-1)^((twice - 1) / 2) / (pi * twice)`.
pub fn half_integer_sinc<T: Real>(twice: i64) -> T {
    if twice == 0 {
        T::one()
    } else if twice % 2 == 0 {
        T::zero()
    } else {
        let sign: T = parity_sign((twice - 1).div_euclid(2));
        sign * T::lit(2.0) / (T::PI() * T::from_int(twice))
    }
}
