//! Scalar abstraction and physical constants.
//!
//! All numeric routines in this crate are generic over [`Real`], which is
//! implemented for `f32` and `f64`. `f64` is the default type parameter on
//! every public type; `f32` works but the shipped tolerances assume `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the toolkit is generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Sum<T>
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub fn real<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("constant must be representable in the scalar type")
}

/// Speed of light as the working scalar type (m/s).
#[inline]
pub fn light_speed<R: Real>() -> R {
    real(SPEED_OF_LIGHT)
}

/// Degrees to radians.
#[inline]
pub fn deg_to_rad<R: Real>(deg: R) -> R {
    deg * R::PI() / real(180.0)
}

/// Radians to degrees.
#[inline]
pub fn rad_to_deg<R: Real>(rad: R) -> R {
    rad * real(180.0) / R::PI()
}

/// Angular frequency (rad/s) of a vacuum wavelength given in nm.
#[inline]
pub fn omega_from_lambda_nm<R: Real>(lambda_nm: R) -> R {
    R::TAU() * light_speed::<R>() / (lambda_nm * real(1e-9))
}

/// Vacuum wavelength (nm) of an angular frequency given in rad/s.
#[inline]
pub fn lambda_nm_from_omega<R: Real>(omega: R) -> R {
    R::TAU() * light_speed::<R>() / omega * real(1e9)
}

/// sin(x)/x with the removable singularity filled in.
#[inline]
pub fn sinc<R: Real>(x: R) -> R {
    if x.abs() < real(1e-6) {
        R::one() - x * x / real(6.0)
    } else {
        x.sin() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_frequency_round_trip() {
        let lambda = 1064.0_f64;
        let omega = omega_from_lambda_nm(lambda);
        assert!((lambda_nm_from_omega(omega) - lambda).abs() < 1e-9);
    }

    #[test]
    fn sinc_limit_and_zero() {
        assert_eq!(sinc(0.0_f64), 1.0);
        assert!((sinc(std::f64::consts::PI)).abs() < 1e-15);
        assert!((sinc(1e-8_f64) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sinc_works_at_f32() {
        assert!((sinc(0.5_f32) - 0.5_f32.sin() / 0.5).abs() < 1e-6);
    }
}
