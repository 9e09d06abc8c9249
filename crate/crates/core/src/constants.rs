//! Physical constants (SI).

pub use core::f64::consts::{PI, TAU};

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of ⁸⁵Rb in atomic mass units.
pub const RB85_MASS_U: f64 = 84.9118;
/// 0 °C in kelvin.
pub const ZERO_CELSIUS: f64 = 273.15;

/// Converts an ordinary frequency in Hz to an angular frequency in rad/s.
#[inline]
pub fn angular(hz: f64) -> f64 {
    TAU * hz
}

/// Converts an angular frequency in rad/s to an ordinary frequency in Hz.
#[inline]
pub fn ordinary(rad_per_s: f64) -> f64 {
    rad_per_s / TAU
}
