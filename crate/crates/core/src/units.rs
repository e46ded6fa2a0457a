//! Physical constants and unit conversions.
//!
//! Every rate and frequency inside the crate is angular (rad/s). Configuration
//! files carry ordinary-frequency values in THz/GHz/MHz together with an
//! `angular` flag; [`to_angular`] performs the conversion once at load time.

use std::f64::consts::PI;

/// Reduced Planck constant, J s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s (exact).
pub const C_LIGHT: f64 = 299_792_458.0;

pub const THZ: f64 = 1e12;
pub const GHZ: f64 = 1e9;
pub const MHZ: f64 = 1e6;

/// Converts a configured value to rad/s.
///
/// With `angular = true` the value is already angular and is only scaled by
/// `unit`; otherwise it is an ordinary frequency and picks up a factor 2π.
pub fn to_angular(value: f64, unit: f64, angular: bool) -> f64 {
    if angular {
        value * unit
    } else {
        2.0 * PI * value * unit
    }
}

/// Inverse of [`to_angular`].
pub fn from_angular(omega: f64, unit: f64, angular: bool) -> f64 {
    if angular {
        omega / unit
    } else {
        omega / (2.0 * PI * unit)
    }
}

/// Vacuum wavelength (m) of an angular optical frequency.
pub fn wavelength(omega: f64) -> f64 {
    2.0 * PI * C_LIGHT / omega
}
