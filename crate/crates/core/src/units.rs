//! Physical constants and unit conversions.
//!
//! Energies are stored as E/h in GHz, times in ns, capacitances in farads
//! (the config layer accepts attofarads), frequencies in Hz where a spectral
//! density is involved.

use std::f64::consts::PI;

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant (J s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = PLANCK / (2.0 * PI);

pub const ATTOFARAD: f64 = 1e-18;
pub const GHZ: f64 = 1e9;
pub const NS: f64 = 1e-9;

/// Electrostatic energy (2e)^2 / (2C) of one Cooper pair on capacitance `c`
/// (farads), returned as E/h in GHz. Zero capacitance gives +inf.
pub fn pair_charging_energy_ghz(c: f64) -> f64 {
    let two_e = 2.0 * ELEMENTARY_CHARGE;
    two_e * two_e / (2.0 * c) / PLANCK / GHZ
}

pub fn af_to_farad(af: f64) -> f64 {
    af * ATTOFARAD
}

pub fn farad_to_af(f: f64) -> f64 {
    f / ATTOFARAD
}
