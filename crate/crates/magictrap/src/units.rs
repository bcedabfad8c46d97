//! Physical constants (CODATA 2018, exact where the SI defines them) and the
//! one conversion layer between file/CLI units and internal SI-angular units.

use std::f64::consts::PI;

pub const C: f64 = 299_792_458.0;
pub const H: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = H / (2.0 * PI);
pub const K_B: f64 = 1.380_649e-23;
pub const EPS0: f64 = 8.854_187_812_8e-12;
pub const E_CHARGE: f64 = 1.602_176_634e-19;
pub const A0: f64 = 5.291_772_109_03e-11;
/// e·a₀ in C·m.
pub const EA0: f64 = E_CHARGE * A0;
/// Bohr magneton over h, Hz per tesla.
pub const MU_B_OVER_H: f64 = 1.399_624_493_61e10;
pub const GAUSS: f64 = 1e-4;
pub const G_S: f64 = 2.002_319_304_36;

pub const MHZ: f64 = 1e6;
pub const GHZ: f64 = 1e9;
pub const GW_M2: f64 = 1e9;
pub const MICROKELVIN: f64 = 1e-6;

/// Wavenumber (cm⁻¹) to ordinary frequency (Hz).
pub fn cm1_to_hz(k: f64) -> f64 {
    C * 100.0 * k
}

pub fn hz_to_rad(f: f64) -> f64 {
    2.0 * PI * f
}

pub fn rad_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}

/// Vacuum wavelength in nm of a laser at `nu` Hz.
pub fn wavelength_nm(nu: f64) -> f64 {
    C / nu * 1e9
}

/// A frequency shift in Hz expressed as a temperature in μK (h·δ/k_B).
pub fn hz_to_microkelvin(f: f64) -> f64 {
    H * f / K_B / MICROKELVIN
}

/// Peak intensity of a Gaussian beam, 2P/(πw²).
pub fn peak_intensity(power_w: f64, waist_m: f64) -> f64 {
    2.0 * power_w / (PI * waist_m * waist_m)
}
