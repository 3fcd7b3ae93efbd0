use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::{C, DEBYE, ELEMENTARY_CHARGE, EPS0, H, HBAR, HZ_PER_WAVENUMBER};
use crate::error::ensure;
use crate::Result;

pub fn wavenumber_to_hz(cm1: f64) -> f64 {
    cm1 * HZ_PER_WAVENUMBER
}

pub fn hz_to_wavenumber(hz: f64) -> f64 {
    hz / HZ_PER_WAVENUMBER
}

pub fn mev_to_wavenumber(mev: f64) -> f64 {
    mev * 1e-3 * ELEMENTARY_CHARGE / (H * C * 100.0)
}

/// Lifetime τ = 1/(2πΔν) of a Lorentzian with FWHM Δν (Hz).
pub fn linewidth_to_lifetime(fwhm_hz: f64) -> Result<f64> {
    ensure!(fwhm_hz > 0.0 && fwhm_hz.is_finite(), "linewidth must be positive, got {fwhm_hz}");
    Ok(1.0 / (2.0 * PI * fwhm_hz))
}

/// FWHM (Hz) of a Lorentzian with lifetime τ.
pub fn lifetime_to_linewidth(tau: f64) -> Result<f64> {
    ensure!(tau > 0.0 && tau.is_finite(), "lifetime must be positive, got {tau}");
    Ok(1.0 / (2.0 * PI * tau))
}

pub fn wavenumber_to_lifetime(fwhm_cm1: f64) -> Result<f64> {
    linewidth_to_lifetime(wavenumber_to_hz(fwhm_cm1))
}

fn check_medium(wavelength: f64, index: f64) -> Result<()> {
    ensure!(wavelength > 0.0 && wavelength.is_finite(), "wavelength must be positive");
    ensure!(index > 0.0 && index.is_finite(), "refractive index must be positive");
    Ok(())
}

/// Spontaneous-emission lifetime τ = 3π ε0 ħ c³ / (n ω³ d²) for a dipole of
/// `dipole_debye` emitting at vacuum wavelength `wavelength` in a medium of
/// index `index` (no local-field factor).
pub fn radiative_lifetime(dipole_debye: f64, wavelength: f64, index: f64) -> Result<f64> {
    ensure!(dipole_debye > 0.0 && dipole_debye.is_finite(), "dipole must be positive");
    check_medium(wavelength, index)?;
    let omega = 2.0 * PI * C / wavelength;
    let d = dipole_debye * DEBYE;
    Ok(3.0 * PI * EPS0 * HBAR * C.powi(3) / (index * omega.powi(3) * d * d))
}

/// Inverse of [`radiative_lifetime`], in debye.
pub fn dipole_from_lifetime(tau: f64, wavelength: f64, index: f64) -> Result<f64> {
    ensure!(tau > 0.0 && tau.is_finite(), "lifetime must be positive, got {tau}");
    check_medium(wavelength, index)?;
    let omega = 2.0 * PI * C / wavelength;
    let d = (3.0 * PI * EPS0 * HBAR * C.powi(3) / (index * omega.powi(3) * tau)).sqrt();
    Ok(d / DEBYE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LifetimeDiscrepancy {
    pub radiative_lifetime: f64,
    pub linewidth_lifetime: f64,
    /// radiative / linewidth-implied.
    pub ratio: f64,
}

/// Compares the radiative lifetime of a dipole with the lifetime implied by
/// a measured homogeneous linewidth. The two are not reconciled.
pub fn lifetime_discrepancy(
    fwhm_hz: f64,
    dipole_debye: f64,
    wavelength: f64,
    index: f64,
) -> Result<LifetimeDiscrepancy> {
    let radiative_lifetime = radiative_lifetime(dipole_debye, wavelength, index)?;
    let linewidth_lifetime = linewidth_to_lifetime(fwhm_hz)?;
    Ok(LifetimeDiscrepancy {
        radiative_lifetime,
        linewidth_lifetime,
        ratio: radiative_lifetime / linewidth_lifetime,
    })
}
