use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{G_EXCITED, G_GROUND};
use crate::constants::{C, DEBYE, EPS0, HBAR};
use crate::error::ensure;
use crate::optics::{wavenumber_to_hz, SE_DIPOLE_DEBYE, SE_LINEWIDTH_CM1, SE_WAVELENGTH, SILICON_INDEX};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityMode {
    /// Vacuum resonance wavelength (m).
    pub lambda0: f64,
    pub q: f64,
    /// Share of κ leaking into each of the two access ports.
    pub kappa_ext_fraction: f64,
    /// Mode volume in units of (λ/n)³.
    pub v_rel: f64,
    pub n: f64,
}

impl CavityMode {
    pub fn new(lambda0: f64, q: f64, kappa_ext_fraction: f64, v_rel: f64, n: f64) -> Result<Self> {
        let m = Self { lambda0, q, kappa_ext_fraction, v_rel, n };
        m.validate()?;
        Ok(m)
    }

    /// Q = 10⁵, V = 0.1 (λ/n)³ in silicon at 2.9 μm, symmetric ports.
    pub fn se77_default() -> Self {
        Self {
            lambda0: SE_WAVELENGTH,
            q: 1e5,
            kappa_ext_fraction: 0.5,
            v_rel: 0.1,
            n: SILICON_INDEX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.lambda0 > 0.0 && self.lambda0.is_finite(), "lambda0 must be positive");
        ensure!(self.q > 0.0 && self.q.is_finite(), "Q must be positive, got {}", self.q);
        ensure!(
            self.kappa_ext_fraction > 0.0 && self.kappa_ext_fraction <= 0.5,
            "kappa_ext_fraction must lie in (0, 0.5] for a two-port cavity, got {}",
            self.kappa_ext_fraction
        );
        ensure!(self.v_rel > 0.0 && self.v_rel.is_finite(), "V_rel must be positive");
        ensure!(self.n > 0.0 && self.n.is_finite(), "refractive index must be positive");
        Ok(())
    }

    pub fn omega_c(&self) -> f64 {
        2.0 * PI * C / self.lambda0
    }

    pub fn kappa(&self) -> f64 {
        self.omega_c() / self.q
    }

    pub fn kappa_ext(&self) -> f64 {
        self.kappa_ext_fraction * self.kappa()
    }

    /// Physical mode volume (m³).
    pub fn volume(&self) -> f64 {
        self.v_rel * (self.lambda0 / self.n).powi(3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Emitter {
    pub dipole_debye: f64,
    /// Zero-field transition frequency (rad/s).
    pub omega_a: f64,
    /// Homogeneous FWHM (rad/s).
    pub gamma: f64,
    pub g_ground: f64,
    pub g_excited: f64,
}

impl Emitter {
    /// 1.3 D, 0.007 cm⁻¹ linewidth, resonant with a 2.9 μm cavity.
    pub fn se77_default() -> Self {
        Self {
            dipole_debye: SE_DIPOLE_DEBYE,
            omega_a: 2.0 * PI * C / SE_WAVELENGTH,
            gamma: 2.0 * PI * wavenumber_to_hz(SE_LINEWIDTH_CM1),
            g_ground: G_GROUND,
            g_excited: G_EXCITED,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.dipole_debye > 0.0 && self.dipole_debye.is_finite(),
            "dipole must be positive, got {}",
            self.dipole_debye
        );
        ensure!(self.gamma > 0.0 && self.gamma.is_finite(), "gamma must be positive");
        ensure!(self.omega_a > 0.0 && self.omega_a.is_finite(), "omega_a must be positive");
        ensure!(
            self.g_ground.is_finite() && self.g_excited.is_finite(),
            "g-factors must be finite"
        );
        Ok(())
    }
}

/// Vacuum coupling g = (d/ħ)·√(ħω / (2 ε0 n² V)), V = V_rel·(λ/n)³.
pub fn coupling_strength(dipole_debye: f64, lambda0: f64, n: f64, v_rel: f64) -> Result<f64> {
    ensure!(dipole_debye >= 0.0 && dipole_debye.is_finite(), "dipole must be non-negative");
    ensure!(lambda0 > 0.0 && lambda0.is_finite(), "wavelength must be positive");
    ensure!(n > 0.0 && n.is_finite(), "refractive index must be positive");
    ensure!(v_rel > 0.0 && v_rel.is_finite(), "V_rel must be positive");
    let omega = 2.0 * PI * C / lambda0;
    let v = v_rel * (lambda0 / n).powi(3);
    let d = dipole_debye * DEBYE;
    Ok(d / HBAR * (HBAR * omega / (2.0 * EPS0 * n * n * v)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrongCoupling {
    pub strong: bool,
    /// 4g²/(κγ).
    pub cooperativity: f64,
    /// 2g/γ.
    pub ratio: f64,
}

/// Strong coupling means a resolvable vacuum Rabi doublet:
/// g > |κ − γ|/4 and 2g > (κ + γ)/2.
pub fn strong_coupling_check(g: f64, kappa: f64, gamma: f64) -> Result<StrongCoupling> {
    ensure!(
        g >= 0.0 && kappa >= 0.0 && gamma >= 0.0,
        "rates must be non-negative (g={g}, kappa={kappa}, gamma={gamma})"
    );
    let cooperativity = if g == 0.0 { 0.0 } else { 4.0 * g * g / (kappa * gamma) };
    let ratio = if g == 0.0 { 0.0 } else { 2.0 * g / gamma };
    let strong = g > (kappa - gamma).abs() / 4.0 && 2.0 * g > (kappa + gamma) / 2.0;
    Ok(StrongCoupling { strong, cooperativity, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silicon_coupling() {
        let g = coupling_strength(1.3, 2.9e-6, 3.45, 0.1).unwrap();
        let two_g_hz = 2.0 * g / (2.0 * PI);
        assert!((two_g_hz / 0.968e9 - 1.0).abs() < 2e-3, "{two_g_hz}");
        let g4 = coupling_strength(1.3, 2.9e-6, 3.45, 0.4).unwrap();
        assert!((2.0 * g4 / g - 1.0).abs() < 1e-12);
        assert_eq!(coupling_strength(0.0, 2.9e-6, 3.45, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn cavity_rates() {
        let m = CavityMode::se77_default();
        assert!((m.kappa() / (2.0 * PI) / 1.034e9 - 1.0).abs() < 1e-3);
        assert!(CavityMode { kappa_ext_fraction: 0.6, ..m }.validate().is_err());
        assert!(CavityMode { q: 0.0, ..m }.validate().is_err());
    }

    #[test]
    fn strong_check() {
        let e = Emitter::se77_default();
        let m = CavityMode::se77_default();
        let g = coupling_strength(e.dipole_debye, m.lambda0, m.n, m.v_rel).unwrap();
        let s = strong_coupling_check(g, m.kappa(), e.gamma).unwrap();
        assert!(s.strong);
        assert!((s.cooperativity / 4.32 - 1.0).abs() < 0.02, "{}", s.cooperativity);
        let z = strong_coupling_check(0.0, m.kappa(), e.gamma).unwrap();
        assert!(!z.strong && z.cooperativity == 0.0);
        assert!(strong_coupling_check(-1.0, 1.0, 1.0).is_err());
    }
}
