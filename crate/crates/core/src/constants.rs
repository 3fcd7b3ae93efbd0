//! Physical constants, CODATA 2018 recommended values.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Bohr magneton (J/T).
    pub mu_b: f64,
    /// Nuclear magneton (J/T).
    pub mu_n: f64,
    /// Planck constant (J s).
    pub h: f64,
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Vacuum permittivity (F/m).
    pub eps0: f64,
    /// Speed of light in vacuum (m/s).
    pub c: f64,
    /// One debye (C m).
    pub debye: f64,
    /// Elementary charge (C).
    pub e: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    mu_b: 9.274_010_078_3e-24,
    mu_n: 5.050_783_746_1e-27,
    h: 6.626_070_15e-34,
    hbar: 6.626_070_15e-34 / (2.0 * PI),
    eps0: 8.854_187_812_8e-12,
    c: 299_792_458.0,
    debye: 1e-21 / 299_792_458.0,
    e: 1.602_176_634e-19,
};

pub const MU_B: f64 = CODATA_2018.mu_b;
pub const MU_N: f64 = CODATA_2018.mu_n;
pub const H: f64 = CODATA_2018.h;
pub const HBAR: f64 = CODATA_2018.hbar;
pub const EPS0: f64 = CODATA_2018.eps0;
pub const C: f64 = CODATA_2018.c;
pub const DEBYE: f64 = CODATA_2018.debye;
pub const ELEMENTARY_CHARGE: f64 = CODATA_2018.e;

/// Hz per cm⁻¹ (c expressed in cm/s).
pub const HZ_PER_WAVENUMBER: f64 = C * 100.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bohr_magneton_over_h() {
        // 13.996 244 936 GHz/T
        assert!((MU_B / H / 1e9 - 13.996_244_936).abs() < 1e-8);
    }

    #[test]
    fn hbar_is_h_over_two_pi() {
        assert!((HBAR * 2.0 * PI / H - 1.0).abs() < 1e-15);
    }

    #[test]
    fn debye_in_si() {
        assert!((DEBYE / 3.335_640_95e-30 - 1.0).abs() < 1e-9);
        assert!((HZ_PER_WAVENUMBER - 29.979_245_8e9).abs() < 1e-3);
    }
}
