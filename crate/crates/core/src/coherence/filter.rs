//! Filter-function treatment of Gaussian dephasing noise under CPMG.
//!
//! For a sequence with toggling function y(s) = ±1 the accumulated phase is
//! ∫ y β ds. With the tone representation of [`NoiseModel`] the Gaussian
//! decay exponent is χ = ½ Σ_k S(ω_k) Δω_k |G(ω_k)|², where
//! G(ω) = ∫₀ᵀ y(s) e^{iωs} ds.

use num_complex::Complex64;

use super::NoiseModel;
use crate::error::ensure;
use crate::Result;

/// Sign-switch times of the CPMG toggling function, including 0 and T.
pub fn cpmg_switch_times(n_pulses: usize, total_time: f64) -> Vec<f64> {
    let n = n_pulses as f64;
    let mut t = vec![0.0];
    t.extend((1..=n_pulses).map(|j| total_time * (2 * j - 1) as f64 / (2.0 * n)));
    t.push(total_time);
    t
}

/// |G(ω)|² for N equally spaced π pulses in total time T.
pub fn cpmg_filter(n_pulses: usize, total_time: f64, omega: f64) -> f64 {
    let s = cpmg_switch_times(n_pulses, total_time);
    let g: Complex64 = s
        .windows(2)
        .enumerate()
        .map(|(j, w)| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let e1 = Complex64::from_polar(1.0, omega * w[1]);
            let e0 = Complex64::from_polar(1.0, omega * w[0]);
            sign * (e1 - e0)
        })
        .sum::<Complex64>()
        / Complex64::new(0.0, omega);
    g.norm_sqr()
}

/// Power-law decay exponent χ(T) for the model's tone grid (quasi-static
/// part excluded: it is refocused exactly).
pub fn decoherence_exponent(noise: &NoiseModel, n_pulses: usize, total_time: f64) -> f64 {
    noise
        .tone_grid()
        .into_iter()
        .map(|(w, dw)| 0.5 * noise.spectral_density(w) * dw * cpmg_filter(n_pulses, total_time, w))
        .sum()
}

/// S0 for which the Hahn echo (N = 1) decays to e⁻¹ at total time `t2`,
/// keeping α and the band of `noise`.
pub fn calibrate_power_law(noise: &NoiseModel, t2: f64) -> Result<f64> {
    ensure!(t2 > 0.0 && t2.is_finite(), "calibration T2 must be positive, got {t2}");
    let unit = NoiseModel { s0: 1.0, ..noise.clone() };
    unit.validate()?;
    let chi = decoherence_exponent(&unit, 1, t2);
    ensure!(chi > 0.0, "noise band produces no Hahn dephasing");
    Ok(1.0 / chi)
}

/// Total time at which χ reaches 1 for N pulses, by bisection on log T.
pub fn filter_t2(noise: &NoiseModel, n_pulses: usize) -> Result<f64> {
    ensure!(noise.s0 > 0.0, "no power-law noise to decay");
    let (mut lo, mut hi) = (1e-9f64, 1e9f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if decoherence_exponent(noise, n_pulses, mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-12 {
            break;
        }
    }
    Ok((lo * hi).sqrt())
}
