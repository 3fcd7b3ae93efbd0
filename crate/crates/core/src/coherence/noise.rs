use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::ensure;
use crate::Result;

/// Detuning noise: quasi-static Gaussian spread plus a power-law spectrum
/// S(ω) = S0·ω^−α (one-sided, so ⟨β²⟩ = ∫ S dω over [ω_lo, ω_hi]) synthesised
/// from log-spaced random-phase tones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseModel {
    pub sigma_qs: f64,
    pub alpha: f64,
    pub s0: f64,
    pub omega_lo: f64,
    pub omega_hi: f64,
    pub n_tones: usize,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            sigma_qs: 0.0,
            alpha: 1.0,
            s0: 0.0,
            omega_lo: 2.0 * PI * 1e-3,
            omega_hi: 2.0 * PI * 1e3,
            n_tones: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    pub omega: f64,
    pub amplitude: f64,
    pub phase: f64,
}

/// One trajectory's detuning history β(t) = Δ + Σ a_k cos(ω_k t + ϕ_k).
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    pub static_detuning: f64,
    pub tones: Vec<Tone>,
}

impl NoiseRealization {
    pub fn silent() -> Self {
        Self { static_detuning: 0.0, tones: Vec::new() }
    }

    pub fn detuning(&self, t: f64) -> f64 {
        self.static_detuning
            + self
                .tones
                .iter()
                .map(|k| k.amplitude * (k.omega * t + k.phase).cos())
                .sum::<f64>()
    }

    /// Σ (a_k/ω_k)·sin(ω_k t + ϕ_k), the antiderivative of the tone part.
    pub fn tone_integral(&self, t: f64) -> f64 {
        self.tones
            .iter()
            .map(|k| k.amplitude / k.omega * (k.omega * t + k.phase).sin())
            .sum()
    }

    /// ∫ β dt over [t0, t1].
    pub fn phase(&self, t0: f64, t1: f64) -> f64 {
        self.static_detuning * (t1 - t0) + self.tone_integral(t1) - self.tone_integral(t0)
    }
}

impl NoiseModel {
    pub fn quiet() -> Self {
        Self::default()
    }

    pub fn quasi_static(sigma_qs: f64, seed: u64) -> Self {
        Self { sigma_qs, seed, ..Self::default() }
    }

    pub fn with_power_law(mut self, alpha: f64, s0: f64) -> Self {
        self.alpha = alpha;
        self.s0 = s0;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.sigma_qs >= 0.0 && self.sigma_qs.is_finite(),
            "sigma_qs must be finite and non-negative, got {}",
            self.sigma_qs
        );
        ensure!(
            (0.0..=2.0).contains(&self.alpha),
            "alpha must lie in [0, 2], got {}",
            self.alpha
        );
        ensure!(
            self.s0 >= 0.0 && self.s0.is_finite(),
            "S0 must be finite and non-negative, got {}",
            self.s0
        );
        ensure!(
            self.omega_lo > 0.0 && self.omega_lo < self.omega_hi && self.omega_hi.is_finite(),
            "need 0 < omega_lo < omega_hi, got [{}, {}]",
            self.omega_lo,
            self.omega_hi
        );
        ensure!(self.n_tones >= 1, "n_tones must be at least 1");
        Ok(())
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.s0 * omega.powf(-self.alpha)
    }

    pub fn is_silent(&self) -> bool {
        self.sigma_qs == 0.0 && self.s0 == 0.0
    }

    /// Tone frequencies and their bandwidths Δω_k. The band [ω_lo, ω_hi] is
    /// split into equal log-width bins with one tone at each geometric centre.
    pub fn tone_grid(&self) -> Vec<(f64, f64)> {
        let n = self.n_tones;
        let r = (self.omega_hi / self.omega_lo).ln() / n as f64;
        (0..n)
            .map(|k| {
                let lo = self.omega_lo * (r * k as f64).exp();
                let hi = self.omega_lo * (r * (k + 1) as f64).exp();
                ((lo * hi).sqrt(), hi - lo)
            })
            .collect()
    }

    /// Amplitude a_k = √(2·S(ω_k)·Δω_k) so that ⟨a² cos²⟩ = S·Δω.
    pub fn tone_amplitudes(&self) -> Vec<(f64, f64)> {
        if self.s0 == 0.0 {
            return Vec::new();
        }
        self.tone_grid()
            .into_iter()
            .map(|(w, dw)| (w, (2.0 * self.spectral_density(w) * dw).sqrt()))
            .collect()
    }

    /// Variance of the power-law component, ∫ S dω over the band.
    pub fn power_law_variance(&self) -> f64 {
        self.tone_grid()
            .into_iter()
            .map(|(w, dw)| self.spectral_density(w) * dw)
            .sum()
    }

    pub(crate) fn rng(&self, trajectory: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trajectory);
        rng
    }

    pub(crate) fn realize_with(&self, amplitudes: &[(f64, f64)], trajectory: u64) -> NoiseRealization {
        let mut rng = self.rng(trajectory);
        let z: f64 = rng.sample(StandardNormal);
        let tones = amplitudes
            .iter()
            .map(|&(omega, amplitude)| Tone {
                omega,
                amplitude,
                phase: rng.random_range(0.0..2.0 * PI),
            })
            .collect();
        NoiseRealization { static_detuning: self.sigma_qs * z, tones }
    }

    /// Noise seen by trajectory `trajectory`; depends only on (seed, index).
    pub fn realize(&self, trajectory: u64) -> NoiseRealization {
        self.realize_with(&self.tone_amplitudes(), trajectory)
    }
}
