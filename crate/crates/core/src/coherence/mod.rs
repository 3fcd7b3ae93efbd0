//! Pulsed magnetic-resonance experiments on the S0 ⇔ T0 clock qubit.
//!
//! The qubit is treated as a two-level system in the frame rotating at the
//! drive frequency. Each Monte-Carlo trajectory draws a quasi-static detuning
//! and one realisation of power-law detuning noise; pulses are rotations of
//! the Bloch vector and Markovian T1/T2 damping is applied analytically during
//! free evolution. The measured signal is the final z component, so a
//! fully polarised, perfectly refocused qubit reads 1.

mod evolve;
mod experiments;
pub mod filter;
mod noise;
mod sequence;

use serde::Serialize;

use crate::error::ensure;
use crate::Result;

pub use evolve::{evolve, EnsembleBloch};
pub use experiments::{
    cpmg_experiment, fit_decay, hahn_echo_experiment, rabi_experiment, ramsey_experiment,
    refocusing_angle_scan, t1_experiment, CpmgResult, CpmgRow, EchoOptions, EchoResult,
    SignalTrace, TraceMeta,
};
pub use noise::{NoiseModel, NoiseRealization, Tone};
pub use sequence::{Bloch, Pulse, PulseSequence, SequenceItem};

/// Default number of Monte-Carlo trajectories per trace point.
pub const DEFAULT_TRAJECTORIES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitModel {
    /// Transition frequency (Hz); informational in the rotating frame.
    pub f0: f64,
    /// On-resonance Rabi angular frequency per unit drive amplitude (rad/s).
    pub omega_r: f64,
    /// Longitudinal relaxation time (s).
    pub t1: f64,
    /// Intrinsic coherence time (s).
    pub t2: f64,
    /// Exponent n of the intrinsic decay exp(−(t/T2)^n).
    pub stretch: f64,
}

impl QubitModel {
    pub fn new(f0: f64, omega_r: f64, t1: f64, t2: f64, stretch: f64) -> Result<Self> {
        let q = Self { f0, omega_r, t1, t2, stretch };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.f0.is_finite(), "f0 must be finite");
        ensure!(
            self.omega_r > 0.0 && self.omega_r.is_finite(),
            "omega_r must be positive and finite, got {}",
            self.omega_r
        );
        ensure!(self.t1 > 0.0, "T1 must be positive, got {}", self.t1);
        ensure!(self.t2 > 0.0, "T2 must be positive, got {}", self.t2);
        ensure!(
            self.t2 <= 2.0 * self.t1,
            "T2 ({}) cannot exceed 2·T1 ({})",
            self.t2,
            2.0 * self.t1
        );
        ensure!(
            (1.0..=3.0).contains(&self.stretch),
            "stretch exponent must lie in [1, 3], got {}",
            self.stretch
        );
        Ok(())
    }

    /// ⁷⁷Se⁺ S0 ⇔ T0 qubit in a 70 μT field with shielding: T1 = 360 s,
    /// T2 = 2.14 s. The Rabi frequency is a free choice (2π·1 kHz).
    pub fn se77_clock() -> Self {
        Self {
            f0: 1.660_001_164e9,
            omega_r: 2.0 * std::f64::consts::PI * 1e3,
            t1: 360.0,
            t2: 2.14,
            stretch: 1.0,
        }
    }

    pub fn with_t1(mut self, t1: f64) -> Self {
        self.t1 = t1;
        self
    }

    pub fn with_t2(mut self, t2: f64) -> Self {
        self.t2 = t2;
        self
    }

    /// Coherence-free limit: T1 = T2 = ∞.
    pub fn ideal(omega_r: f64) -> Self {
        Self {
            f0: 0.0,
            omega_r,
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            stretch: 1.0,
        }
    }
}
