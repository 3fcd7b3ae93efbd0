//! Donor-cavity quantum electrodynamics: coupling strength, Jaynes-Cummings
//! ladder, spin-dependent transmission, photon-counting readout and the
//! effect of implantation straggle on the coupling.
//!
//! Angular frequencies and rates are in rad/s throughout.

mod mode;
mod readout;
mod straggle;
mod system;

pub use mode::{coupling_strength, strong_coupling_check, CavityMode, Emitter, StrongCoupling};
pub use readout::{readout_fidelity, ReadoutParams, ReadoutReport};
pub use straggle::{coupling_variation, ModeProfile, StragglePlacement, StraggleStats};
pub use system::{
    jc_ladder, transmission_spectrum, CavitySpectrum, CoupledSystem, JcManifold, Leg, SpinBranch,
    SpinState, UncoupledModel,
};

/// Ground-state (1s:A) electron g-factor.
pub const G_GROUND: f64 = 2.0057;
/// Excited-state (1s:Γ7) g-factor.
pub const G_EXCITED: f64 = 0.644;
