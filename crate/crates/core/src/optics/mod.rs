//! 1s:A ⇔ 1s:Γ7 optical transitions of the ionised chalcogen donor.

mod conversions;
mod lines;
mod pumping;

pub use conversions::{
    dipole_from_lifetime, hz_to_wavenumber, lifetime_discrepancy, lifetime_to_linewidth,
    linewidth_to_lifetime, mev_to_wavenumber, radiative_lifetime, wavenumber_to_hz,
    wavenumber_to_lifetime, LifetimeDiscrepancy,
};
pub use lines::{
    absorption_spectrum, default_lines, GroundManifold, Isotope, LineTableOptions, OpticalLine,
    SpectrumTrace,
};
pub use pumping::{hyperpolarize, PolarizationTrace, PopulationState, PumpModel};

/// Measured Lorentzian linewidth of the ⁷⁷Se⁺ zero-phonon lines (cm⁻¹).
pub const SE_LINEWIDTH_CM1: f64 = 0.007;
/// Energy of 1s:Γ7 above 1s:A (meV).
pub const SE_TRANSITION_MEV: f64 = 427.0;
/// Transition dipole moment (debye).
pub const SE_DIPOLE_DEBYE: f64 = 1.3;
/// Vacuum wavelength of the transition (m).
pub const SE_WAVELENGTH: f64 = 2.9e-6;
/// Refractive index of silicon at the transition wavelength.
pub const SILICON_INDEX: f64 = 3.45;
