//! Simulation library for hyperfine-coupled donor spin qubits in silicon.
//!
//! The crate is organised around four physical subsystems:
//!
//! * [`spin`] builds and diagonalises the ground-state electron-nuclear spin
//!   Hamiltonian, tracks level labels across magnetic-field sweeps and locates
//!   clock transitions.
//! * [`coherence`] runs trajectory-averaged pulse sequences (Rabi, Ramsey,
//!   Hahn echo, CPMG, T1 recovery) on the singlet-triplet qubit under
//!   quasi-static and power-law detuning noise.
//! * [`optics`] covers the 1s:A to 1s:Γ7 absorption lines, optical
//!   hyperpolarisation and lifetime/linewidth/dipole conversions.
//! * [`cavity`] implements donor-cavity coupling, the Jaynes-Cummings ladder,
//!   spin-dependent transmission, photon-counting readout and implantation
//!   straggle statistics.
//!
//! [`fit`] provides the Levenberg-Marquardt fitter shared by the experiments.
//! All energies inside [`spin`] are in Hz; optical and cavity rates are in
//! rad/s unless a name says otherwise.

pub mod cavity;
pub mod coherence;
pub mod constants;
mod error;
pub mod fit;
pub mod optics;
pub mod spin;

pub use error::{Error, Result};
