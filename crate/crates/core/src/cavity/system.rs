use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mode::{coupling_strength, CavityMode, Emitter};
use crate::constants::{HBAR, MU_B};
use crate::error::ensure;
use crate::Result;

/// Ground-state electron spin projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinBranch {
    Up,
    Down,
}

impl SpinBranch {
    pub fn sign(self) -> f64 {
        match self {
            SpinBranch::Up => 1.0,
            SpinBranch::Down => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            SpinBranch::Up => SpinBranch::Down,
            SpinBranch::Down => SpinBranch::Up,
        }
    }
}

/// Optical leg addressed by the cavity: `Cross` flips the effective spin
/// (m → −m, the Λ legs), `Direct` preserves it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Leg {
    Cross,
    Direct,
}

/// Whether the readout spin state is the one tuned into the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinState {
    Coupled,
    Uncoupled,
}

/// How the uncoupled spin state is represented in the optical response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UncoupledModel {
    /// g = 0: bare cavity.
    Decoupled,
    /// Full coupling at the other spin branch's (detuned) frequency.
    Detuned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoupledSystem {
    pub cavity: CavityMode,
    pub emitter: Emitter,
    /// Magnetic field (T).
    pub field: f64,
    /// Excited-state tuning Δω (rad/s).
    pub delta_tune: f64,
    pub leg: Leg,
    /// Spin branch addressed when the state is `Coupled`.
    pub branch: SpinBranch,
    pub uncoupled: UncoupledModel,
    g: f64,
}

impl CoupledSystem {
    pub fn new(cavity: CavityMode, emitter: Emitter, field: f64, delta_tune: f64) -> Result<Self> {
        cavity.validate()?;
        emitter.validate()?;
        ensure!(field.is_finite(), "field must be finite");
        ensure!(delta_tune.is_finite(), "delta_tune must be finite");
        let g = coupling_strength(emitter.dipole_debye, cavity.lambda0, cavity.n, cavity.v_rel)?;
        Ok(Self {
            cavity,
            emitter,
            field,
            delta_tune,
            leg: Leg::Cross,
            branch: SpinBranch::Up,
            uncoupled: UncoupledModel::Decoupled,
            g,
        })
    }

    pub fn se77_default() -> Self {
        Self::new(CavityMode::se77_default(), Emitter::se77_default(), 0.0, 0.0)
            .expect("valid preset")
    }

    /// Replaces the computed coupling, e.g. to pin 2g to a target value.
    pub fn with_coupling(mut self, g: f64) -> Result<Self> {
        ensure!(g >= 0.0 && g.is_finite(), "coupling must be non-negative, got {g}");
        self.g = g;
        Ok(self)
    }

    pub fn with_leg(mut self, leg: Leg, branch: SpinBranch) -> Self {
        self.leg = leg;
        self.branch = branch;
        self
    }

    pub fn with_uncoupled(mut self, model: UncoupledModel) -> Self {
        self.uncoupled = model;
        self
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Zeeman shift of the optical transition starting from ground spin
    /// `branch` on the configured leg: ħδ = μ_B B (g_Γ m′ − g_A m).
    pub fn zeeman_offset(&self, branch: SpinBranch) -> f64 {
        let m = 0.5 * branch.sign();
        let m_exc = match self.leg {
            Leg::Cross => -m,
            Leg::Direct => m,
        };
        MU_B * self.field / HBAR * (self.emitter.g_excited * m_exc - self.emitter.g_ground * m)
    }

    pub fn emitter_frequency(&self, branch: SpinBranch) -> f64 {
        self.emitter.omega_a + self.delta_tune + self.zeeman_offset(branch)
    }

    /// Δ = ω_emitter − ω_c for a spin branch.
    pub fn detuning(&self, branch: SpinBranch) -> f64 {
        self.emitter_frequency(branch) - self.cavity.omega_c()
    }

    /// Sets Δω so that `branch` is resonant with the cavity.
    pub fn tuned_to(mut self, branch: SpinBranch) -> Self {
        self.delta_tune = 0.0;
        self.delta_tune = -self.detuning(branch);
        self.branch = branch;
        self
    }

    /// Effective (g, ω_a) seen by the probe for a spin state.
    fn effective(&self, state: SpinState) -> (f64, f64) {
        match (state, self.uncoupled) {
            (SpinState::Coupled, _) => (self.g, self.emitter_frequency(self.branch)),
            (SpinState::Uncoupled, UncoupledModel::Decoupled) => (0.0, self.emitter.omega_a),
            (SpinState::Uncoupled, UncoupledModel::Detuned) => {
                (self.g, self.emitter_frequency(self.branch.flip()))
            }
        }
    }

    /// Complex amplitude transmission and reflection at probe frequency ω:
    /// D = i(ω_c − ω) + κ/2 + g²/(i(ω_a − ω) + γ/2), t = κ_ext/D, r = 1 − κ_ext/D.
    pub fn response(&self, state: SpinState, omega: f64) -> (Complex64, Complex64) {
        let (g, omega_a) = self.effective(state);
        let kappa = self.cavity.kappa();
        let kext = self.cavity.kappa_ext();
        let mut d = Complex64::new(kappa / 2.0, self.cavity.omega_c() - omega);
        if g != 0.0 {
            d += g * g / Complex64::new(self.emitter.gamma / 2.0, omega_a - omega);
        }
        let t = kext / d;
        (t, 1.0 - t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JcManifold {
    pub k: u32,
    /// Energies relative to the ground state, E∓(k) (rad/s).
    pub lower: f64,
    pub upper: f64,
}

impl JcManifold {
    pub fn splitting(&self) -> f64 {
        self.upper - self.lower
    }
}

/// E±(k) = kω_c + Δ/2 ± √(k g² + (Δ/2)²) for k = 1..=n_max, with Δ the
/// detuning of `branch`.
pub fn jc_ladder(system: &CoupledSystem, branch: SpinBranch, n_max: u32) -> Result<Vec<JcManifold>> {
    ensure!(n_max >= 1, "n_max must be at least 1");
    let wc = system.cavity.omega_c();
    let delta = system.detuning(branch);
    let g = system.g();
    Ok((1..=n_max)
        .map(|k| {
            let kf = k as f64;
            let centre = kf * wc + delta / 2.0;
            let root = (kf * g * g + delta * delta / 4.0).sqrt();
            JcManifold { k, lower: centre - root, upper: centre + root }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CavitySpectrum {
    /// Probe angular frequency (rad/s).
    pub omega: Vec<f64>,
    pub transmission: Vec<f64>,
    pub reflection: Vec<f64>,
}

impl CavitySpectrum {
    /// CSV with header `omega_Hz,T,R`; the first column is ω/2π.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "omega_Hz,T,R")?;
        for i in 0..self.omega.len() {
            writeln!(
                w,
                "{:e},{:e},{:e}",
                self.omega[i] / (2.0 * std::f64::consts::PI),
                self.transmission[i],
                self.reflection[i]
            )?;
        }
        Ok(())
    }
}

pub fn transmission_spectrum(
    system: &CoupledSystem,
    state: SpinState,
    omega: &[f64],
) -> Result<CavitySpectrum> {
    ensure!(!omega.is_empty(), "frequency grid is empty");
    ensure!(
        omega.iter().all(|w| w.is_finite()) && omega.windows(2).all(|w| w[1] > w[0]),
        "frequency grid must be finite and strictly increasing"
    );
    let (transmission, reflection) = omega
        .iter()
        .map(|&w| {
            let (t, r) = system.response(state, w);
            (t.norm_sqr(), r.norm_sqr())
        })
        .unzip();
    Ok(CavitySpectrum { omega: omega.to_vec(), transmission, reflection })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_cavity_peak() {
        let s = CoupledSystem::se77_default();
        let wc = s.cavity.omega_c();
        let (t, r) = s.response(SpinState::Uncoupled, wc);
        let expected = (2.0 * s.cavity.kappa_ext() / s.cavity.kappa()).powi(2);
        assert!((t.norm_sqr() - expected).abs() < 1e-12);
        assert!(r.norm_sqr() < 1e-12);
    }

    #[test]
    fn coupled_dip_on_resonance() {
        let s = CoupledSystem::se77_default();
        let wc = s.cavity.omega_c();
        let (tc, _) = s.response(SpinState::Coupled, wc);
        let (tu, _) = s.response(SpinState::Uncoupled, wc);
        assert!(tc.norm_sqr() < 0.05 * tu.norm_sqr());
    }

    #[test]
    fn zeeman_legs() {
        let s = CoupledSystem::se77_default();
        let s = CoupledSystem { field: 1.0, ..s };
        let unit = MU_B / HBAR;
        let up = s.zeeman_offset(SpinBranch::Up);
        let down = s.zeeman_offset(SpinBranch::Down);
        assert!((up + (G_SUM / 2.0) * unit).abs() < 1e-6 * unit);
        assert!((down - (G_SUM / 2.0) * unit).abs() < 1e-6 * unit);
        let t = s.tuned_to(SpinBranch::Down);
        assert!(t.detuning(SpinBranch::Down).abs() < 1e-3);
        assert!((t.detuning(SpinBranch::Up) + G_SUM * unit).abs() < 1e-6 * unit);
    }

    const G_SUM: f64 = super::super::G_GROUND + super::super::G_EXCITED;

    #[test]
    fn ladder_resonant() {
        let s = CoupledSystem::se77_default();
        let l = jc_ladder(&s, SpinBranch::Up, 4).unwrap();
        for m in &l {
            let exact = 2.0 * (m.k as f64).sqrt() * s.g();
            assert!((m.splitting() - exact).abs() < 1e-9 * exact);
        }
        assert!(jc_ladder(&s, SpinBranch::Up, 0).is_err());
    }
}
