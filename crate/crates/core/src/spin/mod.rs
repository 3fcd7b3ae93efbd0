//! Ground-state spin Hamiltonian of a donor electron coupled to its nucleus.
//!
//! The Hamiltonian is
//! `H/h = (g_e μ_B/h) B S_z − (g_n μ_N/h) B I_z + A S·I`
//! with the field along z. Everything in this module is expressed in Hz.

mod clock;
mod eigen;
mod hamiltonian;
mod sweep;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::{H, MU_B, MU_N};
use crate::error::ensure;
use crate::{Error, Result};

pub use clock::{find_clock_transition, find_clock_transition_with, ClockPoint, ClockSearch};
pub use eigen::{eigensystem, EigenSystem};
pub use hamiltonian::build_hamiltonian;
pub use sweep::{field_sweep, transition_frequencies, BreitRabiTable};

/// Electron and nuclear spin parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpinSystemParams", into = "SpinSystemParams")]
pub struct SpinSystem {
    g_e: f64,
    g_n: f64,
    two_i: u32,
    hyperfine: f64,
}

/// Serialized form of [`SpinSystem`], with the nuclear spin as a plain number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSystemParams {
    pub g_e: f64,
    pub g_n: f64,
    pub nuclear_spin: f64,
    pub hyperfine_hz: f64,
}

impl SpinSystem {
    /// `nuclear_spin` must be a non-negative multiple of 1/2.
    pub fn new(g_e: f64, g_n: f64, nuclear_spin: f64, hyperfine_hz: f64) -> Result<Self> {
        ensure!(g_e.is_finite(), "g_e must be finite, got {g_e}");
        ensure!(g_n.is_finite(), "g_n must be finite, got {g_n}");
        ensure!(
            hyperfine_hz.is_finite(),
            "hyperfine constant must be finite, got {hyperfine_hz}"
        );
        let two_i = 2.0 * nuclear_spin;
        ensure!(
            nuclear_spin >= 0.0 && (two_i - two_i.round()).abs() < 1e-9 && two_i < 64.0,
            "nuclear spin must be a non-negative half-integer, got {nuclear_spin}"
        );
        Ok(Self {
            g_e,
            g_n,
            two_i: two_i.round() as u32,
            hyperfine: hyperfine_hz,
        })
    }

    pub fn g_e(&self) -> f64 {
        self.g_e
    }

    pub fn g_n(&self) -> f64 {
        self.g_n
    }

    pub fn nuclear_spin(&self) -> f64 {
        self.two_i as f64 / 2.0
    }

    /// Twice the nuclear spin quantum number.
    pub fn two_i(&self) -> u32 {
        self.two_i
    }

    /// Hyperfine constant A in Hz.
    pub fn hyperfine(&self) -> f64 {
        self.hyperfine
    }

    pub fn with_hyperfine(mut self, hyperfine_hz: f64) -> Self {
        self.hyperfine = hyperfine_hz;
        self
    }

    pub fn with_g_n(mut self, g_n: f64) -> Self {
        self.g_n = g_n;
        self
    }

    /// Hilbert-space dimension 2(2I+1).
    pub fn dim(&self) -> usize {
        2 * (self.two_i as usize + 1)
    }

    /// Electron Zeeman coefficient g_e μ_B / h in Hz/T.
    pub fn electron_gamma(&self) -> f64 {
        self.g_e * MU_B / H
    }

    /// Nuclear Zeeman coefficient g_n μ_N / h in Hz/T.
    pub fn nuclear_gamma(&self) -> f64 {
        self.g_n * MU_N / H
    }

    /// Field at which electron Zeeman and hyperfine energies are comparable.
    pub(crate) fn field_scale(&self) -> f64 {
        let a = self.hyperfine.abs();
        let g = self.electron_gamma().abs() + self.nuclear_gamma().abs();
        if a > 0.0 && g > 0.0 {
            a / g
        } else {
            1.0
        }
    }

    /// Every zero-field label of this system, ordered by (F, m_F).
    pub fn labels(&self) -> Vec<LevelLabel> {
        let mut out = Vec::with_capacity(self.dim());
        let fs: Vec<u32> = if self.two_i == 0 {
            vec![1]
        } else {
            vec![self.two_i - 1, self.two_i + 1]
        };
        for two_f in fs {
            let mut two_mf = -(two_f as i32);
            while two_mf <= two_f as i32 {
                out.push(LevelLabel { two_f, two_mf });
                two_mf += 2;
            }
        }
        out
    }

    pub fn has_label(&self, label: LevelLabel) -> bool {
        self.labels().contains(&label)
    }

    /// Display name of a label: `S0`, `T-`, `T0`, `T+` for I = 1/2,
    /// `F<F>m<m_F>` otherwise.
    pub fn label_name(&self, label: LevelLabel) -> String {
        if self.two_i == 1 {
            match (label.two_f, label.two_mf) {
                (0, 0) => return "S0".into(),
                (2, -2) => return "T-".into(),
                (2, 0) => return "T0".into(),
                (2, 2) => return "T+".into(),
                _ => {}
            }
        }
        format!("F{}m{}", half(label.two_f as i32), half(label.two_mf))
    }

    pub fn parse_label(&self, name: &str) -> Result<LevelLabel> {
        let name = name.trim();
        let parsed = match (self.two_i, name) {
            (1, "S0") => Some(LevelLabel { two_f: 0, two_mf: 0 }),
            (1, "T-") => Some(LevelLabel { two_f: 2, two_mf: -2 }),
            (1, "T0") => Some(LevelLabel { two_f: 2, two_mf: 0 }),
            (1, "T+") => Some(LevelLabel { two_f: 2, two_mf: 2 }),
            _ => parse_generic_label(name),
        };
        match parsed {
            Some(l) if self.has_label(l) => Ok(l),
            _ => Err(Error::UnknownLabel(name.to_string())),
        }
    }

    /// Parses `A-B`, where `A` and `B` are label names.
    pub fn parse_pair(&self, text: &str) -> Result<TransitionPair> {
        let text = text.trim();
        for (i, ch) in text.char_indices() {
            if ch != '-' || i == 0 {
                continue;
            }
            if let (Ok(a), Ok(b)) = (self.parse_label(&text[..i]), self.parse_label(&text[i + 1..])) {
                ensure!(a != b, "transition `{text}` joins a level to itself");
                return Ok(TransitionPair { a, b });
            }
        }
        Err(Error::InvalidInput(format!(
            "cannot parse transition `{text}`; expected two level names joined by '-', e.g. {}",
            self.pair_name(self.default_pairs().first().copied().unwrap_or(TransitionPair {
                a: self.labels()[0],
                b: *self.labels().last().unwrap(),
            }))
        )))
    }

    pub fn pair_name(&self, pair: TransitionPair) -> String {
        format!("{}-{}", self.label_name(pair.a), self.label_name(pair.b))
    }

    /// Magnetic-dipole transitions between the two hyperfine manifolds
    /// (|Δm_F| ≤ 1). For I = 1/2 these are S0-T-, S0-T0, S0-T+.
    pub fn default_pairs(&self) -> Vec<TransitionPair> {
        let labels = self.labels();
        if self.two_i == 0 {
            return vec![TransitionPair { a: labels[0], b: labels[1] }];
        }
        let lower: Vec<_> = labels.iter().filter(|l| l.two_f < self.two_i + 1).collect();
        let upper: Vec<_> = labels.iter().filter(|l| l.two_f == self.two_i + 1).collect();
        let mut out = Vec::new();
        for a in &lower {
            for b in &upper {
                if (a.two_mf - b.two_mf).abs() <= 2 {
                    out.push(TransitionPair { a: **a, b: **b });
                }
            }
        }
        out.sort_by_key(|p| (p.a.two_mf, p.b.two_mf));
        out
    }
}

fn half(n: i32) -> String {
    if n % 2 == 0 {
        format!("{}", n / 2)
    } else {
        format!("{n}/2")
    }
}

fn parse_half(s: &str) -> Option<i32> {
    match s.split_once('/') {
        Some((num, "2")) => num.parse::<i32>().ok().filter(|n| n % 2 != 0),
        Some(_) => None,
        None => s.parse::<i32>().ok().map(|n| 2 * n),
    }
}

fn parse_generic_label(name: &str) -> Option<LevelLabel> {
    let rest = name.strip_prefix('F')?;
    let (f, m) = rest.split_once('m')?;
    let two_f = parse_half(f)?;
    let two_mf = parse_half(m)?;
    (two_f >= 0).then_some(LevelLabel {
        two_f: two_f as u32,
        two_mf,
    })
}

impl TryFrom<SpinSystemParams> for SpinSystem {
    type Error = Error;

    fn try_from(p: SpinSystemParams) -> Result<Self> {
        SpinSystem::new(p.g_e, p.g_n, p.nuclear_spin, p.hyperfine_hz)
    }
}

impl From<SpinSystem> for SpinSystemParams {
    fn from(s: SpinSystem) -> Self {
        SpinSystemParams {
            g_e: s.g_e,
            g_n: s.g_n,
            nuclear_spin: s.nuclear_spin(),
            hyperfine_hz: s.hyperfine,
        }
    }
}

/// Zero-field total-spin label |F, m_F⟩, stored as (2F, 2m_F).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelLabel {
    pub two_f: u32,
    pub two_mf: i32,
}

/// An unordered pair of levels whose splitting is a transition frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TransitionPair {
    pub a: LevelLabel,
    pub b: LevelLabel,
}

/// Uncoupled product state |m_S, m_I⟩, stored as (2m_S, 2m_I).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProductState {
    pub two_ms: i32,
    pub two_mi: i32,
}

impl fmt::Display for ProductState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = if self.two_ms > 0 { '↑' } else { '↓' };
        match self.two_mi {
            1 => write!(f, "|{e}⇑⟩"),
            -1 => write!(f, "|{e}⇓⟩"),
            m => write!(f, "|{e},mI={}⟩", half(m)),
        }
    }
}

/// Hyperfine constant of ⁷⁷Se⁺ in Hz.
pub const SE77_HYPERFINE: f64 = 1.66e9;
/// Ground-state electron g-factor of Se⁺ (1s:A).
pub const SE_G_ELECTRON: f64 = 2.0057;
/// Assumed ⁷⁷Se nuclear g-factor (μ ≈ +0.535 μ_N with I = 1/2).
pub const SE77_G_NUCLEAR: f64 = 1.07;

/// Built-in isotope presets: `77Se`, `33S`, `123Te`, `125Te`.
///
/// Only the hyperfine constants and nuclear spins are measured donor values.
/// Every preset uses the Se⁺ electron g-factor, and the nuclear g-factors are
/// free-atom moments divided by I.
pub fn presets() -> Vec<(&'static str, SpinSystem)> {
    let mk = |g_n, i, a| SpinSystem::new(SE_G_ELECTRON, g_n, i, a).expect("valid preset");
    vec![
        ("77Se", mk(SE77_G_NUCLEAR, 0.5, SE77_HYPERFINE)),
        ("33S", mk(0.4292, 1.5, 312e6)),
        ("123Te", mk(-1.4738, 0.5, 2.90e9)),
        ("125Te", mk(-1.7770, 0.5, 3.50e9)),
    ]
}

pub fn preset(name: &str) -> Option<SpinSystem> {
    presets()
        .into_iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name.trim().trim_end_matches('+')))
        .map(|(_, s)| s)
}

/// ⁷⁷Se⁺ with the default (assumed) nuclear g-factor.
pub fn se77() -> SpinSystem {
    preset("77Se").expect("77Se preset")
}
