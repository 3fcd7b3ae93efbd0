use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::conversions::{hz_to_wavenumber, mev_to_wavenumber, wavenumber_to_hz};
use super::pumping::PopulationState;
use super::{SE_LINEWIDTH_CM1, SE_TRANSITION_MEV};
use crate::error::ensure;
use crate::spin::SE77_HYPERFINE;
use crate::Result;

/// Ground-state manifold a line starts from. Spinless isotopes have no
/// hyperfine manifolds and absorb regardless of the ⁷⁷Se⁺ populations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundManifold {
    Singlet,
    Triplet,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Isotope {
    #[serde(rename = "76Se")]
    Se76,
    #[serde(rename = "77Se")]
    Se77,
    #[serde(rename = "78Se")]
    Se78,
}

impl fmt::Display for Isotope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Isotope::Se76 => "76Se",
            Isotope::Se77 => "77Se",
            Isotope::Se78 => "78Se",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticalLine {
    pub center_cm1: f64,
    pub fwhm_cm1: f64,
    /// Integrated area per unit population of the starting manifold.
    pub strength: f64,
    pub ground: GroundManifold,
    pub isotope: Isotope,
}

impl OpticalLine {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.center_cm1.is_finite(), "line center must be finite");
        ensure!(
            self.fwhm_cm1 > 0.0 && self.fwhm_cm1.is_finite(),
            "line FWHM must be positive, got {}",
            self.fwhm_cm1
        );
        ensure!(
            self.strength >= 0.0 && self.strength.is_finite(),
            "line strength must be non-negative, got {}",
            self.strength
        );
        Ok(())
    }

    pub fn center_hz(&self) -> f64 {
        wavenumber_to_hz(self.center_cm1)
    }

    pub fn fwhm_hz(&self) -> f64 {
        wavenumber_to_hz(self.fwhm_cm1)
    }

    /// Unit-area Lorentzian profile (per cm⁻¹).
    pub fn profile(&self, nu_cm1: f64) -> f64 {
        let hw = 0.5 * self.fwhm_cm1;
        hw / PI / ((nu_cm1 - self.center_cm1).powi(2) + hw * hw)
    }

    pub fn weight(&self, populations: &PopulationState) -> f64 {
        let p = match self.ground {
            GroundManifold::Singlet => populations.p_singlet(),
            GroundManifold::Triplet => populations.p_triplet(),
            GroundManifold::Any => 1.0,
        };
        self.strength * p
    }
}

/// Parameters of the built-in line table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineTableOptions {
    /// Transition wavenumber without hyperfine structure (cm⁻¹).
    pub center_cm1: f64,
    pub hyperfine_hz: f64,
    pub fwhm_cm1: f64,
    /// Per-state strengths; the manifold area is strength × pool population.
    pub singlet_strength: f64,
    pub triplet_strength: f64,
    pub side_peaks: bool,
    pub se76_offset_cm1: f64,
    pub se78_offset_cm1: f64,
    pub side_strength: f64,
}

impl Default for LineTableOptions {
    fn default() -> Self {
        Self {
            center_cm1: mev_to_wavenumber(SE_TRANSITION_MEV),
            hyperfine_hz: SE77_HYPERFINE,
            fwhm_cm1: SE_LINEWIDTH_CM1,
            singlet_strength: 1.0,
            triplet_strength: 1.0,
            side_peaks: true,
            se76_offset_cm1: -0.035,
            se78_offset_cm1: 0.035,
            side_strength: 0.05,
        }
    }
}

/// ⁷⁷Se⁺ singlet and triplet lines plus optional spinless-isotope side
/// peaks. The singlet sits 3A/4 below the hyperfine centroid and the triplet
/// A/4 above, so the singlet line is bluer by A.
pub fn default_lines(opts: &LineTableOptions) -> Result<Vec<OpticalLine>> {
    let a = hz_to_wavenumber(opts.hyperfine_hz);
    let line = |offset: f64, strength: f64, ground, isotope| OpticalLine {
        center_cm1: opts.center_cm1 + offset,
        fwhm_cm1: opts.fwhm_cm1,
        strength,
        ground,
        isotope,
    };
    let mut lines = vec![
        line(0.75 * a, opts.singlet_strength, GroundManifold::Singlet, Isotope::Se77),
        line(-0.25 * a, opts.triplet_strength, GroundManifold::Triplet, Isotope::Se77),
    ];
    if opts.side_peaks {
        lines.push(line(opts.se76_offset_cm1, opts.side_strength, GroundManifold::Any, Isotope::Se76));
        lines.push(line(opts.se78_offset_cm1, opts.side_strength, GroundManifold::Any, Isotope::Se78));
    }
    for l in &lines {
        l.validate()?;
    }
    Ok(lines)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTrace {
    pub wavenumber_cm1: Vec<f64>,
    pub absorbance: Vec<f64>,
}

impl SpectrumTrace {
    /// Trapezoidal area between two wavenumbers (inclusive grid points).
    pub fn area_between(&self, lo: f64, hi: f64) -> f64 {
        let x = &self.wavenumber_cm1;
        let y = &self.absorbance;
        (1..x.len())
            .filter(|&i| x[i - 1] >= lo && x[i] <= hi)
            .map(|i| 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]))
            .sum()
    }

    pub fn area(&self) -> f64 {
        self.area_between(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// CSV with header `wavenumber_cm1,absorbance`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "wavenumber_cm1,absorbance")?;
        for (x, y) in self.wavenumber_cm1.iter().zip(&self.absorbance) {
            writeln!(w, "{x:e},{y:e}")?;
        }
        Ok(())
    }
}

/// Sum of Lorentzians, each scaled by strength × starting-manifold population.
pub fn absorption_spectrum(
    lines: &[OpticalLine],
    populations: &PopulationState,
    grid_cm1: &[f64],
) -> Result<SpectrumTrace> {
    ensure!(!grid_cm1.is_empty(), "wavenumber grid is empty");
    ensure!(
        grid_cm1.iter().all(|v| v.is_finite()) && grid_cm1.windows(2).all(|w| w[1] > w[0]),
        "wavenumber grid must be finite and strictly increasing"
    );
    for l in lines {
        l.validate()?;
    }
    let weights: Vec<f64> = lines.iter().map(|l| l.weight(populations)).collect();
    let absorbance = grid_cm1
        .iter()
        .map(|&nu| lines.iter().zip(&weights).map(|(l, w)| w * l.profile(nu)).sum())
        .collect();
    Ok(SpectrumTrace { wavenumber_cm1: grid_cm1.to_vec(), absorbance })
}
