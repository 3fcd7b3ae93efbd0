use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ensure;
use crate::Result;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeProfile {
    /// cos(πz/(2h)): the field antinode of a half-period 2h.
    Cosine,
    /// exp(−z²a²/2) with a = π/(2h), matching the cosine's curvature at z = 0.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StragglePlacement {
    /// Standard deviation of the implantation depth about the antinode (m).
    pub sigma_depth: f64,
    /// Mode half-width λ/2n (m).
    pub mode_halfwidth: f64,
    pub profile: ModeProfile,
}

impl StragglePlacement {
    /// 80 nm straggle in a 425 nm half-width mode.
    pub fn se77_default() -> Self {
        Self { sigma_depth: 80e-9, mode_halfwidth: 425e-9, profile: ModeProfile::Cosine }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.sigma_depth >= 0.0 && self.sigma_depth.is_finite(),
            "sigma_depth must be non-negative, got {}",
            self.sigma_depth
        );
        ensure!(
            self.mode_halfwidth > 0.0 && self.mode_halfwidth.is_finite(),
            "mode half-width must be positive"
        );
        Ok(())
    }

    /// Wavenumber a = π/(2h) of the cosine profile.
    pub fn a(&self) -> f64 {
        PI / (2.0 * self.mode_halfwidth)
    }

    /// Coupling relative to an emitter at the antinode.
    pub fn relative_coupling(&self, z: f64) -> f64 {
        let a = self.a();
        match self.profile {
            ModeProfile::Cosine => (a * z).cos(),
            ModeProfile::Gaussian => (-0.5 * a * a * z * z).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StraggleStats {
    pub samples: usize,
    pub mean: f64,
    pub std: f64,
    /// std/mean.
    pub relative_std: f64,
    /// Standard error of the mean.
    pub stderr: f64,
}

/// Monte-Carlo statistics of the relative coupling g/g_max for depths
/// z ~ N(0, σ). Chunk c of 4096 samples uses ChaCha stream c.
pub fn coupling_variation(
    placement: &StragglePlacement,
    n_samples: usize,
    seed: u64,
) -> Result<StraggleStats> {
    placement.validate()?;
    ensure!(n_samples >= 1000, "need at least 1000 samples, got {n_samples}");
    let n_chunks = n_samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n_samples - c * CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..len {
                let xi: f64 = StandardNormal.sample(&mut rng);
                let g = placement.relative_coupling(placement.sigma_depth * xi);
                s += g;
                s2 += g * g;
            }
            (s, s2)
        })
        .collect();
    let (sum, sum2) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sum2 - n * mean * mean) / (n - 1.0)).max(0.0);
    let std = var.sqrt();
    Ok(StraggleStats {
        samples: n_samples,
        mean,
        std,
        relative_std: std / mean,
        stderr: std / n.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_straggle() {
        let p = StragglePlacement { sigma_depth: 0.0, ..StragglePlacement::se77_default() };
        let s = coupling_variation(&p, 2000, 1).unwrap();
        assert_eq!(s.relative_std, 0.0);
        assert_eq!(s.mean, 1.0);
    }

    #[test]
    fn deterministic() {
        let p = StragglePlacement::se77_default();
        assert_eq!(coupling_variation(&p, 10_000, 5).unwrap(), coupling_variation(&p, 10_000, 5).unwrap());
        assert!(coupling_variation(&p, 999, 5).is_err());
    }

    #[test]
    fn profiles_agree_near_antinode() {
        let p = StragglePlacement::se77_default();
        let q = StragglePlacement { profile: ModeProfile::Gaussian, ..p };
        for z in [0.0, 10e-9, 40e-9] {
            assert!((p.relative_coupling(z) - q.relative_coupling(z)).abs() < 1e-3);
        }
    }
}
