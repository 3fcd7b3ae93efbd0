use serde::{Deserialize, Serialize};

use super::lines::GroundManifold;
use crate::error::ensure;
use crate::Result;

/// Aggregate singlet and triplet pool occupations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationState {
    p_singlet: f64,
    p_triplet: f64,
}

impl PopulationState {
    pub fn new(p_singlet: f64, p_triplet: f64) -> Result<Self> {
        ensure!(
            p_singlet >= 0.0 && p_triplet >= 0.0,
            "populations must be non-negative, got ({p_singlet}, {p_triplet})"
        );
        ensure!(
            (p_singlet + p_triplet - 1.0).abs() <= 1e-12,
            "populations must sum to 1, got {}",
            p_singlet + p_triplet
        );
        Ok(Self { p_singlet, p_triplet })
    }

    /// High-temperature occupation: one singlet state, three triplet states.
    pub fn thermal() -> Self {
        Self { p_singlet: 0.25, p_triplet: 0.75 }
    }

    pub fn singlet() -> Self {
        Self { p_singlet: 1.0, p_triplet: 0.0 }
    }

    pub fn triplet() -> Self {
        Self { p_singlet: 0.0, p_triplet: 1.0 }
    }

    pub fn p_singlet(&self) -> f64 {
        self.p_singlet
    }

    pub fn p_triplet(&self) -> f64 {
        self.p_triplet
    }

    pub fn of(&self, manifold: GroundManifold) -> f64 {
        match manifold {
            GroundManifold::Singlet => self.p_singlet,
            GroundManifold::Triplet => self.p_triplet,
            GroundManifold::Any => 1.0,
        }
    }
}

/// Linear optical pump on one manifold. An excited electron returns to the
/// pumped manifold with probability `branch_back`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpModel {
    pub power: f64,
    pub rate_coeff: f64,
    pub branch_back: f64,
}

impl PumpModel {
    pub fn new(power: f64, rate_coeff: f64, branch_back: f64) -> Result<Self> {
        let m = Self { power, rate_coeff, branch_back };
        m.validate()?;
        Ok(m)
    }

    /// Chooses `rate_coeff` so that the pumped pool decays with
    /// `time_constant` at `power`.
    pub fn calibrated(time_constant: f64, power: f64, branch_back: f64) -> Result<Self> {
        ensure!(time_constant > 0.0 && time_constant.is_finite(), "time constant must be positive");
        ensure!(power > 0.0 && power.is_finite(), "calibration power must be positive");
        ensure!((0.0..1.0).contains(&branch_back), "branch_back must lie in [0, 1)");
        Self::new(power, 1.0 / (time_constant * power * (1.0 - branch_back)), branch_back)
    }

    /// 50 ms at 4 μW, no return branch.
    pub fn se77_default() -> Self {
        Self::calibrated(50e-3, 4e-6, 0.0).expect("valid preset")
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.power >= 0.0 && self.power.is_finite(),
            "optical power must be finite and non-negative, got {}",
            self.power
        );
        ensure!(
            self.rate_coeff > 0.0 && self.rate_coeff.is_finite(),
            "rate_coeff must be positive, got {}",
            self.rate_coeff
        );
        ensure!(
            (0.0..1.0).contains(&self.branch_back),
            "branch_back must lie in [0, 1), got {}",
            self.branch_back
        );
        Ok(())
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }

    /// R = rate_coeff · P.
    pub fn pump_rate(&self) -> f64 {
        self.rate_coeff * self.power
    }

    /// Net depletion rate R(1 − b).
    pub fn depletion_rate(&self) -> f64 {
        self.pump_rate() * (1.0 - self.branch_back)
    }

    pub fn time_constant(&self) -> f64 {
        1.0 / self.depletion_rate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarizationTrace {
    pub pumped: GroundManifold,
    pub t: Vec<f64>,
    pub states: Vec<PopulationState>,
}

impl PolarizationTrace {
    /// Fraction of donors in the manifold that is not pumped.
    pub fn polarization(&self, i: usize) -> f64 {
        1.0 - self.states[i].of(self.pumped)
    }
}

/// Closed-form two-pool solution p_pumped(t) = p_pumped(0)·exp(−R(1−b)t).
pub fn hyperpolarize(
    pump: &PumpModel,
    pumped: GroundManifold,
    t: &[f64],
    initial: PopulationState,
) -> Result<PolarizationTrace> {
    pump.validate()?;
    ensure!(pumped != GroundManifold::Any, "pumped manifold must be singlet or triplet");
    ensure!(!t.is_empty(), "time grid is empty");
    ensure!(
        t.iter().all(|v| v.is_finite() && *v >= 0.0) && t.windows(2).all(|w| w[1] > w[0]),
        "time grid must be non-negative and strictly increasing"
    );
    let k = pump.depletion_rate();
    let p0 = initial.of(pumped);
    let states = t
        .iter()
        .map(|&ti| {
            let p = p0 * (-k * ti).exp();
            match pumped {
                GroundManifold::Singlet => PopulationState { p_singlet: p, p_triplet: 1.0 - p },
                _ => PopulationState { p_singlet: 1.0 - p, p_triplet: p },
            }
        })
        .collect();
    Ok(PolarizationTrace { pumped, t: t.to_vec(), states })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration() {
        let m = PumpModel::se77_default();
        assert!((m.time_constant() - 50e-3).abs() < 1e-15);
        assert!((m.with_power(8e-6).time_constant() - 25e-3).abs() < 1e-15);
        let b = PumpModel::calibrated(50e-3, 4e-6, 0.3).unwrap();
        assert!((b.time_constant() - 50e-3).abs() < 1e-15);
    }

    #[test]
    fn pumping_the_triplet() {
        let m = PumpModel::se77_default();
        let tr = hyperpolarize(&m, GroundManifold::Triplet, &[0.0, 0.05, 0.5], PopulationState::thermal())
            .unwrap();
        assert!((tr.states[1].p_triplet() / 0.75 - (-1.0f64).exp()).abs() < 1e-12);
        assert!(tr.polarization(2) > 0.99);
        for s in &tr.states {
            assert!((s.p_singlet() + s.p_triplet() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn validation() {
        assert!(PopulationState::new(0.5, 0.6).is_err());
        assert!(PopulationState::new(-0.1, 1.1).is_err());
        assert!(PumpModel::new(1.0, 1.0, 1.0).is_err());
        assert!(PumpModel::new(1.0, 0.0, 0.0).is_err());
        let m = PumpModel::se77_default();
        assert!(hyperpolarize(&m, GroundManifold::Any, &[0.0], PopulationState::thermal()).is_err());
        assert!(hyperpolarize(&m, GroundManifold::Singlet, &[1.0, 0.0], PopulationState::thermal()).is_err());
    }
}
