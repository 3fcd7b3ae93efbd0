use serde::{Deserialize, Serialize};

use crate::error::ensure;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutParams {
    /// Probe transmission with the spin in the coupled state.
    pub t_on: f64,
    /// Probe transmission with the spin in the uncoupled state.
    pub t_off: f64,
    /// Mean number of incident photons per shot.
    pub photons: f64,
    /// Spin relaxation time (s).
    pub t1_spin: f64,
    /// Integration window (s).
    pub window: f64,
}

impl ReadoutParams {
    pub fn new(t_on: f64, t_off: f64, photons: f64) -> Self {
        Self { t_on, t_off, photons, t1_spin: f64::INFINITY, window: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReadoutReport {
    #[serde(rename = "T_on")]
    pub t_on: f64,
    #[serde(rename = "T_off")]
    pub t_off: f64,
    #[serde(rename = "M")]
    pub photons: f64,
    /// Counts ≥ threshold are assigned to the brighter state.
    pub threshold: u64,
    pub fidelity: f64,
    /// P(count ≥ threshold | dim state).
    pub error_dim: f64,
    /// P(count < threshold | bright state).
    pub error_bright: f64,
}

/// Poisson pmf values for n = 0..=n_max, computed in log space.
fn poisson_pmf(lambda: f64, n_max: u64) -> Vec<f64> {
    if lambda == 0.0 {
        let mut p = vec![0.0; n_max as usize + 1];
        p[0] = 1.0;
        return p;
    }
    let ln_l = lambda.ln();
    let mut ln_fact = 0.0;
    (0..=n_max)
        .map(|n| {
            if n > 0 {
                ln_fact += (n as f64).ln();
            }
            (n as f64 * ln_l - lambda - ln_fact).exp()
        })
        .collect()
}

/// Single-shot spin readout by photon counting. Detected counts are
/// Poisson(M·T) for each spin state; the integer threshold minimising the sum
/// of the two error probabilities is chosen, and a first-order spin-flip
/// penalty window/(2·T1) is subtracted.
pub fn readout_fidelity(p: &ReadoutParams) -> Result<ReadoutReport> {
    ensure!(
        (0.0..=1.0).contains(&p.t_on) && (0.0..=1.0).contains(&p.t_off),
        "transmissions must lie in [0, 1], got T_on={}, T_off={}",
        p.t_on,
        p.t_off
    );
    ensure!(p.photons > 0.0 && p.photons.is_finite(), "photon number must be positive");
    ensure!(p.t1_spin > 0.0, "spin T1 must be positive");
    ensure!(p.window >= 0.0 && p.window.is_finite(), "window must be non-negative");
    let report = |threshold, fidelity, error_dim, error_bright| ReadoutReport {
        t_on: p.t_on,
        t_off: p.t_off,
        photons: p.photons,
        threshold,
        fidelity,
        error_dim,
        error_bright,
    };
    if p.t_on == p.t_off {
        return Ok(report(0, 0.5, 1.0, 0.0));
    }
    let lo = p.photons * p.t_on.min(p.t_off);
    let hi = p.photons * p.t_on.max(p.t_off);
    let n_max = (hi + 12.0 * hi.sqrt() + 20.0).ceil() as u64;
    let p_lo = poisson_pmf(lo, n_max);
    let p_hi = poisson_pmf(hi, n_max);
    // threshold th: dim error = P_lo(n ≥ th), bright error = P_hi(n < th)
    // tail sums accumulated from the top to avoid 1 − cdf cancellation
    let mut tail_lo = vec![0.0; p_lo.len() + 1];
    for n in (0..p_lo.len()).rev() {
        tail_lo[n] = tail_lo[n + 1] + p_lo[n];
    }
    let mut best = (0u64, 1.0f64, 0.0f64);
    let mut cdf_hi = 0.0;
    for th in 0..=n_max + 1 {
        if th > 0 {
            cdf_hi += p_hi[th as usize - 1];
        }
        let e_dim = tail_lo[th as usize].min(1.0);
        let e_bright = cdf_hi.min(1.0);
        if e_dim + e_bright < best.1 + best.2 {
            best = (th, e_dim, e_bright);
        }
    }
    let (threshold, e_dim, e_bright) = best;
    let penalty = if p.t1_spin.is_finite() { p.window / (2.0 * p.t1_spin) } else { 0.0 };
    let fidelity = (1.0 - 0.5 * (e_dim + e_bright) - penalty).clamp(0.0, 1.0);
    Ok(report(threshold, fidelity, e_dim, e_bright))
}
