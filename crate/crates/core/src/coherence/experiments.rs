use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use super::evolve::{ensemble, run_trajectory};
use super::noise::{NoiseModel, NoiseRealization};
use super::sequence::PulseSequence;
use super::QubitModel;
use crate::error::ensure;
use crate::fit::{fit, FitModel, FitOptions, FitReport};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMeta {
    pub experiment: String,
    pub seed: u64,
    pub trajectories: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalTrace {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub stderr: Vec<f64>,
    pub meta: TraceMeta,
}

impl SignalTrace {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// CSV with header `x,y,stderr`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,stderr")?;
        for i in 0..self.x.len() {
            writeln!(w, "{:e},{:e},{:e}", self.x[i], self.y[i], self.stderr[i])?;
        }
        Ok(())
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    ensure!(!grid.is_empty(), "{name} grid is empty");
    ensure!(
        grid.iter().all(|v| v.is_finite() && *v >= 0.0),
        "{name} grid must be finite and non-negative"
    );
    ensure!(
        grid.windows(2).all(|w| w[1] > w[0]),
        "{name} grid must be strictly increasing"
    );
    Ok(())
}

fn trace(
    experiment: &str,
    x: Vec<f64>,
    noise: &NoiseModel,
    (y, stderr, n): (Vec<f64>, Vec<f64>, usize),
) -> SignalTrace {
    SignalTrace {
        x,
        y,
        stderr,
        meta: TraceMeta {
            experiment: experiment.to_string(),
            seed: noise.seed,
            trajectories: n,
        },
    }
}

/// Resonant drive of amplitude `amplitude` for each duration; y = ⟨z⟩.
pub fn rabi_experiment(
    qubit: &QubitModel,
    amplitude: f64,
    durations: &[f64],
    noise: &NoiseModel,
    trajectories: usize,
) -> Result<SignalTrace> {
    qubit.validate()?;
    check_grid("duration", durations)?;
    ensure!(amplitude.is_finite() && amplitude > 0.0, "drive amplitude must be positive");
    let omega = qubit.omega_r * amplitude;
    let seqs = durations
        .iter()
        .map(|&t| PulseSequence::rabi(omega * t, t))
        .collect::<Result<Vec<_>>>()?;
    let stats = ensemble(noise, trajectories, |r| {
        seqs.iter().map(|s| run_trajectory(qubit, s, r).z).collect()
    })?;
    Ok(trace("rabi", durations.to_vec(), noise, stats))
}

/// π/2 – τ – π/2 with the drive offset by `detuning_hz`; y = ⟨z⟩.
pub fn ramsey_experiment(
    qubit: &QubitModel,
    detuning_hz: f64,
    taus: &[f64],
    noise: &NoiseModel,
    trajectories: usize,
) -> Result<SignalTrace> {
    qubit.validate()?;
    check_grid("tau", taus)?;
    ensure!(detuning_hz.is_finite(), "detuning must be finite");
    let seqs = taus
        .iter()
        .map(|&t| PulseSequence::ramsey(t, detuning_hz))
        .collect::<Result<Vec<_>>>()?;
    let stats = ensemble(noise, trajectories, |r| {
        seqs.iter().map(|s| run_trajectory(qubit, s, r).z).collect()
    })?;
    Ok(trace("ramsey", taus.to_vec(), noise, stats))
}

#[derive(Debug, Clone)]
pub struct EchoOptions {
    /// Subtract the trace taken with the leading π/2 about −x.
    pub phase_cycle: bool,
    /// Constant offset added to every raw detector reading.
    pub baseline_offset: f64,
    pub model: FitModel,
    pub fit_baseline: bool,
}

impl Default for EchoOptions {
    fn default() -> Self {
        Self {
            phase_cycle: true,
            baseline_offset: 0.0,
            model: FitModel::StretchedExponential,
            fit_baseline: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EchoResult {
    /// Abscissa is the total free-evolution time 2τ.
    pub trace: SignalTrace,
    pub fit: FitReport,
}

impl EchoResult {
    pub fn t2(&self) -> f64 {
        self.fit.param("T").unwrap_or(f64::NAN)
    }
}

pub fn hahn_echo_experiment(
    qubit: &QubitModel,
    taus: &[f64],
    noise: &NoiseModel,
    trajectories: usize,
    opts: &EchoOptions,
) -> Result<EchoResult> {
    qubit.validate()?;
    check_grid("tau", taus)?;
    ensure!(opts.baseline_offset.is_finite(), "baseline offset must be finite");
    let plus = taus
        .iter()
        .map(|&t| PulseSequence::echo(t, PI, 0.0))
        .collect::<Result<Vec<_>>>()?;
    let minus = taus
        .iter()
        .map(|&t| PulseSequence::echo(t, PI, PI))
        .collect::<Result<Vec<_>>>()?;
    let offset = opts.baseline_offset;
    let stats = ensemble(noise, trajectories, |r| {
        plus.iter()
            .zip(&minus)
            .map(|(p, m)| {
                let a = run_trajectory(qubit, p, r).z + offset;
                if opts.phase_cycle {
                    let b = run_trajectory(qubit, m, r).z + offset;
                    0.5 * (a - b)
                } else {
                    a
                }
            })
            .collect()
    })?;
    let x = taus.iter().map(|t| 2.0 * t).collect();
    let trace = trace("hahn", x, noise, stats);
    let fit = fit_decay(&trace, opts.model, opts.fit_baseline)?;
    Ok(EchoResult { trace, fit })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpmgRow {
    pub pulses: usize,
    pub t2: f64,
    pub t2_sigma: f64,
    pub stretch: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct CpmgResult {
    pub rows: Vec<CpmgRow>,
    /// Slope of ln T2 against ln N.
    pub exponent: f64,
    pub exponent_sigma: f64,
    /// One trace per N, abscissa 2Nτ.
    pub traces: Vec<SignalTrace>,
}

/// Runs CPMG for each pulse count over the half-spacing grid `taus`, fits a
/// stretched exponential to each trace and regresses ln T2 on ln N.
pub fn cpmg_experiment(
    qubit: &QubitModel,
    pulse_counts: &[usize],
    taus: &[f64],
    noise: &NoiseModel,
    trajectories: usize,
) -> Result<CpmgResult> {
    qubit.validate()?;
    check_grid("tau", taus)?;
    ensure!(!pulse_counts.is_empty(), "no pulse counts given");
    ensure!(
        pulse_counts.iter().all(|&n| n >= 1),
        "pulse counts must be at least 1"
    );
    ensure!(
        pulse_counts.windows(2).all(|w| w[1] > w[0]),
        "pulse counts must be strictly increasing"
    );
    let seqs = pulse_counts
        .iter()
        .flat_map(|&n| taus.iter().map(move |&t| PulseSequence::cpmg(n, t)))
        .collect::<Result<Vec<_>>>()?;
    let (mean, se, n_traj) = ensemble(noise, trajectories, |r| {
        seqs.iter().map(|s| run_trajectory(qubit, s, r).z).collect()
    })?;
    let m = taus.len();
    let mut rows = Vec::new();
    let mut traces = Vec::new();
    for (k, &n) in pulse_counts.iter().enumerate() {
        let x = taus.iter().map(|t| 2.0 * n as f64 * t).collect();
        let tr = trace(
            &format!("cpmg-{n}"),
            x,
            noise,
            (mean[k * m..(k + 1) * m].to_vec(), se[k * m..(k + 1) * m].to_vec(), n_traj),
        );
        let f = fit_decay(&tr, FitModel::StretchedExponential, false)?;
        rows.push(CpmgRow {
            pulses: n,
            t2: f.param("T").unwrap_or(f64::NAN),
            t2_sigma: f.sigma("T").unwrap_or(f64::NAN),
            stretch: f.param("stretch").unwrap_or(f64::NAN),
            converged: f.converged,
        });
        traces.push(tr);
    }
    let (exponent, exponent_sigma) = log_log_slope(&rows);
    Ok(CpmgResult { rows, exponent, exponent_sigma, traces })
}

fn log_log_slope(rows: &[CpmgRow]) -> (f64, f64) {
    if rows.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.pulses as f64).ln(), r.t2.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let sigma = if pts.len() > 2 {
        let ss: f64 = pts
            .iter()
            .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
            .sum();
        (ss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, sigma)
}

/// Difference of recovery traces with and without a leading inversion,
/// normalised to 1 at zero wait: y = exp(−τ/T1).
pub fn t1_experiment(qubit: &QubitModel, waits: &[f64]) -> Result<SignalTrace> {
    qubit.validate()?;
    check_grid("wait", waits)?;
    let silent = NoiseRealization::silent();
    let y = waits
        .iter()
        .map(|&t| {
            let a = run_trajectory(qubit, &PulseSequence::inversion_recovery(false, t)?, &silent).z;
            let b = run_trajectory(qubit, &PulseSequence::inversion_recovery(true, t)?, &silent).z;
            Ok(0.5 * (a - b))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SignalTrace {
        x: waits.to_vec(),
        stderr: vec![0.0; y.len()],
        y,
        meta: TraceMeta { experiment: "t1".into(), seed: 0, trajectories: 1 },
    })
}

const TIP_PHASES: usize = 16;

/// Echo amplitude against refocusing angle θ at half-spacing `tau`. The
/// ensemble is an equally weighted set of 16 static precession phases
/// covering the circle, which removes the unrefocused component exactly.
pub fn refocusing_angle_scan(qubit: &QubitModel, tau: f64, angles: &[f64]) -> Result<SignalTrace> {
    qubit.validate()?;
    ensure!(tau > 0.0 && tau.is_finite(), "tau must be positive, got {tau}");
    ensure!(!angles.is_empty(), "angle grid is empty");
    ensure!(
        angles.iter().all(|a| (0.0..=2.0 * PI).contains(a)),
        "refocusing angles must lie in [0, 2π]"
    );
    ensure!(
        angles.windows(2).all(|w| w[1] > w[0]),
        "angle grid must be strictly increasing"
    );
    let y = angles
        .iter()
        .map(|&theta| {
            let seq = PulseSequence::echo(tau, theta, 0.0)?;
            let sum: f64 = (0..TIP_PHASES)
                .map(|k| {
                    let phi = 2.0 * PI * k as f64 / TIP_PHASES as f64;
                    let r = NoiseRealization { static_detuning: phi / tau, tones: vec![] };
                    run_trajectory(qubit, &seq, &r).z
                })
                .sum();
            Ok(sum / TIP_PHASES as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SignalTrace {
        x: angles.to_vec(),
        stderr: vec![0.0; y.len()],
        y,
        meta: TraceMeta { experiment: "tip-angle".into(), seed: 0, trajectories: TIP_PHASES },
    })
}

/// Least-squares fit of a trace; see [`crate::fit::fit`].
pub fn fit_decay(trace: &SignalTrace, model: FitModel, baseline: bool) -> Result<FitReport> {
    let opts = FitOptions { baseline, ..FitOptions::default() };
    fit(&trace.x, &trace.y, model, &opts)
}
