use rayon::prelude::*;

use super::noise::{NoiseModel, NoiseRealization};
use super::sequence::{Bloch, PulseSequence, SequenceItem};
use super::QubitModel;
use crate::error::ensure;
use crate::Result;

const STEPS_PER_RADIAN: f64 = 50.0;
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Trajectory-averaged Bloch vector with its Monte-Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleBloch {
    pub mean: Bloch,
    pub stderr: Bloch,
    pub trajectories: usize,
}

pub fn evolve(
    qubit: &QubitModel,
    sequence: &PulseSequence,
    noise: &NoiseModel,
    n_trajectories: usize,
) -> Result<EnsembleBloch> {
    qubit.validate()?;
    let (mean, stderr, n) = ensemble(noise, n_trajectories, |r| {
        let b = run_trajectory(qubit, sequence, r);
        vec![b.x, b.y, b.z]
    })?;
    Ok(EnsembleBloch {
        mean: Bloch::new(mean[0], mean[1], mean[2]),
        stderr: Bloch::new(stderr[0], stderr[1], stderr[2]),
        trajectories: n,
    })
}

/// Runs `f` once per trajectory and returns the per-component mean, standard
/// error and the number of trajectories actually simulated. A silent noise
/// model yields identical trajectories, so only one is run.
pub(crate) fn ensemble<F>(
    noise: &NoiseModel,
    n_trajectories: usize,
    f: F,
) -> Result<(Vec<f64>, Vec<f64>, usize)>
where
    F: Fn(&NoiseRealization) -> Vec<f64> + Sync,
{
    ensure!(n_trajectories >= 1, "need at least one trajectory");
    noise.validate()?;
    if noise.is_silent() {
        let v = f(&NoiseRealization::silent());
        let zeros = vec![0.0; v.len()];
        return Ok((v, zeros, 1));
    }
    let amplitudes = noise.tone_amplitudes();
    let samples: Vec<Vec<f64>> = (0..n_trajectories as u64)
        .into_par_iter()
        .map(|i| f(&noise.realize_with(&amplitudes, i)))
        .collect();
    let m = samples[0].len();
    let n = samples.len() as f64;
    let mut mean = vec![0.0; m];
    for s in &samples {
        for (acc, v) in mean.iter_mut().zip(s) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= n);
    let mut var = vec![0.0; m];
    for s in &samples {
        for ((acc, v), mu) in var.iter_mut().zip(s).zip(&mean) {
            *acc += (v - mu).powi(2);
        }
    }
    let stderr = if samples.len() > 1 {
        var.iter().map(|v| (v / (n - 1.0) / n).sqrt()).collect()
    } else {
        vec![0.0; m]
    };
    Ok((mean, stderr, samples.len()))
}

struct Clock {
    t: f64,
    t_free: f64,
    /// Tone antiderivative at `t`.
    f: f64,
}

impl Clock {
    /// Noise phase accumulated over the next `dt`; advances the clock.
    fn advance(&mut self, noise: &NoiseRealization, dt: f64) -> f64 {
        let t = self.t + dt;
        let f = if noise.tones.is_empty() { 0.0 } else { noise.tone_integral(t) };
        let phase = noise.static_detuning * dt + f - self.f;
        self.t = t;
        self.f = f;
        phase
    }
}

fn damp(b: Bloch, q: &QubitModel, clock: &mut Clock, dt: f64) -> Bloch {
    let ta = clock.t_free;
    let tb = ta + dt;
    clock.t_free = tb;
    let transverse = if q.t2.is_finite() {
        (-((tb / q.t2).powf(q.stretch) - (ta / q.t2).powf(q.stretch))).exp()
    } else {
        1.0
    };
    let longitudinal = if q.t1.is_finite() { (-dt / q.t1).exp() } else { 1.0 };
    Bloch::new(b.x * transverse, b.y * transverse, b.z * longitudinal)
}

/// Single trajectory from |0⟩ (Bloch z = +1) under a fixed noise history.
pub fn run_trajectory(q: &QubitModel, seq: &PulseSequence, noise: &NoiseRealization) -> Bloch {
    let frame = TWO_PI * seq.frame_detuning_hz();
    let mut b = Bloch::UP;
    let mut clock = Clock { t: 0.0, t_free: 0.0, f: noise.tone_integral(0.0) };
    for item in seq.items() {
        match *item {
            SequenceItem::Pulse(p) if p.duration == 0.0 => {
                b = b.rotate(p.axis(), p.angle);
            }
            SequenceItem::Pulse(p) => {
                let omega = p.angle / p.duration;
                let steps = (STEPS_PER_RADIAN * p.angle.abs()).ceil().max(1.0) as usize;
                let dt = p.duration / steps as f64;
                let (s, c) = p.phase.sin_cos();
                for _ in 0..steps {
                    let delta = frame + clock.advance(noise, dt) / dt;
                    let w = (omega * omega + delta * delta).sqrt();
                    if w > 0.0 {
                        b = b.rotate([omega * c / w, omega * s / w, delta / w], w * dt);
                    }
                    b = damp(b, q, &mut clock, dt);
                }
            }
            SequenceItem::Delay(tau) => {
                let phi = frame * tau + clock.advance(noise, tau);
                b = damp(b.precess(phi), q, &mut clock, tau);
            }
            SequenceItem::Acquire => break,
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::coherence::{NoiseModel, Pulse};

    #[test]
    fn pi_pulse_inverts() {
        let q = QubitModel::ideal(1.0);
        let s = PulseSequence::new(vec![SequenceItem::Pulse(Pulse::ideal(0.0, PI))]).unwrap();
        let e = evolve(&q, &s, &NoiseModel::quiet(), 10).unwrap();
        assert!((e.mean.z + 1.0).abs() < 1e-12);
        assert_eq!(e.trajectories, 1);
    }

    #[test]
    fn finite_pulse_matches_ideal_on_resonance() {
        let q = QubitModel::ideal(1.0);
        for theta in [0.3, PI / 2.0, PI, 4.0] {
            let s = PulseSequence::rabi(theta, 1e-3).unwrap();
            let b = run_trajectory(&q, &s, &NoiseRealization::silent());
            assert!((b.z - theta.cos()).abs() < 1e-12);
            assert!((b.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_pulse_off_resonance() {
        // generalised Rabi: z(t) = 1 − 2 Ω²/W² sin²(W t/2)
        let q = QubitModel::ideal(1.0);
        let (omega, delta, t) = (2.0 * PI * 100.0, 2.0 * PI * 60.0, 7.3e-3);
        let s = PulseSequence::rabi(omega * t, t).unwrap().with_frame_detuning(60.0);
        let b = run_trajectory(&q, &s, &NoiseRealization::silent());
        let w = (omega * omega + delta * delta).sqrt();
        let z = 1.0 - 2.0 * (omega / w).powi(2) * (w * t / 2.0).sin().powi(2);
        assert!((b.z - z).abs() < 1e-10, "{} vs {z}", b.z);
    }

    #[test]
    fn echo_refocuses_static_noise() {
        let q = QubitModel::ideal(1.0);
        let s = PulseSequence::echo(0.37, PI, 0.0).unwrap();
        let r = NoiseRealization { static_detuning: 123.4, tones: vec![] };
        let b = run_trajectory(&q, &s, &r);
        assert!((b.z - 1.0).abs() < 1e-12);
    }

    #[test]
    fn damping_uses_cumulative_time() {
        let q = QubitModel { t2: 2.0, stretch: 2.0, ..QubitModel::ideal(1.0) };
        let s = PulseSequence::echo(1.0, PI, 0.0).unwrap();
        let b = run_trajectory(&q, &s, &NoiseRealization::silent());
        assert!((b.z - (-1.0f64).exp()).abs() < 1e-12);
    }
}
