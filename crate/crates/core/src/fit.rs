//! Levenberg-Marquardt least-squares fitting of the decay and line-shape
//! models used across the experiments.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::ensure;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// a·exp(−x/T)
    Exponential,
    /// a·exp(−(x/T)^n)
    StretchedExponential,
    /// a·exp(−(x/T)²)
    Gaussian,
    /// a·exp(−(x/T)²)·cos(2πfx + φ)
    GaussianSinusoid,
    /// a·cos(2πfx + φ)
    Sinusoid,
    /// a·sin²(x/2)
    HalfAngleSinSquared,
    /// area·(w/2π) / ((x − x0)² + (w/2)²)
    Lorentzian,
}

impl FitModel {
    fn core_names(self) -> &'static [&'static str] {
        match self {
            FitModel::Exponential => &["amplitude", "T"],
            FitModel::StretchedExponential => &["amplitude", "T", "stretch"],
            FitModel::Gaussian => &["amplitude", "T"],
            FitModel::GaussianSinusoid => &["amplitude", "T", "frequency", "phase"],
            FitModel::Sinusoid => &["amplitude", "frequency", "phase"],
            FitModel::HalfAngleSinSquared => &["amplitude"],
            FitModel::Lorentzian => &["area", "center", "fwhm"],
        }
    }

    pub fn param_names(self, baseline: bool) -> Vec<&'static str> {
        let mut names = self.core_names().to_vec();
        if baseline {
            names.push("baseline");
        }
        names
    }

    /// Evaluates the model; a baseline, if present, is the last parameter.
    pub fn eval(self, x: f64, p: &[f64]) -> f64 {
        let n = self.core_names().len();
        let b = if p.len() > n { p[n] } else { 0.0 };
        let core = match self {
            FitModel::Exponential => p[0] * (-x / p[1]).exp(),
            FitModel::StretchedExponential => p[0] * (-(x / p[1]).abs().powf(p[2])).exp(),
            FitModel::Gaussian => p[0] * (-(x / p[1]).powi(2)).exp(),
            FitModel::GaussianSinusoid => {
                p[0] * (-(x / p[1]).powi(2)).exp() * (2.0 * PI * p[2] * x + p[3]).cos()
            }
            FitModel::Sinusoid => p[0] * (2.0 * PI * p[1] * x + p[2]).cos(),
            FitModel::HalfAngleSinSquared => p[0] * (0.5 * x).sin().powi(2),
            FitModel::Lorentzian => {
                let hw = 0.5 * p[2];
                p[0] * hw / PI / ((x - p[1]).powi(2) + hw * hw)
            }
        };
        core + b
    }

    fn admissible(self, p: &[f64]) -> bool {
        if p.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            FitModel::Exponential | FitModel::Gaussian | FitModel::GaussianSinusoid => p[1] > 0.0,
            FitModel::StretchedExponential => p[1] > 0.0 && p[2] > 0.05 && p[2] < 20.0,
            FitModel::Lorentzian => p[2] > 0.0,
            FitModel::Sinusoid | FitModel::HalfAngleSinSquared => true,
        }
    }

    fn initial_guess(self, x: &[f64], y: &[f64], baseline: bool) -> Vec<f64> {
        let m = x.len();
        let span = x[m - 1] - x[0];
        let b0 = if baseline { y[m - 1] } else { 0.0 };
        let mut p = match self {
            FitModel::Exponential | FitModel::Gaussian | FitModel::StretchedExponential => {
                let a = y[0] - b0;
                let target = b0 + a / std::f64::consts::E;
                let t = crossing(x, y, target).map(|xc| xc - x[0].min(0.0)).unwrap_or(0.5 * span);
                let t = if t > 0.0 { t } else { 0.5 * span };
                match self {
                    FitModel::StretchedExponential => vec![a, t, 1.0],
                    _ => vec![a, t],
                }
            }
            FitModel::GaussianSinusoid | FitModel::Sinusoid => {
                let (f, phase, amp) = dominant_tone(x, y);
                if self == FitModel::Sinusoid {
                    vec![amp, f, phase]
                } else {
                    vec![amp, envelope_time(x, y, f, amp).unwrap_or(0.5 * span), f, phase]
                }
            }
            FitModel::HalfAngleSinSquared => {
                vec![y.iter().copied().fold(f64::NEG_INFINITY, f64::max) - b0]
            }
            FitModel::Lorentzian => {
                let (k, peak) = y
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
                let half = b0 + 0.5 * (peak - b0);
                let left = (0..k).rev().find(|&i| y[i] < half).map(|i| x[i]).unwrap_or(x[0]);
                let right = (k..m).find(|&i| y[i] < half).map(|i| x[i]).unwrap_or(x[m - 1]);
                let w = (right - left).max(span / m as f64);
                vec![(peak - b0) * PI * w / 2.0, x[k], w]
            }
        };
        if baseline {
            p.push(b0);
        }
        p
    }
}

/// First x at which y falls below `target`, linearly interpolated.
fn crossing(x: &[f64], y: &[f64], target: f64) -> Option<f64> {
    let sign = (y[0] - target).signum();
    (1..x.len()).find_map(|i| {
        ((y[i] - target).signum() != sign).then(|| {
            let t = (target - y[i - 1]) / (y[i] - y[i - 1]);
            x[i - 1] + t * (x[i] - x[i - 1])
        })
    })
}

/// Periodogram peak on a non-uniform grid: (frequency, phase, amplitude).
fn dominant_tone(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let m = x.len();
    let mean = y.iter().sum::<f64>() / m as f64;
    let min_dx = x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let f_max = 0.5 / min_dx;
    let n_f = 40 * m;
    let mut best = (0.0, 0.0, 0.0);
    for k in 1..=n_f {
        let f = f_max * k as f64 / n_f as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (xi, yi) in x.iter().zip(y) {
            let arg = 2.0 * PI * f * xi;
            re += (yi - mean) * arg.cos();
            im += (yi - mean) * arg.sin();
        }
        let power = re * re + im * im;
        if power > best.0 {
            best = (power, f, im.atan2(re));
        }
    }
    let amp = y.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    (best.1, best.2, amp)
}

/// Time at which the running peak of |y| drops below amp/e.
fn envelope_time(x: &[f64], y: &[f64], f: f64, amp: f64) -> Option<f64> {
    let period = if f > 0.0 { 1.0 / f } else { return None };
    let target = amp / std::f64::consts::E;
    (0..x.len()).find_map(|i| {
        let peak = (0..x.len())
            .filter(|&j| (x[j] - x[i]).abs() <= 0.5 * period)
            .map(|j| y[j].abs())
            .fold(0.0, f64::max);
        (peak < target && x[i] > 0.0).then_some(x[i])
    })
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Adds a constant offset as the last parameter.
    pub baseline: bool,
    pub max_iterations: usize,
    /// Starting point; estimated from the data when `None`.
    pub initial: Option<Vec<f64>>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            baseline: false,
            max_iterations: 1000,
            initial: None,
        }
    }
}

impl FitOptions {
    pub fn with_baseline(mut self) -> Self {
        self.baseline = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub model: FitModel,
    pub names: Vec<String>,
    pub params: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    /// √Σ r².
    pub residual_norm: f64,
    pub iterations: usize,
    /// False when the iteration budget ran out; `params` is then the best iterate.
    pub converged: bool,
}

impl FitReport {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|k| self.params[k])
    }

    pub fn sigma(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|k| self.sigmas[k])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.model.eval(x, &self.params)
    }
}

fn residuals(model: FitModel, x: &[f64], y: &[f64], p: &[f64]) -> DVector<f64> {
    DVector::from_iterator(x.len(), x.iter().zip(y).map(|(xi, yi)| model.eval(*xi, p) - yi))
}

fn jacobian(model: FitModel, x: &[f64], p: &[f64], scale: &[f64]) -> DMatrix<f64> {
    let mut jac = DMatrix::zeros(x.len(), p.len());
    let mut q = p.to_vec();
    for j in 0..p.len() {
        let h = 1e-7 * p[j].abs().max(scale[j]);
        q[j] = p[j] + h;
        let up: Vec<f64> = x.iter().map(|xi| model.eval(*xi, &q)).collect();
        q[j] = p[j] - h;
        let down: Vec<f64> = x.iter().map(|xi| model.eval(*xi, &q)).collect();
        q[j] = p[j];
        for i in 0..x.len() {
            jac[(i, j)] = (up[i] - down[i]) / (2.0 * h);
        }
    }
    jac
}

/// Fits `model` to (x, y). Deterministic for identical input.
pub fn fit(x: &[f64], y: &[f64], model: FitModel, opts: &FitOptions) -> Result<FitReport> {
    let names: Vec<String> = model.param_names(opts.baseline).iter().map(|s| s.to_string()).collect();
    let n_par = names.len();
    ensure!(x.len() == y.len(), "x and y lengths differ ({} vs {})", x.len(), y.len());
    ensure!(
        x.len() >= n_par + 4,
        "{} points cannot constrain {n_par} parameters (need at least {})",
        x.len(),
        n_par + 4
    );
    ensure!(
        x.iter().chain(y).all(|v| v.is_finite()),
        "fit data must be finite"
    );
    ensure!(x.windows(2).all(|w| w[1] > w[0]), "fit abscissa must be strictly increasing");

    let mut p = match &opts.initial {
        Some(p0) => {
            ensure!(p0.len() == n_par, "initial guess needs {n_par} values");
            p0.clone()
        }
        None => model.initial_guess(x, y, opts.baseline),
    };
    ensure!(model.admissible(&p), "initial parameters {p:?} are outside the model domain");
    let span = (x[x.len() - 1] - x[0]).abs().max(f64::MIN_POSITIVE);
    let scale: Vec<f64> = p
        .iter()
        .zip(model.param_names(opts.baseline))
        .map(|(v, name)| match name {
            "phase" => 1.0,
            "center" | "T" | "fwhm" => v.abs().max(1e-6 * span),
            _ => v.abs().max(1e-12),
        })
        .collect();

    let mut r = residuals(model, x, y, &p);
    let mut cost = 0.5 * r.norm_squared();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        if cost == 0.0 {
            converged = true;
            break;
        }
        let jac = jacobian(model, x, &p, &scale);
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &r;
        let max_diag = (0..n_par).map(|k| jtj[(k, k)]).fold(0.0, f64::max);
        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = jtj.clone();
            for k in 0..n_par {
                damped[(k, k)] += lambda * jtj[(k, k)].max(1e-12 * max_diag).max(f64::MIN_POSITIVE);
            }
            let step = match damped.cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
            if model.admissible(&trial) {
                let r_trial = residuals(model, x, y, &trial);
                let c_trial = 0.5 * r_trial.norm_squared();
                if c_trial < cost {
                    let small_step = step
                        .iter()
                        .zip(&p)
                        .zip(&scale)
                        .all(|((d, v), s)| d.abs() <= 1e-12 * (v.abs() + s));
                    let small_gain = (cost - c_trial) <= 1e-15 * cost;
                    p = trial;
                    r = r_trial;
                    cost = c_trial;
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    if small_step || small_gain {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            // no descent direction left at machine precision
            converged = true;
        }
        if converged {
            break;
        }
    }

    let m = x.len();
    let jac = jacobian(model, x, &p, &scale);
    let s2 = if m > n_par { 2.0 * cost / (m - n_par) as f64 } else { f64::NAN };
    let cov = (jac.transpose() * &jac).try_inverse().map(|inv| inv * s2);
    let covariance: Vec<Vec<f64>> = match &cov {
        Some(c) => (0..n_par).map(|i| (0..n_par).map(|j| c[(i, j)]).collect()).collect(),
        None => vec![vec![f64::INFINITY; n_par]; n_par],
    };
    let sigmas = (0..n_par).map(|k| covariance[k][k].max(0.0).sqrt()).collect();
    Ok(FitReport {
        model,
        names,
        params: p,
        sigmas,
        covariance,
        residual_norm: (2.0 * cost).sqrt(),
        iterations,
        converged,
    })
}
