//! Subcommand execution: resolve parameters, call the library, collect the
//! CSV table and the JSON results.

use std::f64::consts::PI;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sesim::cavity::{
    coupling_variation, readout_fidelity, strong_coupling_check, transmission_spectrum, CavityMode, CoupledSystem,
    Emitter, Leg, ModeProfile, ReadoutParams, SpinBranch, SpinState, StragglePlacement, UncoupledModel,
};
use sesim::coherence::{
    cpmg_experiment, filter, fit_decay, hahn_echo_experiment, rabi_experiment, ramsey_experiment,
    refocusing_angle_scan, t1_experiment, EchoOptions, NoiseModel, QubitModel, SignalTrace,
};
use sesim::constants::C;
use sesim::fit::{FitModel, FitReport};
use sesim::optics::{
    absorption_spectrum, default_lines, hyperpolarize, GroundManifold, LineTableOptions, PopulationState, PumpModel,
};
use sesim::spin::{field_sweep, find_clock_transition_with, preset, presets, ClockSearch, SpinSystem, TransitionPair};

use crate::args::*;
use crate::config::{resolve, ConfigFile};
use crate::error::{CliError, CliResult};
use crate::values::{Grid, IntList, Quantity};

/// Everything a subcommand produced.
#[derive(Debug)]
pub struct RunOutput {
    /// Config section name, e.g. `pulse-hahn`.
    pub section: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
    pub results: Value,
    pub csv: Option<Vec<u8>>,
    /// Set when a fit or solver did not converge.
    pub failure: Option<String>,
}

impl RunOutput {
    fn new<P: Serialize>(section: &'static str, params: &P, results: Value) -> Self {
        Self {
            section,
            config: serde_json::to_value(params).expect("params serialize"),
            seed: None,
            results,
            csv: None,
            failure: None,
        }
    }

    fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn csv(mut self, bytes: Vec<u8>) -> Self {
        self.csv = Some(bytes);
        self
    }

    /// Records a fit that could not be carried out at all.
    fn fit_error(mut self, e: Option<String>) -> Self {
        if e.is_some() {
            self.failure = e;
        }
        self
    }

    fn check_fits<'a>(mut self, fits: impl IntoIterator<Item = (&'a str, bool)>) -> Self {
        let failed: Vec<&str> = fits.into_iter().filter(|(_, ok)| !ok).map(|(n, _)| n).collect();
        if !failed.is_empty() {
            self.failure = Some(format!("fit did not converge: {}", failed.join(", ")));
        }
        self
    }
}

/// Resolved option value; defaults guarantee presence unless a config set it to an invalid null.
fn req<T: Clone>(v: &Option<T>, key: &str) -> CliResult<T> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing value for \"{key}\"")))
}

fn q(v: f64) -> Option<Quantity> {
    Some(Quantity(v))
}

fn grid(spec: &str) -> Option<Grid> {
    Some(spec.parse().expect("built-in grid"))
}

fn write_with(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

pub fn run(command: &Command, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    match command {
        Command::BreitRabi(a) => breit_rabi(a, file),
        Command::ClockFind(a) => clock_find(a, file),
        Command::Pulse(PulseCommand::Rabi(a)) => rabi(a, file),
        Command::Pulse(PulseCommand::Ramsey(a)) => ramsey(a, file),
        Command::Pulse(PulseCommand::Hahn(a)) => hahn(a, file),
        Command::Pulse(PulseCommand::Cpmg(a)) => cpmg(a, file),
        Command::Pulse(PulseCommand::T1(a)) => t1(a, file),
        Command::Pulse(PulseCommand::TipAngle(a)) => tip_angle(a, file),
        Command::Polarize(a) => polarize(a, file),
        Command::Spectrum(SpectrumCommand::Absorption(a)) => absorption(a, file),
        Command::Spectrum(SpectrumCommand::Cavity(a)) => cavity(a, file),
        Command::Readout(a) => readout(a, file),
        Command::Straggle(a) => straggle(a, file),
        Command::Plot(_) => unreachable!("plot is handled before config resolution"),
    }
}

// ---- spin ----

fn system_defaults() -> SystemArgs {
    SystemArgs { isotope: Some("77Se".into()), ..SystemArgs::default() }
}

fn spin_system(a: &SystemArgs, file: Option<&ConfigFile>) -> CliResult<SpinSystem> {
    let name = req(&a.isotope, "isotope")?;
    let custom = file.and_then(|f| f.presets().get(&name).copied());
    let base = custom.or_else(|| preset(&name)).ok_or_else(|| {
        let mut names: Vec<String> = presets().into_iter().map(|(n, _)| n.to_string()).collect();
        if let Some(f) = file {
            names.extend(f.presets().keys().cloned());
        }
        CliError::Config(format!("unknown isotope \"{name}\"; available presets: {}", names.join(", ")))
    })?;
    Ok(SpinSystem::new(
        a.g_e.unwrap_or(base.g_e()),
        a.g_n.unwrap_or(base.g_n()),
        a.nuclear_spin.unwrap_or(base.nuclear_spin()),
        a.hyperfine.map_or(base.hyperfine(), |v| v.0),
    )?)
}

fn parse_pairs(sys: &SpinSystem, text: Option<&str>, fallback: Vec<TransitionPair>) -> CliResult<Vec<TransitionPair>> {
    match text.map(str::trim) {
        None | Some("") => Ok(fallback),
        Some(t) => t.split(',').map(|p| sys.parse_pair(p).map_err(CliError::from)).collect(),
    }
}

fn breit_rabi(cli: &BreitRabiArgs, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let defaults = BreitRabiArgs {
        system: system_defaults(),
        bmin: q(0.0),
        bmax: q(200e-6),
        points: Some(201),
        pairs: None,
    };
    let p = resolve("breit-rabi", &defaults, cli, file)?;
    let sys = spin_system(&p.system, file)?;
    let pairs = parse_pairs(&sys, p.pairs.as_deref(), sys.default_pairs())?;
    let table = field_sweep(&sys, req(&p.bmin, "bmin")?.0, req(&p.bmax, "bmax")?.0, req(&p.points, "points")?, &pairs)?;
    let results = json!({
        "system": sys,
        "pairs": table.pair_names(),
        "rows": table.fields.len(),
    });
    Ok(RunOutput::new("breit-rabi", &p, results).csv(write_with(|w| table.write_csv(w))))
}

fn clock_find(cli: &ClockFindArgs, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let defaults = ClockFindArgs {
        system: system_defaults(),
        bmin: q(0.0),
        bmax: q(3.0),
        pairs: None,
        grid_points: Some(ClockSearch::default().grid_points),
    };
    let p = resolve("clock-find", &defaults, cli, file)?;
    let sys = spin_system(&p.system, file)?;
    let fallback = if sys.two_i() == 1 {
        parse_pairs(&sys, Some("S0-T0,T0-T+,S0-T-"), vec![])?
    } else {
        sys.default_pairs()
    };
    let pairs = parse_pairs(&sys, p.pairs.as_deref(), fallback)?;
    let search = ClockSearch { grid_points: req(&p.grid_points, "grid-points")? };
    let (lo, hi) = (req(&p.bmin, "bmin")?.0, req(&p.bmax, "bmax")?.0);
    let mut csv = String::from("pair,B_T,f_Hz,df_dB_Hz_per_T,d2f_dB2_Hz_per_T2\n");
    let mut found = Vec::new();
    for pair in pairs {
        let name = sys.pair_name(pair);
        for pt in find_clock_transition_with(&sys, pair, lo, hi, search)? {
            csv.push_str(&format!("{name},{:e},{:e},{:e},{:e}\n", pt.field, pt.frequency, pt.d1, pt.d2));
            found.push(json!({
                "pair": name,
                "field_T": pt.field,
                "frequency_Hz": pt.frequency,
                "df_dB_Hz_per_T": pt.d1,
                "d2f_dB2_Hz_per_T2": pt.d2,
                "d1_step_T": pt.d1_step,
                "d2_step_T": pt.d2_step,
            }));
        }
    }
    let results = json!({ "system": sys, "clock_points": found });
    Ok(RunOutput::new("clock-find", &p, results).csv(csv.into_bytes()))
}

// ---- pulses ----

fn qubit_defaults(t1: f64, t2: f64) -> QubitArgs {
    let d = QubitModel::se77_clock();
    QubitArgs { t1: q(t1), t2: q(t2), stretch: Some(d.stretch), omega_r: q(d.omega_r) }
}

fn noise_defaults(sigma_qs: f64, noise_t2: f64) -> NoiseArgs {
    let d = NoiseModel::default();
    NoiseArgs {
        sigma_qs: q(sigma_qs),
        alpha: Some(1.0),
        s0: None,
        noise_t2: q(noise_t2),
        omega_lo: q(d.omega_lo),
        omega_hi: q(d.omega_hi),
        tones: Some(d.n_tones),
        seed: Some(0),
        trajectories: Some(sesim::coherence::DEFAULT_TRAJECTORIES),
    }
}

/// Quasi-static width giving a 1 ms Gaussian free-induction decay.
const SIGMA_QS_DEFAULT: f64 = std::f64::consts::SQRT_2 / 1e-3;

fn qubit(a: &QubitArgs) -> CliResult<QubitModel> {
    Ok(QubitModel::new(
        QubitModel::se77_clock().f0,
        req(&a.omega_r, "omega-r")?.0,
        req(&a.t1, "t1")?.0,
        req(&a.t2, "t2")?.0,
        req(&a.stretch, "stretch")?,
    )?)
}

/// Builds the noise model; `s0` wins over `noise-t2`, and an infinite
/// `noise-t2` turns the power-law part off.
fn noise(a: &NoiseArgs) -> CliResult<(NoiseModel, usize)> {
    let mut m = NoiseModel {
        sigma_qs: req(&a.sigma_qs, "sigma-qs")?.0,
        alpha: req(&a.alpha, "alpha")?,
        s0: 0.0,
        omega_lo: req(&a.omega_lo, "omega-lo")?.0,
        omega_hi: req(&a.omega_hi, "omega-hi")?.0,
        n_tones: req(&a.tones, "tones")?,
        seed: req(&a.seed, "seed")?,
    };
    m.validate()?;
    let noise_t2 = req(&a.noise_t2, "noise-t2")?.0;
    m.s0 = match a.s0 {
        Some(s0) => s0.0,
        None if noise_t2.is_finite() => filter::calibrate_power_law(&m, noise_t2)?,
        None => 0.0,
    };
    m.validate()?;
    let n = req(&a.trajectories, "trajectories")?;
    if n == 0 {
        return Err(CliError::Config("trajectories must be at least 1".into()));
    }
    Ok((m, n))
}

fn noise_json(m: &NoiseModel, n: usize) -> Value {
    json!({ "model": m, "trajectories": n })
}

fn to_map(names: &[String], values: &[f64]) -> Value {
    Value::Object(names.iter().cloned().zip(values.iter().map(|v| json!(v))).collect::<Map<_, _>>())
}

fn fit_json(f: &FitReport, seed: u64) -> Value {
    json!({
        "model": f.model,
        "params": to_map(&f.names, &f.params),
        "sigmas": to_map(&f.names, &f.sigmas),
        "residual": f.residual_norm,
        "iterations": f.iterations,
        "converged": f.converged,
        "seed": seed,
    })
}

/// Fits a finished trace; a failure is reported without discarding the trace.
fn try_fit(tr: &SignalTrace, model: FitModel, baseline: bool) -> (Option<FitReport>, Option<String>) {
    match fit_decay(tr, model, baseline) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(format!("{} fit failed: {e}", tr.meta.experiment))),
    }
}

fn fit_value(f: &Option<FitReport>, seed: u64) -> Value {
    f.as_ref().map_or(Value::Null, |f| fit_json(f, seed))
}

fn converged(f: &Option<FitReport>) -> bool {
    f.as_ref().is_none_or(|f| f.converged)
}

fn param(f: &Option<FitReport>, name: &str) -> Option<f64> {
    f.as_ref().and_then(|f| f.param(name))
}

fn sigma(f: &Option<FitReport>, name: &str) -> Option<f64> {
    f.as_ref().and_then(|f| f.sigma(name))
}

fn trace_csv(t: &SignalTrace) -> Vec<u8> {
    write_with(|w| t.write_csv(w))
}

fn rabi(cli: &RabiArgs, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let defaults = RabiArgs {
        qubit: qubit_defaults(360.0, 2.14),
        noise: noise_defaults(SIGMA_QS_DEFAULT, f64::INFINITY),
        amplitude: Some(1.0),
        durations: grid("0:5e-3:101"),
    };
    let p = resolve("pulse-rabi", &defaults, cli, file)?;
    let qb = qubit(&p.qubit)?;
    let (nm, n) = noise(&p.noise)?;
    let tr = rabi_experiment(&qb, req(&p.amplitude, "amplitude")?, req(&p.durations, "durations")?.values(), &nm, n)?;
    let (fit, err) = try_fit(&tr, FitModel::Sinusoid, false);
    let results = json!({
        "noise": noise_json(&nm, n),
        "rabi_frequency_Hz": param(&fit, "frequency"),
        "fit": fit_value(&fit, nm.seed),
    });
    Ok(RunOutput::new("pulse-rabi", &p, results)
        .seed(nm.seed)
        .csv(trace_csv(&tr))
        .check_fits([("sinusoid", converged(&fit))])
        .fit_error(err))
}

fn ramsey(cli: &RamseyArgs, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let defaults = RamseyArgs {
        qubit: qubit_defaults(360.0, 2.14),
        noise: noise_defaults(SIGMA_QS_DEFAULT, f64::INFINITY),
        detuning: q(0.0),
        taus: grid("0:3e-3:31"),
    };
    let p = resolve("pulse-ramsey", &defaults, cli, file)?;
    let qb = qubit(&p.qubit)?;
    let (nm, n) = noise(&p.noise)?;
    let detuning = req(&p.detuning, "detuning")?.0;
    let tr = ramsey_experiment(&qb, detuning, req(&p.taus, "taus")?.values(), &nm, n)?;
    let model = if detuning == 0.0 { FitModel::Gaussian } else { FitModel::GaussianSinusoid };
    let (fit, err) = try_fit(&tr, model, false);
    let results = json!({
        "noise": noise_json(&nm, n),
        "T2_star_s": param(&fit, "T"),
        "T2_star_sigma_s": sigma(&fit, "T"),
        "fit": fit_value(&fit, nm.seed),
    });
    Ok(RunOutput::new("pulse-ramsey", &p, results)
        .seed(nm.seed)
        .csv(trace_csv(&tr))
        .check_fits([("free-induction decay", converged(&fit))])
        .fit_error(err))
}

fn hahn(cli: &HahnArgs, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let d = EchoOptions::default();
    let defaults = HahnArgs {
        qubit: qubit_defaults(360.0, 2.14),
        noise: noise_defaults(SIGMA_QS_DEFAULT, f64::INFINITY),
        taus: grid("0.05:4:40"),
        phase_cycle: Some(d.phase_cycle),
        offset: Some(d.baseline_offset),
        model: Some(d.model),
        fit_baseline: Some(d.fit_baseline),
    };
    let p = resolve("pulse-hahn", &defaults, cli, file)?;
    let qb = qubit(&p.qubit)?;
    let (nm, n) = noise(&p.noise)?;
    let opts = EchoOptions {
        phase_cycle: req(&p.phase_cycle, "phase-cycle")?,
        baseline_offset: req(&p.offset, "offset")?,
        model: req(&p.model, "model")?,
        fit_baseline: req(&p.fit_baseline, "fit-baseline")?,
    };
    let res = hahn_echo_experiment(&qb, req(&p.taus, "taus")?.values(), &nm, n, &opts)?;
    let results = json!({
        "noise": noise_json(&nm, n),
        "T2_s": res.t2(),
        "T2_sigma_s": res.fit.sigma("T"),
        "fit": fit_json(&res.fit, nm.seed),
    });
    Ok(RunOutput::new("pulse-hahn", &p, results)
        .seed(nm.seed)
        .csv(trace_csv(&res.trace))
        .check_fits([("echo decay", res.fit.converged)]))
}

fn cpmg(cli: &CpmgArgs, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let defaults = CpmgArgs {
        qubit: qubit_defaults(f64::INFINITY, f64::INFINITY),
        noise: noise_defaults(SIGMA_QS_DEFAULT, 2.14),
        n: Some(IntList(vec![1, 2, 4, 8])),
        taus: grid("0.02:3:36:log"),
    };
    let p = resolve("pulse-cpmg", &defaults, cli, file)?;
    let qb = qubit(&p.qubit)?;
    let (nm, n) = noise(&p.noise)?;
    let counts = req(&p.n, "n")?.0;
    let res = cpmg_experiment(&qb, &counts, req(&p.taus, "taus")?.values(), &nm, n)?;
    let mut csv = String::from("N,T2_s,T2_sigma_s,stretch\n");
    for r in &res.rows {
        csv.push_str(&format!("{},{:e},{:e},{:e}\n", r.pulses, r.t2, r.t2_sigma, r.stretch));
    }
    let results = json!({
        "noise": noise_json(&nm, n),
        "rows": res.rows,
        "exponent": res.exponent,
        "exponent_sigma": res.exponent_sigma,
        "asymptotic_exponent": nm.alpha / (nm.alpha + 1.0),
        "seed": nm.seed,
    });
    let names: Vec<String> = res.rows.iter().map(|r| format!("N={}", r.pulses)).collect();
    let fits: Vec<(&str, bool)> = names.iter().map(String::as_str).zip(res.rows.iter().map(|r| r.converged)).collect();
    Ok(RunOutput::new("pulse-cpmg", &p, results)
        .seed(nm.seed)
        .csv(csv.into_bytes())
        .check_fits(fits))
}

fn t1(cli: &T1Args, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let defaults = T1Args { qubit: qubit_defaults(360.0, 2.14), waits: grid("0:1800:61") };
    let p = resolve("pulse-t1", &defaults, cli, file)?;
    let qb = qubit(&p.qubit)?;
    let tr = t1_experiment(&qb, req(&p.waits, "waits")?.values())?;
    let (fit, err) = try_fit(&tr, FitModel::Exponential, false);
    let results = json!({
        "T1_s": param(&fit, "T"),
        "T1_sigma_s": sigma(&fit, "T"),
        "fit": fit_value(&fit, 0),
    });
    Ok(RunOutput::new("pulse-t1", &p, results)
        .csv(trace_csv(&tr))
        .check_fits([("recovery", converged(&fit))])
        .fit_error(err))
}

fn tip_angle(cli: &TipAngleArgs, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let defaults = TipAngleArgs {
        qubit: qubit_defaults(360.0, 2.14),
        tau: q(1e-3),
        angles: grid(&format!("0:{}:65", 2.0 * PI)),
    };
    let p = resolve("pulse-tip-angle", &defaults, cli, file)?;
    let qb = qubit(&p.qubit)?;
    let tr = refocusing_angle_scan(&qb, req(&p.tau, "tau")?.0, req(&p.angles, "angles")?.values())?;
    let (fit, err) = try_fit(&tr, FitModel::HalfAngleSinSquared, false);
    let results = json!({
        "echo_amplitude": param(&fit, "amplitude"),
        "fit": fit_value(&fit, 0),
    });
    Ok(RunOutput::new("pulse-tip-angle", &p, results)
        .csv(trace_csv(&tr))
        .check_fits([("sin^2(theta/2)", converged(&fit))])
        .fit_error(err))
}

// ---- optics ----

fn polarize(cli: &PolarizeArgs, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let defaults = PolarizeArgs {
        power: q(4e-6),
        tau_cal: q(50e-3),
        power_cal: q(4e-6),
        branch_back: Some(0.0),
        pumped: Some(GroundManifold::Triplet),
        p_singlet: Some(PopulationState::thermal().p_singlet()),
        times: grid("0:0.5:101"),
    };
    let p = resolve("polarize", &defaults, cli, file)?;
    let pump = PumpModel::calibrated(
        req(&p.tau_cal, "tau-cal")?.0,
        req(&p.power_cal, "power-cal")?.0,
        req(&p.branch_back, "branch-back")?,
    )?
    .with_power(req(&p.power, "power")?.0);
    let ps = req(&p.p_singlet, "p-singlet")?;
    let initial = PopulationState::new(ps, 1.0 - ps)?;
    let tr = hyperpolarize(&pump, req(&p.pumped, "pumped")?, req(&p.times, "times")?.values(), initial)?;
    let mut csv = String::from("t_s,p_singlet,p_triplet,polarization\n");
    for (i, (t, s)) in tr.t.iter().zip(&tr.states).enumerate() {
        csv.push_str(&format!("{t:e},{:e},{:e},{:e}\n", s.p_singlet(), s.p_triplet(), tr.polarization(i)));
    }
    let last = tr.t.len() - 1;
    let results = json!({
        "pump": pump,
        "time_constant_s": pump.time_constant(),
        "pump_rate_per_s": pump.pump_rate(),
        "final_time_s": tr.t[last],
        "final_polarization": tr.polarization(last),
    });
    Ok(RunOutput::new("polarize", &p, results).csv(csv.into_bytes()))
}

fn absorption(cli: &AbsorptionArgs, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let d = LineTableOptions::default();
    let defaults = AbsorptionArgs {
        center: Some(d.center_cm1),
        hyperfine: q(d.hyperfine_hz),
        fwhm: Some(d.fwhm_cm1),
        singlet_strength: Some(d.singlet_strength),
        triplet_strength: Some(d.triplet_strength),
        side_peaks: Some(d.side_peaks),
        se76_offset: Some(d.se76_offset_cm1),
        se78_offset: Some(d.se78_offset_cm1),
        side_strength: Some(d.side_strength),
        p_singlet: Some(PopulationState::thermal().p_singlet()),
        span: Some(0.1),
        points: Some(2001),
    };
    let p = resolve("spectrum-absorption", &defaults, cli, file)?;
    let opts = LineTableOptions {
        center_cm1: req(&p.center, "center")?,
        hyperfine_hz: req(&p.hyperfine, "hyperfine")?.0,
        fwhm_cm1: req(&p.fwhm, "fwhm")?,
        singlet_strength: req(&p.singlet_strength, "singlet-strength")?,
        triplet_strength: req(&p.triplet_strength, "triplet-strength")?,
        side_peaks: req(&p.side_peaks, "side-peaks")?,
        se76_offset_cm1: req(&p.se76_offset, "se76-offset")?,
        se78_offset_cm1: req(&p.se78_offset, "se78-offset")?,
        side_strength: req(&p.side_strength, "side-strength")?,
    };
    let lines = default_lines(&opts)?;
    let ps = req(&p.p_singlet, "p-singlet")?;
    let pops = PopulationState::new(ps, 1.0 - ps)?;
    let span = req(&p.span, "span")?;
    let points = req(&p.points, "points")?;
    if !(span > 0.0 && span.is_finite()) || points < 2 {
        return Err(CliError::Config("span must be positive and points at least 2".into()));
    }
    let grid: Vec<f64> = (0..points)
        .map(|k| opts.center_cm1 - span + 2.0 * span * k as f64 / (points - 1) as f64)
        .collect();
    let tr = absorption_spectrum(&lines, &pops, &grid)?;
    let results = json!({ "lines": lines, "area": tr.area() });
    Ok(RunOutput::new("spectrum-absorption", &p, results).csv(write_with(|w| tr.write_csv(w))))
}

// ---- cavity ----

fn cavity(cli: &CavityArgs, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let (dc, de) = (CavityMode::se77_default(), Emitter::se77_default());
    let defaults = CavityArgs {
        lambda0: q(dc.lambda0),
        q: q(dc.q),
        kext_fraction: Some(dc.kappa_ext_fraction),
        v_rel: Some(dc.v_rel),
        n: Some(dc.n),
        dipole: Some(de.dipole_debye),
        gamma_hz: q(de.gamma / (2.0 * PI)),
        g_ground: Some(de.g_ground),
        g_excited: Some(de.g_excited),
        field: q(0.0),
        delta_tune_hz: q(0.0),
        tune_to: None,
        leg: Some(Leg::Cross),
        branch: Some(SpinBranch::Up),
        uncoupled: Some(UncoupledModel::Decoupled),
        state: Some(SpinState::Coupled),
        span: q(3e9),
        points: Some(2001),
        coupling_hz: None,
    };
    let p = resolve("spectrum-cavity", &defaults, cli, file)?;
    let lambda0 = req(&p.lambda0, "lambda0")?.0;
    let mode = CavityMode::new(
        lambda0,
        req(&p.q, "q")?.0,
        req(&p.kext_fraction, "kext-fraction")?,
        req(&p.v_rel, "v-rel")?,
        req(&p.n, "n")?,
    )?;
    let emitter = Emitter {
        dipole_debye: req(&p.dipole, "dipole")?,
        omega_a: 2.0 * PI * C / lambda0,
        gamma: 2.0 * PI * req(&p.gamma_hz, "gamma-hz")?.0,
        g_ground: req(&p.g_ground, "g-ground")?,
        g_excited: req(&p.g_excited, "g-excited")?,
    };
    let mut sys = CoupledSystem::new(
        mode,
        emitter,
        req(&p.field, "field")?.0,
        2.0 * PI * req(&p.delta_tune_hz, "delta-tune-hz")?.0,
    )?
    .with_leg(req(&p.leg, "leg")?, req(&p.branch, "branch")?)
    .with_uncoupled(req(&p.uncoupled, "uncoupled")?);
    if let Some(g) = p.coupling_hz {
        sys = sys.with_coupling(2.0 * PI * g.0)?;
    }
    if let Some(b) = p.tune_to {
        sys = sys.tuned_to(b);
    }
    let span = 2.0 * PI * req(&p.span, "span")?.0;
    let points = req(&p.points, "points")?;
    if !(span > 0.0 && span.is_finite()) || points < 2 {
        return Err(CliError::Config("span must be positive and points at least 2".into()));
    }
    let wc = mode.omega_c();
    let omega: Vec<f64> = (0..points)
        .map(|k| wc - span + 2.0 * span * k as f64 / (points - 1) as f64)
        .collect();
    let state = req(&p.state, "state")?;
    let spec = transmission_spectrum(&sys, state, &omega)?;
    let strong = strong_coupling_check(sys.g(), mode.kappa(), emitter.gamma)?;
    let hz = |w: f64| w / (2.0 * PI);
    let results = json!({
        "g_Hz": hz(sys.g()),
        "vacuum_rabi_splitting_Hz": hz(2.0 * sys.g()),
        "kappa_Hz": hz(mode.kappa()),
        "gamma_Hz": hz(emitter.gamma),
        "cavity_frequency_Hz": hz(wc),
        "detuning_coupled_Hz": hz(sys.detuning(sys.branch)),
        "detuning_uncoupled_Hz": hz(sys.detuning(sys.branch.flip())),
        "strong_coupling": strong,
    });
    Ok(RunOutput::new("spectrum-cavity", &p, results).csv(write_with(|w| spec.write_csv(w))))
}

fn readout(cli: &ReadoutArgs, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let defaults = ReadoutArgs {
        ton: Some(0.01),
        toff: Some(0.9),
        photons: Some(100.0),
        t1_spin: q(f64::INFINITY),
        window: q(0.0),
    };
    let p = resolve("readout", &defaults, cli, file)?;
    let params = ReadoutParams {
        t_on: req(&p.ton, "ton")?,
        t_off: req(&p.toff, "toff")?,
        photons: req(&p.photons, "photons")?,
        t1_spin: req(&p.t1_spin, "t1-spin")?.0,
        window: req(&p.window, "window")?.0,
    };
    let report = readout_fidelity(&params)?;
    let results = serde_json::to_value(report).expect("report serializes");
    Ok(RunOutput::new("readout", &p, results))
}

fn straggle(cli: &StraggleArgs, file: Option<&ConfigFile>) -> CliResult<RunOutput> {
    let d = StragglePlacement::se77_default();
    let defaults = StraggleArgs {
        sigma: q(d.sigma_depth),
        halfwidth: q(d.mode_halfwidth),
        profile: Some(ModeProfile::Cosine),
        samples: Some(100_000),
        seed: Some(0),
    };
    let p = resolve("straggle", &defaults, cli, file)?;
    let placement = StragglePlacement {
        sigma_depth: req(&p.sigma, "sigma")?.0,
        mode_halfwidth: req(&p.halfwidth, "halfwidth")?.0,
        profile: req(&p.profile, "profile")?,
    };
    let seed = req(&p.seed, "seed")?;
    let stats = coupling_variation(&placement, req(&p.samples, "samples")?, seed)?;
    let results = serde_json::to_value(stats).expect("stats serialize");
    Ok(RunOutput::new("straggle", &p, results).seed(seed))
}
