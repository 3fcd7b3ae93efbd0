//! Command-line definitions. Every option of a simulation subcommand is also
//! a key of that subcommand's config section, under the same long name.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sesim::cavity::{Leg, ModeProfile, SpinBranch, SpinState, UncoupledModel};
use sesim::fit::FitModel;
use sesim::optics::GroundManifold;

use crate::values::{Grid, IntList, Quantity};

/// Parses a lowercase enum name through its serde representation.
fn named<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

const AFTER_HELP: &str = "\
Numbers accept SI prefixes and units (70uT, 2.14s, 4uW, 1.66GHz, inf).
Grids are start:stop:count, start:stop:count:log or a comma list.
Config-file keys are the long option names above, in the section named after
the subcommand (e.g. \"pulse-hahn\"). Flags override file values.";

#[derive(Debug, Parser)]
#[command(name = "sesim", version, about = "Donor spin qubit simulator", after_help = AFTER_HELP)]
pub struct Cli {
    /// JSON config file with per-subcommand sections.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write the fully resolved config for this run to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    pub save_config: Option<PathBuf>,

    #[command(flatten)]
    pub output: OutputArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Config section `output`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct OutputArgs {
    /// Write the data table (CSV) to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    pub csv: Option<PathBuf>,

    /// Write the JSON run report to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,

    /// Print the JSON report instead of the CSV table on stdout.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub json: Option<bool>,

    /// Print nothing on stdout.
    #[arg(long, short, global = true, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub quiet: Option<bool>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transition frequencies against magnetic field.
    #[command(after_help = AFTER_HELP)]
    BreitRabi(BreitRabiArgs),
    /// Fields where transition frequencies are stationary in B.
    #[command(after_help = AFTER_HELP)]
    ClockFind(ClockFindArgs),
    /// Pulse-sequence experiments on the clock qubit.
    #[command(subcommand)]
    Pulse(PulseCommand),
    /// Optical hyperpolarisation of the ground-state manifolds.
    #[command(after_help = AFTER_HELP)]
    Polarize(PolarizeArgs),
    /// Optical absorption or cavity transmission spectra.
    #[command(subcommand)]
    Spectrum(SpectrumCommand),
    /// Photon-counting single-shot readout fidelity.
    #[command(after_help = AFTER_HELP)]
    Readout(ReadoutArgs),
    /// Coupling spread from implantation straggle.
    #[command(after_help = AFTER_HELP)]
    Straggle(StraggleArgs),
    /// Render a CSV produced by another subcommand as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Subcommand)]
pub enum PulseCommand {
    /// Resonant drive of varying length.
    #[command(after_help = AFTER_HELP)]
    Rabi(RabiArgs),
    /// Free-induction decay (T2*).
    #[command(after_help = AFTER_HELP)]
    Ramsey(RamseyArgs),
    /// Hahn echo decay (T2), fitted.
    #[command(after_help = AFTER_HELP)]
    Hahn(HahnArgs),
    /// CPMG decay for several pulse counts and the T2 scaling exponent.
    #[command(after_help = AFTER_HELP)]
    Cpmg(CpmgArgs),
    /// Inversion recovery (T1).
    #[command(after_help = AFTER_HELP)]
    T1(T1Args),
    /// Echo amplitude against refocusing angle.
    #[command(after_help = AFTER_HELP)]
    TipAngle(TipAngleArgs),
}

#[derive(Debug, Subcommand)]
pub enum SpectrumCommand {
    /// Se optical absorption lines weighted by ground-state populations.
    #[command(after_help = AFTER_HELP)]
    Absorption(AbsorptionArgs),
    /// Cavity transmission and reflection for one spin state.
    #[command(after_help = AFTER_HELP)]
    Cavity(CavityArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SystemArgs {
    /// Isotope preset (77Se, 33S, 123Te, 125Te, or a name from the config `presets` section).
    #[arg(long)]
    pub isotope: Option<String>,
    /// Override the electron g-factor.
    #[arg(long)]
    pub g_e: Option<f64>,
    /// Override the nuclear g-factor.
    #[arg(long)]
    pub g_n: Option<f64>,
    /// Override the nuclear spin (half-integer).
    #[arg(long)]
    pub nuclear_spin: Option<f64>,
    /// Override the hyperfine constant A (Hz).
    #[arg(long)]
    pub hyperfine: Option<Quantity>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BreitRabiArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    /// Lowest field (T).
    #[arg(long)]
    pub bmin: Option<Quantity>,
    /// Highest field (T).
    #[arg(long)]
    pub bmax: Option<Quantity>,
    /// Number of fields, endpoints included.
    #[arg(long)]
    pub points: Option<usize>,
    /// Comma-separated transitions such as S0-T0; empty means the magnetic-dipole set.
    #[arg(long)]
    pub pairs: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ClockFindArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    /// Lower end of the search range (T).
    #[arg(long)]
    pub bmin: Option<Quantity>,
    /// Upper end of the search range (T).
    #[arg(long)]
    pub bmax: Option<Quantity>,
    /// Comma-separated transitions; empty means S0-T0,T0-T+,S0-T- (or the magnetic-dipole set for I != 1/2).
    #[arg(long)]
    pub pairs: Option<String>,
    /// Points in the bracketing scan.
    #[arg(long)]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct QubitArgs {
    /// Longitudinal relaxation time T1 (s).
    #[arg(long)]
    pub t1: Option<Quantity>,
    /// Intrinsic coherence time T2 (s); inf disables it.
    #[arg(long)]
    pub t2: Option<Quantity>,
    /// Stretch exponent of the intrinsic decay.
    #[arg(long)]
    pub stretch: Option<f64>,
    /// Rabi angular frequency at unit amplitude (rad/s).
    #[arg(long)]
    pub omega_r: Option<Quantity>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct NoiseArgs {
    /// Standard deviation of quasi-static detuning (rad/s).
    #[arg(long)]
    pub sigma_qs: Option<Quantity>,
    /// Power-law exponent of S(ω) ∝ ω^-α, in [0, 2].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Power-law amplitude S(1 rad/s); empty means calibrate from --noise-t2.
    #[arg(long)]
    pub s0: Option<Quantity>,
    /// Hahn-echo T2 the power-law noise alone would give (s); inf means no power-law noise.
    #[arg(long)]
    pub noise_t2: Option<Quantity>,
    /// Lower edge of the noise band (rad/s).
    #[arg(long)]
    pub omega_lo: Option<Quantity>,
    /// Upper edge of the noise band (rad/s).
    #[arg(long)]
    pub omega_hi: Option<Quantity>,
    /// Number of noise tones.
    #[arg(long)]
    pub tones: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte-Carlo trajectories.
    #[arg(long)]
    pub trajectories: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RabiArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub qubit: QubitArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub noise: NoiseArgs,
    /// Drive amplitude relative to --omega-r.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Pulse durations (s).
    #[arg(long)]
    pub durations: Option<Grid>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RamseyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub qubit: QubitArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub noise: NoiseArgs,
    /// Drive detuning (Hz); nonzero values fit a Gaussian-damped cosine.
    #[arg(long)]
    pub detuning: Option<Quantity>,
    /// Free-evolution times (s).
    #[arg(long)]
    pub taus: Option<Grid>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct HahnArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub qubit: QubitArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub noise: NoiseArgs,
    /// Half echo times τ (s); the trace abscissa is 2τ.
    #[arg(long)]
    pub taus: Option<Grid>,
    /// Subtract the trace with the leading π/2 phase inverted.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub phase_cycle: Option<bool>,
    /// Constant offset added to each raw reading.
    #[arg(long, allow_negative_numbers = true)]
    pub offset: Option<f64>,
    /// Fit model: exponential, stretched-exponential or gaussian.
    #[arg(long, value_parser = named::<FitModel>)]
    pub model: Option<FitModel>,
    /// Fit a constant baseline.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub fit_baseline: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CpmgArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub qubit: QubitArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub noise: NoiseArgs,
    /// Pulse counts, comma-separated.
    #[arg(long)]
    pub n: Option<IntList>,
    /// Half inter-pulse spacings τ (s); total time is 2Nτ.
    #[arg(long)]
    pub taus: Option<Grid>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct T1Args {
    #[command(flatten)]
    #[serde(flatten)]
    pub qubit: QubitArgs,
    /// Recovery waits (s).
    #[arg(long)]
    pub waits: Option<Grid>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TipAngleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub qubit: QubitArgs,
    /// Half echo time τ (s).
    #[arg(long)]
    pub tau: Option<Quantity>,
    /// Refocusing angles (rad), within [0, 2π].
    #[arg(long)]
    pub angles: Option<Grid>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PolarizeArgs {
    /// Pump power (W).
    #[arg(long)]
    pub power: Option<Quantity>,
    /// Calibration: measured time constant (s) ...
    #[arg(long)]
    pub tau_cal: Option<Quantity>,
    /// ... at this power (W).
    #[arg(long)]
    pub power_cal: Option<Quantity>,
    /// Fraction of excitations that decay back to the pumped manifold.
    #[arg(long)]
    pub branch_back: Option<f64>,
    /// Manifold the laser depletes: singlet or triplet.
    #[arg(long, value_parser = named::<GroundManifold>)]
    pub pumped: Option<GroundManifold>,
    /// Initial singlet population (thermal is 0.25).
    #[arg(long)]
    pub p_singlet: Option<f64>,
    /// Times (s).
    #[arg(long)]
    pub times: Option<Grid>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct AbsorptionArgs {
    /// Line centre without hyperfine structure (cm^-1).
    #[arg(long)]
    pub center: Option<f64>,
    /// Hyperfine constant (Hz).
    #[arg(long)]
    pub hyperfine: Option<Quantity>,
    /// Line FWHM (cm^-1).
    #[arg(long)]
    pub fwhm: Option<f64>,
    /// Per-state strength of singlet-origin lines.
    #[arg(long)]
    pub singlet_strength: Option<f64>,
    /// Per-state strength of triplet-origin lines.
    #[arg(long)]
    pub triplet_strength: Option<f64>,
    /// Include the 76Se and 78Se lines.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub side_peaks: Option<bool>,
    /// 76Se line offset (cm^-1).
    #[arg(long, allow_negative_numbers = true)]
    pub se76_offset: Option<f64>,
    /// 78Se line offset (cm^-1).
    #[arg(long, allow_negative_numbers = true)]
    pub se78_offset: Option<f64>,
    /// Strength of each side line.
    #[arg(long)]
    pub side_strength: Option<f64>,
    /// Singlet population (thermal is 0.25).
    #[arg(long)]
    pub p_singlet: Option<f64>,
    /// Half-width of the wavenumber window around the centre (cm^-1).
    #[arg(long)]
    pub span: Option<f64>,
    /// Grid points.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CavityArgs {
    /// Cavity wavelength in vacuum (m).
    #[arg(long)]
    pub lambda0: Option<Quantity>,
    /// Loaded quality factor.
    #[arg(long)]
    pub q: Option<Quantity>,
    /// κ_ext/κ per port, in (0, 0.5].
    #[arg(long)]
    pub kext_fraction: Option<f64>,
    /// Mode volume in units of (λ/n)^3.
    #[arg(long)]
    pub v_rel: Option<f64>,
    /// Refractive index.
    #[arg(long)]
    pub n: Option<f64>,
    /// Optical dipole moment (D).
    #[arg(long)]
    pub dipole: Option<f64>,
    /// Emitter linewidth γ/2π (Hz).
    #[arg(long)]
    pub gamma_hz: Option<Quantity>,
    /// Ground-state g-factor.
    #[arg(long)]
    pub g_ground: Option<f64>,
    /// Excited-state g-factor.
    #[arg(long)]
    pub g_excited: Option<f64>,
    /// Magnetic field (T).
    #[arg(long)]
    pub field: Option<Quantity>,
    /// Cavity minus zero-field emitter frequency, /2π (Hz); ignored with --tune-to.
    #[arg(long, allow_negative_numbers = true)]
    pub delta_tune_hz: Option<Quantity>,
    /// Tune the cavity onto this spin branch (up or down); empty keeps --delta-tune-hz.
    #[arg(long, value_parser = named::<SpinBranch>)]
    pub tune_to: Option<SpinBranch>,
    /// Optical leg: cross or direct.
    #[arg(long, value_parser = named::<Leg>)]
    pub leg: Option<Leg>,
    /// Spin branch that is the coupled state: up or down.
    #[arg(long, value_parser = named::<SpinBranch>)]
    pub branch: Option<SpinBranch>,
    /// Uncoupled-state model: decoupled or detuned.
    #[arg(long, value_parser = named::<UncoupledModel>)]
    pub uncoupled: Option<UncoupledModel>,
    /// Spin state to probe: coupled or uncoupled.
    #[arg(long, value_parser = named::<SpinState>)]
    pub state: Option<SpinState>,
    /// Half-width of the probe window around the cavity frequency, /2π (Hz).
    #[arg(long)]
    pub span: Option<Quantity>,
    /// Grid points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Override the computed coupling, g/2π (Hz).
    #[arg(long)]
    pub coupling_hz: Option<Quantity>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReadoutArgs {
    /// Transmission with the spin coupled.
    #[arg(long)]
    pub ton: Option<f64>,
    /// Transmission with the spin uncoupled.
    #[arg(long)]
    pub toff: Option<f64>,
    /// Mean incident photons per shot.
    #[arg(long)]
    pub photons: Option<f64>,
    /// Spin T1 during readout (s).
    #[arg(long)]
    pub t1_spin: Option<Quantity>,
    /// Readout window (s).
    #[arg(long)]
    pub window: Option<Quantity>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct StraggleArgs {
    /// Implantation depth standard deviation (m).
    #[arg(long)]
    pub sigma: Option<Quantity>,
    /// Mode half-width λ/2n (m).
    #[arg(long)]
    pub halfwidth: Option<Quantity>,
    /// Mode profile: cosine or gaussian.
    #[arg(long, value_parser = named::<ModeProfile>)]
    pub profile: Option<ModeProfile>,
    /// Monte-Carlo samples (at least 1000).
    #[arg(long)]
    pub samples: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// CSV written by breit-rabi, pulse, polarize or spectrum.
    pub input: PathBuf,
    /// Schema: auto, breit-rabi, trace, cpmg, polarize, absorption or cavity.
    #[arg(long, default_value = "auto")]
    pub kind: String,
    /// Second CSV of the same schema drawn on the same axes.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    /// Output SVG.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Plot title.
    #[arg(long)]
    pub title: Option<String>,
}
