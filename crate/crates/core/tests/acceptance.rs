//! Acceptance criteria, one PASS/FAIL line each with its runtime budget.
//!
//! Run with `cargo test -p sesim-core --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sesim::cavity::*;
use sesim::coherence::*;
use sesim::constants::{H, MU_B, MU_N};
use sesim::fit::FitModel;
use sesim::optics::*;
use sesim::spin::{
    build_hamiltonian, eigensystem, find_clock_transition, se77, transition_frequencies, SpinSystem,
};
use statrs::distribution::{DiscreteCDF, Poisson};

type Check = Result<String, String>;

macro_rules! require {
    ($cond:expr, $($fmt:tt)+) => {{
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    }};
}

struct Outcome {
    passed: bool,
}

fn criterion(id: u32, name: &str, limit: Duration, f: impl FnOnce() -> Check) -> Outcome {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let passed = result.is_ok() && in_time;
    let detail = match &result {
        Ok(d) | Err(d) => d.clone(),
    };
    let timing = format!("{:.3} s / limit {:.0} s", elapsed.as_secs_f64(), limit.as_secs_f64());
    println!(
        "{} [{id:>2}] {name} ({timing}{}): {detail}",
        if passed { "PASS" } else { "FAIL" },
        if in_time { "" } else { ", over time" }
    );
    Outcome { passed }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn c1_zero_field() -> Check {
    let sys = se77();
    let pair = sys.parse_pair("S0-T0").map_err(|e| e.to_string())?;
    let f = transition_frequencies(&sys, 0.0, &[pair]).map_err(|e| e.to_string())?[0].1;
    require!((f - 1.66e9).abs() < 1e-3, "S0-T0 = {f} Hz");
    Ok(format!("S0-T0 = {f:.6} Hz"))
}

fn c2_earth_field() -> Check {
    let sys = se77();
    let b = 70e-6;
    let freqs = transition_frequencies(&sys, b, &sys.default_pairs()).map_err(|e| e.to_string())?;
    let (minus, center, plus) = (freqs[0].1, freqs[1].1, freqs[2].1);
    // closed-form Breit-Rabi oracle
    let ge = sys.g_e() * MU_B / H;
    let gn = sys.g_n() * MU_N / H;
    let a = sys.hyperfine();
    let root = 0.5 * (a * a + ((ge + gn) * b).powi(2)).sqrt();
    let s0 = -a / 4.0 - root;
    let t0 = -a / 4.0 + root;
    let tm = a / 4.0 - (ge - gn) * b / 2.0;
    let tp = a / 4.0 + (ge - gn) * b / 2.0;
    let (lo_off, hi_off) = (minus - center, plus - center);
    let (lo_ref, hi_ref) = ((tm - s0) - (t0 - s0), (tp - s0) - (t0 - s0));
    require!(rel(lo_off, lo_ref) < 0.01 && rel(hi_off, hi_ref) < 0.01, "offsets {lo_off}, {hi_off} vs oracle {lo_ref}, {hi_ref}");
    require!(rel(hi_off, 0.98e6) < 0.01 && rel(-lo_off, 0.98e6) < 0.01, "offsets {lo_off}, {hi_off} vs ±0.98 MHz");
    require!(lo_off < 0.0 && hi_off > 0.0, "lines not on both sides of centre");
    Ok(format!(
        "outer lines {:+.4} / {:+.4} MHz from centre (oracle {:+.4} / {:+.4})",
        lo_off / 1e6,
        hi_off / 1e6,
        lo_ref / 1e6,
        hi_ref / 1e6
    ))
}

fn c3_clock() -> Check {
    let sys = se77();
    let p = sys.parse_pair("S0-T0").map_err(|e| e.to_string())?;
    let zero = find_clock_transition(&sys, p, -0.01, 0.01).map_err(|e| e.to_string())?;
    require!(zero.len() == 1, "expected one S0-T0 clock point, found {}", zero.len());
    let z = zero[0];
    require!(z.field.abs() < 1e-9 && z.d1.abs() < 1e6 && z.d2 > 0.0, "{z:?}");
    let n = sys.parse_pair("T0-T+").map_err(|e| e.to_string())?;
    let nuc = find_clock_transition(&sys, n, 0.5, 3.0).map_err(|e| e.to_string())?;
    require!(nuc.len() == 1, "expected one T0-T+ clock point, found {}", nuc.len());
    let c = nuc[0];
    require!((1.5..=2.0).contains(&c.field), "nuclear clock at {} T", c.field);
    Ok(format!(
        "S0-T0 at B = {:.1e} T with d2f/dB2 = {:.4e} Hz/T^2; T0-T+ clock at {:.4} T ({:.4} MHz)",
        z.field,
        z.d2,
        c.field,
        c.frequency / 1e6
    ))
}

fn c4_coherence() -> Check {
    let q = QubitModel::se77_clock();
    let sigma = 2f64.sqrt() / 1e-3;
    let n_traj = 2000;
    let hahn = hahn_echo_experiment(
        &q,
        &linspace(0.05, 4.0, 40),
        &NoiseModel::quasi_static(sigma, 7),
        n_traj,
        &EchoOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    require!(rel(hahn.t2(), 2.14) < 0.05, "Hahn T2 = {}", hahn.t2());

    let ideal = QubitModel::ideal(q.omega_r);
    let ramsey = ramsey_experiment(&ideal, 0.0, &linspace(0.0, 3e-3, 31), &NoiseModel::quasi_static(sigma, 8), n_traj)
        .map_err(|e| e.to_string())?;
    let fit = fit_decay(&ramsey, FitModel::Gaussian, false).map_err(|e| e.to_string())?;
    let t2s = fit.param("T").unwrap_or(f64::NAN);
    require!(rel(t2s, 1e-3) < 0.05, "T2* = {t2s}");

    let t1 = t1_experiment(&q, &[0.0, q.t1]).map_err(|e| e.to_string())?;
    let t1_err = (t1.y[1] - (-1.0f64).exp()).abs();
    require!(t1_err < 1e-6, "T1 trace off by {t1_err}");

    let base = NoiseModel::quasi_static(sigma, 9).with_power_law(1.0, 1.0);
    let s0 = filter::calibrate_power_law(&base, 2.14).map_err(|e| e.to_string())?;
    let noise = base.with_power_law(1.0, s0);
    let cpmg = cpmg_experiment(&ideal, &[1, 2, 4, 8], &logspace(0.02, 3.0, 36), &noise, n_traj)
        .map_err(|e| e.to_string())?;
    require!((cpmg.exponent - 0.5).abs() <= 0.1, "CPMG exponent {}", cpmg.exponent);
    Ok(format!(
        "Hahn T2 = {:.4} s, T2* = {:.4} ms, T1 error {:.1e}, CPMG exponent {:.3} ± {:.3}",
        hahn.t2(),
        t2s * 1e3,
        t1_err,
        cpmg.exponent,
        cpmg.exponent_sigma
    ))
}

fn c5_pumping() -> Check {
    let pump = PumpModel::calibrated(50e-3, 4e-6, 0.0).map_err(|e| e.to_string())?;
    let tau4 = pump.time_constant();
    let tau8 = pump.with_power(8e-6).time_constant();
    require!((tau4 - 0.05).abs() < 1e-15 && (tau8 - 0.025).abs() < 1e-15, "τ = {tau4}, {tau8}");
    let tr = hyperpolarize(&pump, GroundManifold::Triplet, &[0.0, 10.0 * tau4], PopulationState::thermal())
        .map_err(|e| e.to_string())?;
    let p = tr.polarization(1);
    require!(p > 0.99, "polarization {p}");
    Ok(format!("τ(4 μW) = {:.3} ms, τ(8 μW) = {:.3} ms, P(10τ) = {p:.6}", tau4 * 1e3, tau8 * 1e3))
}

fn c6_conversions() -> Check {
    let hz = wavenumber_to_hz(0.007);
    require!(rel(hz, 210e6) < 0.005, "0.007 cm^-1 = {hz} Hz");
    let tau = wavenumber_to_lifetime(0.007).map_err(|e| e.to_string())?;
    require!(rel(tau, 0.76e-9) < 0.005, "lifetime {tau}");
    let rad = radiative_lifetime(1.3, SE_WAVELENGTH, SILICON_INDEX).map_err(|e| e.to_string())?;
    let d = dipole_from_lifetime(13e-6, SE_WAVELENGTH, SILICON_INDEX).map_err(|e| e.to_string())?;
    require!(rel(rad, 13e-6) < 0.1 && rel(d, 1.3) < 0.1, "τ_rad = {rad}, d = {d}");
    Ok(format!(
        "Δν = {:.2} MHz, τ = {:.3} ns, τ_rad(1.3 D) = {:.2} μs, d(13 μs) = {:.3} D",
        hz / 1e6,
        tau * 1e9,
        rad * 1e6,
        d
    ))
}

fn c7_cavity_numbers() -> Check {
    let g = coupling_strength(1.3, 2.9e-6, 3.45, 0.1).map_err(|e| e.to_string())?;
    let two_g = 2.0 * g / (2.0 * PI);
    require!(rel(two_g, 1e9) < 0.1, "2g/2π = {two_g}");
    let gamma = Emitter::se77_default().gamma;
    let kappa = CavityMode::se77_default().kappa();
    let s = strong_coupling_check(g, kappa, gamma).map_err(|e| e.to_string())?;
    require!(rel(s.ratio, 4.8) < 0.1, "2g/γ = {}", s.ratio);
    require!(s.strong && s.cooperativity > 1.0, "{s:?}");
    Ok(format!(
        "2g/2π = {:.4} GHz, 2g/γ = {:.3}, κ/2π = {:.4} GHz, C = {:.3}, strong = {}",
        two_g / 1e9,
        s.ratio,
        kappa / (2.0 * PI) / 1e9,
        s.cooperativity,
        s.strong
    ))
}

fn c8_spectra() -> Check {
    // g ≫ κ, γ: Q = 10⁶ and a 20 MHz emitter linewidth
    let cavity = CavityMode { q: 1e6, ..CavityMode::se77_default() };
    let emitter = Emitter { gamma: 2.0 * PI * 20e6, ..Emitter::se77_default() };
    let s = CoupledSystem::new(cavity, emitter, 0.0, 0.0).map_err(|e| e.to_string())?;
    let wc = s.cavity.omega_c();
    let w = linspace(wc - 4.0 * s.g(), wc + 4.0 * s.g(), 40_001);
    let sp = transmission_spectrum(&s, SpinState::Coupled, &w).map_err(|e| e.to_string())?;
    let t = &sp.transmission;
    let peaks: Vec<usize> = (1..t.len() - 1).filter(|&i| t[i] > t[i - 1] && t[i] >= t[i + 1]).collect();
    require!(peaks.len() == 2, "found {} peaks", peaks.len());
    let split = w[peaks[1]] - w[peaks[0]];
    require!(rel(split, 2.0 * s.g()) < 0.02, "doublet split {split} vs 2g {}", 2.0 * s.g());

    let d = CoupledSystem::se77_default();
    let kappa = d.cavity.kappa();
    let w = linspace(d.cavity.omega_c() - 3.0 * kappa, d.cavity.omega_c() + 3.0 * kappa, 60_001);
    let u = transmission_spectrum(&d, SpinState::Uncoupled, &w).map_err(|e| e.to_string())?;
    let peak = u.transmission.iter().cloned().fold(0.0, f64::max);
    let above: Vec<f64> = w.iter().zip(&u.transmission).filter(|(_, t)| **t >= peak / 2.0).map(|(w, _)| *w).collect();
    let fwhm = above[above.len() - 1] - above[0];
    require!(rel(fwhm, kappa) < 0.02, "uncoupled FWHM {fwhm} vs κ {kappa}");

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = f64::MIN;
    for _ in 0..10_000 {
        let cavity = CavityMode {
            q: 10f64.powf(rng.random_range(2.0..7.0)),
            kappa_ext_fraction: rng.random_range(1e-3..=0.5),
            v_rel: rng.random_range(0.01..10.0),
            ..CavityMode::se77_default()
        };
        let emitter = Emitter {
            dipole_debye: rng.random_range(0.01..10.0),
            gamma: 10f64.powf(rng.random_range(6.0..11.0)),
            ..Emitter::se77_default()
        };
        let sys = CoupledSystem::new(cavity, emitter, rng.random_range(-3.0..3.0), rng.random_range(-1e11..1e11))
            .map_err(|e| e.to_string())?
            .with_uncoupled(UncoupledModel::Detuned);
        let state = if rng.random::<bool>() { SpinState::Coupled } else { SpinState::Uncoupled };
        let (t, r) = sys.response(state, sys.cavity.omega_c() + rng.random_range(-2e11..2e11));
        worst = worst.max(t.norm_sqr() + r.norm_sqr());
    }
    require!(worst <= 1.0 + 1e-12, "max |t|²+|r|² = {worst}");
    Ok(format!(
        "doublet {:.4}·2g, uncoupled FWHM {:.4}·κ, max |t|²+|r|² over 10⁴ draws = {worst:.12}",
        split / (2.0 * s.g()),
        fwhm / kappa
    ))
}

fn c9_readout() -> Check {
    let r = readout_fidelity(&ReadoutParams::new(0.01, 0.9, 100.0)).map_err(|e| e.to_string())?;
    require!(r.fidelity > 0.999, "fidelity {}", r.fidelity);
    let lo = Poisson::new(1.0).map_err(|e| e.to_string())?;
    let hi = Poisson::new(90.0).map_err(|e| e.to_string())?;
    let oracle = (1..300u64)
        .map(|th| 1.0 - 0.5 * (lo.sf(th - 1) + hi.cdf(th - 1)))
        .fold(0.0, f64::max);
    require!((r.fidelity - oracle).abs() < 1e-9, "fidelity {} vs oracle {oracle}", r.fidelity);
    Ok(format!("fidelity {:.12} (oracle {oracle:.12}), threshold {}", r.fidelity, r.threshold))
}

fn c10_straggle() -> Check {
    let p = StragglePlacement::se77_default();
    let s = coupling_variation(&p, 100_000, 10).map_err(|e| e.to_string())?;
    let a = p.a();
    let expected = (-0.5 * a * a * p.sigma_depth * p.sigma_depth).exp();
    require!(s.relative_std < 0.1, "std/mean = {}", s.relative_std);
    require!((s.mean - expected).abs() <= 3.0 * s.stderr, "mean {} vs {expected} (SE {})", s.mean, s.stderr);
    Ok(format!(
        "std/mean = {:.4}, mean = {:.5} vs closed form {expected:.5} (SE {:.1e})",
        s.relative_std, s.mean, s.stderr
    ))
}

fn random_spin_system(rng: &mut ChaCha8Rng) -> SpinSystem {
    let spin = [0.5, 1.0, 1.5, 2.5][rng.random_range(0..4usize)];
    SpinSystem::new(
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
        spin,
        rng.random_range(-5e9..5e9),
    )
    .expect("valid random system")
}

fn c11_properties() -> Check {
    const N: usize = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    for _ in 0..N {
        let sys = random_spin_system(&mut rng);
        let b = rng.random_range(-2.0..2.0);
        let h = build_hamiltonian(&sys, b).map_err(|e| e.to_string())?;
        let herm = (&h - h.adjoint()).norm();
        require!(herm <= 1e-9 * h.norm().max(1.0), "non-Hermitian by {herm}");
        let es = eigensystem(&sys, b).map_err(|e| e.to_string())?;
        require!(es.unitarity_error() < 1e-10, "unitarity error {}", es.unitarity_error());
    }

    for _ in 0..N {
        let mut items = Vec::new();
        for _ in 0..rng.random_range(1..8usize) {
            items.push(match rng.random_range(0..3u32) {
                0 => SequenceItem::Pulse(Pulse::ideal(rng.random_range(0.0..2.0 * PI), rng.random_range(-7.0..7.0))),
                1 => SequenceItem::Pulse(Pulse {
                    phase: rng.random_range(0.0..2.0 * PI),
                    angle: rng.random_range(0.1..7.0),
                    duration: rng.random_range(1e-4..1e-2),
                }),
                _ => SequenceItem::Delay(rng.random_range(0.0..0.5)),
            });
        }
        let seq = PulseSequence::new(items).map_err(|e| e.to_string())?;
        let clean = evolve(&QubitModel::ideal(2.0 * PI * 1e3), &seq, &NoiseModel::quiet(), 1)
            .map_err(|e| e.to_string())?;
        require!((clean.mean.norm() - 1.0).abs() < 1e-12, "noiseless norm {}", clean.mean.norm());
        let noise = NoiseModel::quasi_static(rng.random_range(0.0..1e3), rng.random()).with_power_law(1.0, 0.1);
        let noisy = evolve(&QubitModel::se77_clock(), &seq, &noise, 16).map_err(|e| e.to_string())?;
        require!(
            noisy.mean.norm() <= 1.0 + 3.0 * noisy.stderr.norm() + 1e-12,
            "noisy norm {} (SE {})",
            noisy.mean.norm(),
            noisy.stderr.norm()
        );
    }

    for _ in 0..N {
        let pump = PumpModel::calibrated(rng.random_range(1e-3..1.0), 4e-6, rng.random_range(0.0..0.99))
            .map_err(|e| e.to_string())?
            .with_power(rng.random_range(1e-7..1e-4));
        let ps = rng.random_range(0.0..1.0);
        let manifold = if rng.random::<bool>() { GroundManifold::Singlet } else { GroundManifold::Triplet };
        let t = linspace(0.0, 10.0 * pump.time_constant(), 50);
        let tr = hyperpolarize(&pump, manifold, &t, PopulationState::new(ps, 1.0 - ps).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        for s in &tr.states {
            require!((s.p_singlet() + s.p_triplet() - 1.0).abs() <= 1e-12, "population drift");
        }
    }

    for _ in 0..N {
        let cavity = CavityMode { v_rel: rng.random_range(0.01..10.0), ..CavityMode::se77_default() };
        let emitter = Emitter { dipole_debye: rng.random_range(0.01..10.0), ..Emitter::se77_default() };
        let branch = if rng.random::<bool>() { SpinBranch::Up } else { SpinBranch::Down };
        let sys = CoupledSystem::new(cavity, emitter, rng.random_range(-2.0..2.0), 0.0)
            .map_err(|e| e.to_string())?
            .tuned_to(branch);
        let ladder = jc_ladder(&sys, branch, 4).map_err(|e| e.to_string())?;
        for m in &ladder {
            let ratio = m.splitting() / ladder[0].splitting();
            require!((ratio - (m.k as f64).sqrt()).abs() < 1e-6, "k={} ratio {ratio}", m.k);
        }
    }

    for _ in 0..N {
        let seed = rng.random();
        let noise = NoiseModel::quasi_static(100.0, seed).with_power_law(1.0, 0.2);
        let seq = PulseSequence::echo(rng.random_range(0.01..1.0), PI, 0.0).map_err(|e| e.to_string())?;
        let q = QubitModel::se77_clock();
        let a = evolve(&q, &seq, &noise, 8).map_err(|e| e.to_string())?;
        let b = evolve(&q, &seq, &noise, 8).map_err(|e| e.to_string())?;
        require!(a == b, "evolve not reproducible for seed {seed}");
        let p = StragglePlacement::se77_default();
        let s1 = coupling_variation(&p, 1000, seed).map_err(|e| e.to_string())?;
        let s2 = coupling_variation(&p, 1000, seed).map_err(|e| e.to_string())?;
        require!(s1 == s2, "straggle not reproducible for seed {seed}");
    }
    Ok(format!("5 suites × {N} randomized instances"))
}

#[test]
fn acceptance_criteria() {
    let s = Duration::from_secs;
    let outcomes = [
        criterion(1, "zero-field S0-T0 splitting", s(1), c1_zero_field),
        criterion(2, "70 μT resonance triplet", s(1), c2_earth_field),
        criterion(3, "clock transitions", s(5), c3_clock),
        criterion(4, "coherence suite", s(120), c4_coherence),
        criterion(5, "hyperpolarization", s(1), c5_pumping),
        criterion(6, "optics conversions", s(1), c6_conversions),
        criterion(7, "cavity coupling numbers", s(1), c7_cavity_numbers),
        criterion(8, "spin-dependent spectra", s(10), c8_spectra),
        criterion(9, "photon-counting readout", s(1), c9_readout),
        criterion(10, "implantation straggle", s(10), c10_straggle),
        criterion(11, "property suites", s(120), c11_properties),
    ];
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
