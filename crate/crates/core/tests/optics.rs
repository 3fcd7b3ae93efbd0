use std::f64::consts::PI;

use proptest::prelude::*;
use sesim::fit::{fit, FitModel, FitOptions};
use sesim::optics::*;

fn grid(c: f64, half: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| c - half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
}

// ∫ Lorentzian over [a, b] = (atan((b − c)/γ) − atan((a − c)/γ))/π, γ = HWHM.
fn lorentz_window(line: &OpticalLine, a: f64, b: f64) -> f64 {
    let g = 0.5 * line.fwhm_cm1;
    (((b - line.center_cm1) / g).atan() - ((a - line.center_cm1) / g).atan()) / PI
}

#[test]
fn fitted_width_is_configured_width() {
    let opts = LineTableOptions { side_peaks: false, ..Default::default() };
    let lines = default_lines(&opts).unwrap();
    let g = grid(lines[0].center_cm1, 0.03, 601);
    let s = absorption_spectrum(&lines[..1], &PopulationState::singlet(), &g).unwrap();
    let x: Vec<f64> = g.iter().map(|v| v - lines[0].center_cm1).collect();
    let r = fit(&x, &s.absorbance, FitModel::Lorentzian, &FitOptions::default()).unwrap();
    assert!((r.param("fwhm").unwrap() - SE_LINEWIDTH_CM1).abs() < 1e-6);
    assert!((r.param("area").unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn singlet_to_triplet_area_ratio() {
    let opts = LineTableOptions {
        side_peaks: false,
        singlet_strength: 1.0,
        triplet_strength: 3.0,
        ..Default::default()
    };
    let lines = default_lines(&opts).unwrap();
    let pops = PopulationState::new(0.5, 0.5).unwrap();
    let mid = 0.5 * (lines[0].center_cm1 + lines[1].center_cm1);
    let g = grid(mid, 0.5, 200_001);
    let s = absorption_spectrum(&lines, &pops, &g).unwrap();
    let singlet = s.area_between(mid, f64::INFINITY);
    let triplet = s.area_between(f64::NEG_INFINITY, mid);
    // additivity oracle: each half collects its own line plus the other's tail
    let (lo, hi) = (g[0], g[g.len() - 1]);
    let exp_s = 0.5 * lorentz_window(&lines[0], mid, hi) + 1.5 * lorentz_window(&lines[1], mid, hi);
    let exp_t = 0.5 * lorentz_window(&lines[0], lo, mid) + 1.5 * lorentz_window(&lines[1], lo, mid);
    assert!((singlet / exp_s - 1.0).abs() < 1e-4);
    assert!((triplet / exp_t - 1.0).abs() < 1e-4);
    let total_s = 0.5 * lorentz_window(&lines[0], lo, hi);
    let total_t = 1.5 * lorentz_window(&lines[1], lo, hi);
    assert!((total_t / total_s - 3.0).abs() < 1e-3);
}

#[test]
fn thermal_spectrum_has_side_peaks() {
    let lines = default_lines(&LineTableOptions::default()).unwrap();
    let c = LineTableOptions::default().center_cm1;
    let s = absorption_spectrum(&lines, &PopulationState::thermal(), &grid(c, 0.1, 4001)).unwrap();
    let at = |nu: f64| {
        let i = s.wavenumber_cm1.iter().position(|&v| v >= nu).unwrap();
        s.absorbance[i]
    };
    assert!(at(c - 0.035) > 0.0);
    assert!(at(lines[1].center_cm1) > at(lines[0].center_cm1));
}

#[test]
fn linewidth_and_wavelength_conversions() {
    let hz = wavenumber_to_hz(0.007);
    assert!((hz / 209.9e6 - 1.0).abs() < 5e-4);
    assert!((hz / 210e6 - 1.0).abs() < 5e-3);
    let tau = wavenumber_to_lifetime(0.007).unwrap();
    assert!((tau / 0.758e-9 - 1.0).abs() < 1e-3);
    let rad = radiative_lifetime(1.3, 2.9e-6, 3.45).unwrap();
    assert!((rad / 13e-6 - 1.0).abs() < 0.1);
    let d = dipole_from_lifetime(13e-6, 2.9e-6, 3.45).unwrap();
    assert!((d / 1.3 - 1.0).abs() < 0.1);
}

#[test]
fn hyperpolarization_numbers() {
    let pump = PumpModel::calibrated(50e-3, 4e-6, 0.0).unwrap();
    assert!((pump.time_constant() - 0.05).abs() < 1e-15);
    assert!((pump.with_power(8e-6).time_constant() - 0.025).abs() < 1e-15);
    let tr = hyperpolarize(&pump, GroundManifold::Triplet, &[0.0, 0.05, 0.5], PopulationState::thermal())
        .unwrap();
    assert!((tr.states[1].p_triplet() - 0.75 * (-1.0f64).exp()).abs() < 1e-12);
    assert!(tr.polarization(2) > 0.99);
}

fn line() -> impl Strategy<Value = OpticalLine> {
    (3443.9..3444.1f64, 1e-3..0.02f64, 0.0..3.0f64, 0..3usize).prop_map(|(c, w, s, k)| OpticalLine {
        center_cm1: c,
        fwhm_cm1: w,
        strength: s,
        ground: [GroundManifold::Singlet, GroundManifold::Triplet, GroundManifold::Any][k],
        isotope: Isotope::Se77,
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(128) })]

    #[test]
    fn spectrum_is_linear(a in prop::collection::vec(line(), 0..4), b in prop::collection::vec(line(), 0..4), ps in 0.0..1.0f64) {
        let pops = PopulationState::new(ps, 1.0 - ps).unwrap();
        let g = grid(3444.0, 0.2, 301);
        let sa = absorption_spectrum(&a, &pops, &g).unwrap();
        let sb = absorption_spectrum(&b, &pops, &g).unwrap();
        let all: Vec<OpticalLine> = a.iter().chain(&b).cloned().collect();
        let s = absorption_spectrum(&all, &pops, &g).unwrap();
        for i in 0..g.len() {
            let sum = sa.absorbance[i] + sb.absorbance[i];
            prop_assert!((s.absorbance[i] - sum).abs() <= 1e-12 * sum.abs().max(1.0));
        }
    }

    #[test]
    fn area_independent_of_width(w in 1e-3..0.02f64, s in 0.1..3.0f64) {
        let l = OpticalLine { center_cm1: 3444.0, fwhm_cm1: w, strength: s, ground: GroundManifold::Any, isotope: Isotope::Se76 };
        let half = 400.0 * w;
        let g = grid(3444.0, half, 400_001);
        let sp = absorption_spectrum(&[l], &PopulationState::thermal(), &g).unwrap();
        // the window holds all but 2/(π·800) of a Lorentzian's area
        let expected = s * lorentz_window(&l, g[0], g[g.len() - 1]);
        prop_assert!((sp.area() / expected - 1.0).abs() < 1e-5);
        prop_assert!((sp.area() / s - 1.0).abs() < 2e-3);
    }

    #[test]
    fn populations_conserved(tau in 1e-3..1.0f64, power in 1e-7..1e-4f64, b in 0.0..0.99f64, ps in 0.0..1.0f64, singlet in any::<bool>()) {
        let pump = PumpModel::calibrated(tau, 4e-6, b).unwrap().with_power(power);
        let manifold = if singlet { GroundManifold::Singlet } else { GroundManifold::Triplet };
        let t: Vec<f64> = (0..50).map(|i| i as f64 * tau / 5.0).collect();
        let tr = hyperpolarize(&pump, manifold, &t, PopulationState::new(ps, 1.0 - ps).unwrap()).unwrap();
        for s in &tr.states {
            prop_assert!(s.p_singlet() >= 0.0 && s.p_triplet() >= 0.0);
            prop_assert!((s.p_singlet() + s.p_triplet() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn conversion_round_trips(fwhm in 1e3..1e12f64, d in 0.01..20.0f64, lambda in 1e-7..1e-4f64, n in 1.0..4.0f64) {
        let tau = linewidth_to_lifetime(fwhm).unwrap();
        prop_assert!((lifetime_to_linewidth(tau).unwrap() / fwhm - 1.0).abs() < 1e-10);
        let rad = radiative_lifetime(d, lambda, n).unwrap();
        prop_assert!((dipole_from_lifetime(rad, lambda, n).unwrap() / d - 1.0).abs() < 1e-10);
        let quarter = radiative_lifetime(2.0 * d, lambda, n).unwrap();
        prop_assert!((4.0 * quarter / rad - 1.0).abs() < 1e-12);
    }
}
