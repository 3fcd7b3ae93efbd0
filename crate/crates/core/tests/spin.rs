use proptest::prelude::*;
use sesim::constants::{H, MU_B, MU_N};
use sesim::spin::{
    build_hamiltonian, eigensystem, field_sweep, find_clock_transition, preset, se77,
    transition_frequencies, SpinSystem,
};

/// Cyclic Jacobi eigenvalues of a real symmetric matrix (test oracle).
#[allow(clippy::needless_range_loop)]
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn real_hamiltonian(sys: &SpinSystem, b: f64) -> Vec<Vec<f64>> {
    let h = build_hamiltonian(sys, b).unwrap();
    (0..h.nrows())
        .map(|i| (0..h.ncols()).map(|j| h[(i, j)].re).collect())
        .collect()
}

/// Breit-Rabi closed form for S = I = 1/2: (S0, T-, T0, T+) energies in Hz.
fn breit_rabi_levels(sys: &SpinSystem, b: f64) -> [f64; 4] {
    let a = sys.hyperfine();
    let ge = sys.g_e() * MU_B / H;
    let gn = sys.g_n() * MU_N / H;
    let root = 0.5 * (a * a + ((ge + gn) * b).powi(2)).sqrt();
    [
        -a / 4.0 - root,
        a / 4.0 - (ge - gn) * b / 2.0,
        -a / 4.0 + root,
        a / 4.0 + (ge - gn) * b / 2.0,
    ]
}

#[test]
fn zero_field_gap_is_hyperfine_constant() {
    let sys = se77();
    let pair = sys.parse_pair("S0-T0").unwrap();
    let f = transition_frequencies(&sys, 0.0, &[pair]).unwrap()[0].1;
    assert!((f - 1.66e9).abs() < 1e-3, "{f}");
    let ev = jacobi_eigenvalues(real_hamiltonian(&sys, 0.0));
    assert!((ev[0] + 1.245e9).abs() < 1e-3);
    for e in &ev[1..] {
        assert!((e - 0.415e9).abs() < 1e-3);
    }
}

#[test]
fn earth_field_triplet_matches_breit_rabi() {
    let sys = se77();
    let b = 70e-6;
    let es = eigensystem(&sys, b).unwrap();
    let oracle = breit_rabi_levels(&sys, b);
    for (name, e) in ["S0", "T-", "T0", "T+"].iter().zip(oracle) {
        let got = es.energy(sys.parse_label(name).unwrap()).unwrap();
        assert!((got - e).abs() < 1e-3, "{name}: {got} vs {e}");
    }
    let jac = jacobi_eigenvalues(real_hamiltonian(&sys, b));
    for (x, y) in jac.iter().zip(es.energies()) {
        assert!((x - y).abs() < 1e-3);
    }

    let freqs = transition_frequencies(&sys, b, &sys.default_pairs()).unwrap();
    let (minus, center, plus) = (freqs[0].1, freqs[1].1, freqs[2].1);
    // outer lines ≈ ∓(g_e μ_B − g_n μ_N) B / 2h ≈ 0.98 MHz
    let expected = (sys.g_e() * MU_B - sys.g_n() * MU_N) * b / (2.0 * H);
    assert!((expected - 0.98e6).abs() / 0.98e6 < 0.01);
    assert!(((center - minus) - expected).abs() / expected < 0.01);
    assert!(((plus - center) - expected).abs() / expected < 0.01);

    // S0-T0 shift A(√(1+x²) − 1) ≈ +1.2 kHz
    let x = (sys.g_e() * MU_B + sys.g_n() * MU_N) * b / (H * sys.hyperfine());
    let shift = sys.hyperfine() * ((1.0 + x * x).sqrt() - 1.0);
    assert!((center - 1.66e9 - shift).abs() < 1.0, "{}", center - 1.66e9);
    assert!((shift - 1.2e3).abs() < 0.05e3);
}

#[test]
#[allow(clippy::needless_range_loop)]
fn outer_lines_linear_and_center_even_over_earth_field_range() {
    let sys = se77();
    let pairs = sys.default_pairs();
    let t = field_sweep(&sys, -200e-6, 200e-6, 81, &pairs).unwrap();
    let n = t.fields.len();
    for col in [0, 2] {
        let f = t.column(col);
        // linear fit through the endpoints of the 0..200 μT half
        let (b0, f0) = (t.fields[n / 2], f[n / 2]);
        let (b1, f1) = (t.fields[n - 1], f[n - 1]);
        let slope = (f1 - f0) / (b1 - b0);
        for k in n / 2..n {
            let lin = f0 + slope * (t.fields[k] - b0);
            let excursion = (f1 - f0).abs();
            assert!((f[k] - lin).abs() <= 1e-3 * excursion, "col {col} row {k}");
        }
    }
    let center = t.column(1);
    for k in 0..n {
        let mirror = center[n - 1 - k];
        assert!((center[k] - mirror).abs() <= 1e-9 * center[k]);
    }
}

#[test]
fn nuclear_clock_transition_near_1p75_tesla() {
    let sys = se77();
    for name in ["T0-T+", "S0-T-"] {
        let pair = sys.parse_pair(name).unwrap();
        let pts = find_clock_transition(&sys, pair, 0.5, 3.0).unwrap();
        assert_eq!(pts.len(), 1, "{name}: {pts:?}");
        let p = pts[0];
        assert!((1.5..=2.0).contains(&p.field), "{name}: {}", p.field);
        assert!(p.d1.abs() < 1e6);
        // oracle: x/√(1+x²) = (γe − γn)/(γe + γn), x = (γe + γn)B/A
        let ge = sys.electron_gamma();
        let gn = sys.nuclear_gamma();
        let r = (ge - gn) / (ge + gn);
        let x = r / (1.0 - r * r).sqrt();
        let b_exact = x * sys.hyperfine() / (ge + gn);
        assert!((p.field - b_exact).abs() < 1e-6, "{} vs {b_exact}", p.field);
    }
}

#[test]
fn spin_three_halves_zero_field_spectrum() {
    let sys = preset("33S").unwrap();
    let ev = jacobi_eigenvalues(real_hamiltonian(&sys, 0.0));
    let a = sys.hyperfine();
    // F = 1 (three levels) at −5A/4, F = 2 (five) at 3A/4
    for e in &ev[..3] {
        assert!((e + 1.25 * a).abs() < 1e-4);
    }
    for e in &ev[3..] {
        assert!((e - 0.75 * a).abs() < 1e-4);
    }
    let es = eigensystem(&sys, 0.0).unwrap();
    for (x, y) in ev.iter().zip(es.energies()) {
        assert!((x - y).abs() < 1e-4);
    }
}

fn arb_system() -> impl Strategy<Value = SpinSystem> {
    (1.5f64..2.5, -2.0f64..2.0, 0u32..4, -4e9f64..4e9)
        .prop_map(|(ge, gn, two_i, a)| SpinSystem::new(ge, gn, two_i as f64 / 2.0, a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(128) })]

    #[test]
    fn hamiltonian_hermitian_traceless(sys in arb_system(), b in -10.0f64..10.0) {
        let h = build_hamiltonian(&sys, b).unwrap();
        let scale = h.norm().max(1.0);
        let asym = (&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(asym <= 1e-12 * scale);
        prop_assert!(h.trace().norm() < 1.0);
    }

    #[test]
    fn eigensystem_unitary_sorted_and_real(sys in arb_system(), b in -2.0f64..2.0) {
        let es = eigensystem(&sys, b).unwrap();
        prop_assert!(es.unitarity_error() < 1e-10);
        prop_assert!(es.energies().windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = es.energies().iter().sum();
        prop_assert!(sum.abs() < 1.0 + 1e-12 * sys.hyperfine().abs());
        let mut labels = es.labels().to_vec();
        labels.sort();
        labels.dedup();
        prop_assert_eq!(labels.len(), sys.dim());
    }

    #[test]
    fn levels_move_continuously(sys in arb_system(), b in -1.0f64..1.0) {
        let step = 1e-6;
        let e0 = eigensystem(&sys, b).unwrap();
        let e1 = e0.continue_to(b + step, step).unwrap();
        let bound = (sys.electron_gamma().abs() + sys.nuclear_gamma().abs()) * step + 1.0;
        for (x, y) in e0.energies().iter().zip(e1.energies()) {
            prop_assert!((x - y).abs() <= bound, "{} > {}", (x - y).abs(), bound);
        }
    }

    #[test]
    fn label_continuation_is_involutive(sys in arb_system(), b_max in 0.01f64..2.0) {
        let zero = eigensystem(&sys, 0.0).unwrap();
        let back = zero
            .continue_to(b_max, 0.01 * b_max)
            .unwrap()
            .continue_to(0.0, 0.01 * b_max)
            .unwrap();
        if sys.hyperfine().abs() > 1e6 {
            for l in sys.labels() {
                let a = zero.states().column(zero.level_index(l).unwrap()).into_owned();
                let c = back.states().column(back.level_index(l).unwrap()).into_owned();
                prop_assert!((a.adjoint() * c)[(0, 0)].norm() > 0.99);
            }
        }
    }
}
