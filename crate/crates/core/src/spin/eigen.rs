use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::hamiltonian::{build_hamiltonian, fz_diagonal, product_basis, spin_dot};
use super::{LevelLabel, ProductState, SpinSystem, TransitionPair};
use crate::error::ensure;
use crate::{Error, Result};

/// Fraction of the sweep span allowed per label-continuation step.
pub(crate) const CONTINUATION_FRACTION: f64 = 0.01;

/// Diagonalised Hamiltonian at one field, with levels labelled by the
/// zero-field |F, m_F⟩ state they connect to adiabatically.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    system: SpinSystem,
    field: f64,
    energies: Vec<f64>,
    states: DMatrix<Complex64>,
    labels: Vec<LevelLabel>,
}

/// Eigensystem at `field` with labels continued from B = 0 in steps of at
/// most 1% of |field|.
pub fn eigensystem(sys: &SpinSystem, field: f64) -> Result<EigenSystem> {
    ensure!(field.is_finite(), "magnetic field must be finite, got {field}");
    let zero = EigenSystem::zero_field(sys)?;
    if field == 0.0 {
        return Ok(zero);
    }
    zero.continue_to(field, CONTINUATION_FRACTION * field.abs())
}

impl EigenSystem {
    /// Zero-field eigensystem in the total-spin basis.
    pub fn zero_field(sys: &SpinSystem) -> Result<Self> {
        let (energies, states) = diagonalize(sys, 0.0)?;
        let fz = fz_diagonal(sys);
        let f2 = total_spin_squared(sys);
        let labels = (0..energies.len())
            .map(|k| {
                let col = states.column(k);
                let mf = expectation_diag(&fz, col.as_slice());
                let f2_exp = (col.adjoint() * &f2 * col)[(0, 0)].re;
                let f = 0.5 * (-1.0 + (1.0 + 4.0 * f2_exp).sqrt());
                LevelLabel {
                    two_f: (2.0 * f).round() as u32,
                    two_mf: (2.0 * mf).round() as i32,
                }
            })
            .collect();
        Ok(Self {
            system: *sys,
            field: 0.0,
            energies,
            states,
            labels,
        })
    }

    /// Re-diagonalises at `field`, carrying labels along by maximal eigenvector
    /// overlap between consecutive points no more than `max_step` apart.
    pub fn continue_to(&self, field: f64, max_step: f64) -> Result<Self> {
        ensure!(field.is_finite(), "magnetic field must be finite, got {field}");
        ensure!(max_step > 0.0, "continuation step must be positive");
        let span = field - self.field;
        let n_steps = ((span.abs() / max_step).ceil() as usize).max(1);
        let mut current = self.clone();
        for k in 1..=n_steps {
            let b = if k == n_steps {
                field
            } else {
                self.field + span * k as f64 / n_steps as f64
            };
            current = current.step_to(b)?;
        }
        Ok(current)
    }

    fn step_to(&self, field: f64) -> Result<Self> {
        let (energies, states) = diagonalize(&self.system, field)?;
        let labels = assign_by_overlap(&self.states, &self.labels, &states);
        Ok(Self {
            system: self.system,
            field,
            energies,
            states,
            labels,
        })
    }

    pub fn system(&self) -> &SpinSystem {
        &self.system
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    /// Level energies in Hz, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvectors as columns, in the |m_S, m_I⟩ product basis.
    pub fn states(&self) -> &DMatrix<Complex64> {
        &self.states
    }

    pub fn labels(&self) -> &[LevelLabel] {
        &self.labels
    }

    pub fn label_names(&self) -> Vec<String> {
        self.labels.iter().map(|l| self.system.label_name(*l)).collect()
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn level_index(&self, label: LevelLabel) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    pub fn energy(&self, label: LevelLabel) -> Result<f64> {
        self.level_index(label)
            .map(|k| self.energies[k])
            .ok_or_else(|| Error::UnknownLabel(self.system.label_name(label)))
    }

    /// |E_a − E_b| in Hz.
    pub fn frequency(&self, pair: TransitionPair) -> Result<f64> {
        Ok((self.energy(pair.b)? - self.energy(pair.a)?).abs())
    }

    /// Product state with the largest weight in level `k`, and that weight.
    pub fn dominant_product(&self, k: usize) -> (ProductState, f64) {
        let basis = product_basis(&self.system);
        let col = self.states.column(k);
        let (idx, w) = col
            .iter()
            .map(|z| z.norm_sqr())
            .enumerate()
            .fold((0, -1.0), |best, (i, w)| if w > best.1 { (i, w) } else { best });
        (basis[idx], w)
    }

    /// max |V†V − 1| over all entries.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        let g = self.states.adjoint() * &self.states;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

fn expectation_diag(diag: &[f64], v: &[Complex64]) -> f64 {
    diag.iter().zip(v).map(|(d, z)| d * z.norm_sqr()).sum()
}

/// F² = S² + I² + 2 S·I.
fn total_spin_squared(sys: &SpinSystem) -> DMatrix<Complex64> {
    let i = sys.nuclear_spin();
    let n = sys.dim();
    let scalar = 0.75 + i * (i + 1.0);
    spin_dot(sys) * Complex64::new(2.0, 0.0) + DMatrix::identity(n, n) * Complex64::new(scalar, 0.0)
}

/// Dense diagonalisation with energies ascending. Degenerate subspaces are
/// rotated onto eigenvectors of F_z (plus F² at zero field), which commute
/// with H, and every column is phased so its largest entry is real positive.
fn diagonalize(sys: &SpinSystem, field: f64) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let h = build_hamiltonian(sys, field)?;
    let n = h.nrows();
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut energies: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut states = DMatrix::<Complex64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        states.set_column(dst, &eig.eigenvectors.column(src));
    }

    let commuting = {
        let mut c = DMatrix::<Complex64>::zeros(n, n);
        for (k, m) in fz_diagonal(sys).into_iter().enumerate() {
            c[(k, k)] = Complex64::new(m, 0.0);
        }
        if field == 0.0 {
            let w = sys.nuclear_spin() * 2.0 + 2.0;
            c += total_spin_squared(sys) * Complex64::new(w, 0.0);
        }
        c
    };

    let scale = energies.iter().fold(1.0_f64, |m, e| m.max(e.abs()));
    let tol = 1e-9 * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && energies[end] - energies[end - 1] <= tol {
            end += 1;
        }
        if end - start > 1 {
            let block = states.columns(start, end - start).into_owned();
            let reduced = block.adjoint() * &commuting * &block;
            let sub = SymmetricEigen::new(reduced);
            let k = end - start;
            let mut sub_order: Vec<usize> = (0..k).collect();
            sub_order.sort_by(|&a, &b| sub.eigenvalues[a].total_cmp(&sub.eigenvalues[b]));
            let rotated = &block * &sub.eigenvectors;
            let mean = energies[start..end].iter().sum::<f64>() / k as f64;
            for (j, &src) in sub_order.iter().enumerate() {
                states.set_column(start + j, &rotated.column(src));
                energies[start + j] = mean;
            }
        }
        start = end;
    }

    for k in 0..n {
        let mut col = states.column_mut(k);
        let pivot = col
            .iter()
            .copied()
            .fold(Complex64::new(0.0, 0.0), |best, z| if z.norm() > best.norm() { z } else { best });
        let norm = col.norm();
        let phase = pivot.conj() / pivot.norm() / norm;
        col *= phase;
    }
    Ok((energies, states))
}

fn assign_by_overlap(
    prev: &DMatrix<Complex64>,
    prev_labels: &[LevelLabel],
    next: &DMatrix<Complex64>,
) -> Vec<LevelLabel> {
    let n = prev_labels.len();
    let overlaps = prev.adjoint() * next;
    // Quantised so near-equal overlaps fall back to energy order.
    let mut candidates: Vec<(i64, usize, usize)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let o = overlaps[(i, j)].norm_sqr();
            candidates.push((-(o * 1e9).round() as i64, j, i));
        }
    }
    candidates.sort_unstable();
    let mut taken_prev = vec![false; n];
    let mut out: Vec<Option<LevelLabel>> = vec![None; n];
    for (_, j, i) in candidates {
        if out[j].is_none() && !taken_prev[i] {
            out[j] = Some(prev_labels[i]);
            taken_prev[i] = true;
        }
    }
    out.into_iter().map(|l| l.expect("complete assignment")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{preset, presets, se77, SE77_HYPERFINE};

    #[test]
    fn se77_zero_field_labels() {
        let es = eigensystem(&se77(), 0.0).unwrap();
        assert_eq!(es.label_names(), ["S0", "T-", "T0", "T+"]);
        let a = SE77_HYPERFINE;
        assert!((es.energies()[0] + 0.75 * a).abs() < 1e-3);
        for e in &es.energies()[1..] {
            assert!((e - 0.25 * a).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_field_spectrum_for_general_spin() {
        for (_, sys) in presets() {
            let es = eigensystem(&sys, 0.0).unwrap();
            let i = sys.nuclear_spin();
            let a = sys.hyperfine();
            for (e, l) in es.energies().iter().zip(es.labels()) {
                let expect = if l.two_f > sys.two_i() { a * i / 2.0 } else { -a * (i + 1.0) / 2.0 };
                assert!((e - expect).abs() < 1e-6 * a.abs(), "{e} vs {expect}");
            }
        }
    }

    #[test]
    fn high_field_states_are_products() {
        let es = eigensystem(&se77(), 2.0).unwrap();
        let mut seen = Vec::new();
        for k in 0..es.dim() {
            let (p, w) = es.dominant_product(k);
            assert!(w > 0.99, "level {k} weight {w}");
            seen.push((es.label_names()[k].clone(), p.to_string()));
        }
        let find = |n: &str| seen.iter().find(|(l, _)| l == n).unwrap().1.clone();
        assert_eq!(find("T+"), "|↑⇑⟩");
        assert_eq!(find("T0"), "|↑⇓⟩");
        assert_eq!(find("S0"), "|↓⇑⟩");
        assert_eq!(find("T-"), "|↓⇓⟩");
    }

    #[test]
    fn unitary_eigenvectors() {
        for b in [0.0, 7e-5, 0.05, 1.75] {
            let es = eigensystem(&se77(), b).unwrap();
            assert!(es.unitarity_error() < 1e-10);
        }
        let es = eigensystem(&preset("33S").unwrap(), 0.0).unwrap();
        assert!(es.unitarity_error() < 1e-10);
    }

    #[test]
    fn round_trip_sweep_restores_labels() {
        let sys = preset("33S").unwrap();
        let zero = EigenSystem::zero_field(&sys).unwrap();
        let there = zero.continue_to(0.5, 0.005).unwrap();
        let back = there.continue_to(0.0, 0.005).unwrap();
        for l in sys.labels() {
            let a = zero.states().column(zero.level_index(l).unwrap()).into_owned();
            let b = back.states().column(back.level_index(l).unwrap()).into_owned();
            assert!((a.adjoint() * b)[(0, 0)].norm() > 0.999);
        }
    }

    #[test]
    fn pure_zeeman_labels_are_complete() {
        let sys = se77().with_hyperfine(0.0);
        let es = eigensystem(&sys, 0.1).unwrap();
        let mut labels = es.labels().to_vec();
        labels.sort();
        let mut all = sys.labels();
        all.sort();
        assert_eq!(labels, all);
    }
}
