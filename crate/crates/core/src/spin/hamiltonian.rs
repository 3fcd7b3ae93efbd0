use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ProductState, SpinSystem};
use crate::error::ensure;
use crate::Result;

/// Product basis |m_S, m_I⟩ in matrix order: m_S = +1/2 block first, m_I
/// descending from +I within each block.
pub(crate) fn product_basis(sys: &SpinSystem) -> Vec<ProductState> {
    let two_i = sys.two_i() as i32;
    [1, -1]
        .into_iter()
        .flat_map(|two_ms| {
            (0..=two_i).map(move |k| ProductState {
                two_ms,
                two_mi: two_i - 2 * k,
            })
        })
        .collect()
}

/// Diagonal of F_z = S_z + I_z in the product basis.
pub(crate) fn fz_diagonal(sys: &SpinSystem) -> Vec<f64> {
    product_basis(sys)
        .iter()
        .map(|p| 0.5 * (p.two_ms + p.two_mi) as f64)
        .collect()
}

/// S·I in the product basis.
pub(crate) fn spin_dot(sys: &SpinSystem) -> DMatrix<Complex64> {
    let basis = product_basis(sys);
    let n = basis.len();
    let i = sys.nuclear_spin();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (row, p) in basis.iter().enumerate() {
        let ms = 0.5 * p.two_ms as f64;
        let mi = 0.5 * p.two_mi as f64;
        m[(row, row)] = Complex64::new(ms * mi, 0.0);
        // (S+ I- + S- I+)/2 connects |−1/2, m_I⟩ and |+1/2, m_I − 1⟩.
        if p.two_ms == -1 && p.two_mi > -(sys.two_i() as i32) {
            let target = ProductState {
                two_ms: 1,
                two_mi: p.two_mi - 2,
            };
            let col = basis.iter().position(|q| *q == target).unwrap();
            let v = 0.5 * (i * (i + 1.0) - mi * (mi - 1.0)).sqrt();
            m[(col, row)] = Complex64::new(v, 0.0);
            m[(row, col)] = Complex64::new(v, 0.0);
        }
    }
    m
}

/// Hamiltonian in Hz at field `field` (T) along z, in the product basis.
pub fn build_hamiltonian(sys: &SpinSystem, field: f64) -> Result<DMatrix<Complex64>> {
    ensure!(field.is_finite(), "magnetic field must be finite, got {field}");
    let mut h = spin_dot(sys) * Complex64::new(sys.hyperfine(), 0.0);
    let ge = sys.electron_gamma() * field;
    let gn = sys.nuclear_gamma() * field;
    for (k, p) in product_basis(sys).iter().enumerate() {
        h[(k, k)] += Complex64::new(ge * 0.5 * p.two_ms as f64 - gn * 0.5 * p.two_mi as f64, 0.0);
    }
    Ok(h)
}
