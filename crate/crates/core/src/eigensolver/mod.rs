//! Symmetric eigensolvers and the truncation-convergence protocol.
//!
//! Banded matrices go through an authored band-to-tridiagonal reduction,
//! implicit QL and inverse iteration. Dense matrices (real or complex
//! Hermitian) use nalgebra's symmetric eigensolver.
//!
//! All eigenvalues are returned ascending. Each eigenvector is normalized so
//! that its largest-magnitude component is real and positive (first such
//! component on ties).

mod band;
mod converge;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::banded::SymmetricBandedMatrix;
use crate::error::{Error, Result};

pub use band::{tridiagonal_eigenvalues, tridiagonalize};
pub use converge::{
    compare_truncations, converge, write_spectrum_csv, ConvergedSpectrum, ConvergenceOptions,
    TruncationComparison,
};

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;

/// Matrix-vector product with a symmetric operator.
pub trait SymmetricOperator {
    fn dimension(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// Any upper bound on the spectral norm.
    fn norm_bound(&self) -> f64;
}

impl SymmetricOperator for SymmetricBandedMatrix {
    fn dimension(&self) -> usize {
        SymmetricBandedMatrix::dimension(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_into(x, y)
    }

    fn norm_bound(&self) -> f64 {
        self.norm_inf()
    }
}

impl SymmetricOperator for DMatrix<f64> {
    fn dimension(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let v = self * DVector::from_column_slice(x);
        y.copy_from_slice(v.as_slice());
    }

    fn norm_bound(&self) -> f64 {
        self.row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Ascending eigenvalues with orthonormal eigenvectors (possibly only the
/// lowest few).
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// `dimension × eigenvalues.len()`, one eigenvector per column.
    pub eigenvectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn dimension(&self) -> usize {
        self.eigenvectors.nrows()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        let n = self.dimension();
        &self.eigenvectors.as_slice()[k * n..(k + 1) * n]
    }

    /// `max_n ‖H v_n − λ_n v_n‖ / ‖H‖`.
    pub fn max_relative_residual<M: SymmetricOperator>(&self, h: &M) -> f64 {
        let n = self.dimension();
        let norm = h.norm_bound().max(f64::MIN_POSITIVE);
        let mut hv = vec![0.0; n];
        (0..self.len())
            .map(|k| {
                let v = self.eigenvector(k);
                h.apply(v, &mut hv);
                let lambda = self.eigenvalues[k];
                hv.iter()
                    .zip(v)
                    .map(|(a, b)| (a - lambda * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
                    / norm
            })
            .fold(0.0, f64::max)
    }

    /// `max_{m,n} |⟨v_m|v_n⟩ − δ_mn|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.eigenvectors.transpose() * &self.eigenvectors;
        let mut worst = 0.0f64;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - expected).abs());
            }
        }
        worst
    }
}

/// Ascending eigenvalues with unit eigenvectors of a complex Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

pub trait Eigh {
    /// Full eigendecomposition.
    fn eigh(&self) -> Result<Spectrum>;
}

impl Eigh for SymmetricBandedMatrix {
    fn eigh(&self) -> Result<Spectrum> {
        eigh_lowest(self, self.dimension(), DEFAULT_RESIDUAL_TOL)
    }
}

impl Eigh for DMatrix<f64> {
    fn eigh(&self) -> Result<Spectrum> {
        eigh_dense(self)
    }
}

fn check_finite(a: &SymmetricBandedMatrix) -> Result<()> {
    match a.first_non_finite() {
        Some((i, j)) => Err(Error::NonFinite(i, j)),
        None => Ok(()),
    }
}

/// All eigenvalues of a banded matrix, ascending.
pub fn eigvalsh(a: &SymmetricBandedMatrix) -> Result<Vec<f64>> {
    check_finite(a)?;
    let (mut d, mut e) = tridiagonalize(a);
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// The lowest `count` eigenpairs of a banded matrix.
pub fn eigh_lowest(a: &SymmetricBandedMatrix, count: usize, residual_tol: f64) -> Result<Spectrum> {
    let values = eigvalsh(a)?;
    eigh_with_values(a, values, count, residual_tol)
}

pub(crate) fn eigh_with_values(
    a: &SymmetricBandedMatrix,
    mut values: Vec<f64>,
    count: usize,
    residual_tol: f64,
) -> Result<Spectrum> {
    let n = a.dimension();
    values.truncate(count.min(n));
    let mut data = band::inverse_iteration(a, &values, residual_tol)?;
    for col in data.chunks_mut(n.max(1)) {
        fix_sign(col);
    }
    Ok(Spectrum {
        eigenvectors: DMatrix::from_vec(n, values.len(), data),
        eigenvalues: values,
    })
}

/// Index of the first component within a relative `1e−10` of the largest
/// magnitude, so near-ties resolve the same way on every platform.
fn leading_index<I: Iterator<Item = f64> + Clone>(mags: I) -> usize {
    let best = mags.clone().fold(0.0, f64::max);
    mags.into_iter().position(|m| m >= best * (1.0 - 1e-10)).unwrap_or(0)
}

fn fix_sign(v: &mut [f64]) {
    let k = leading_index(v.iter().map(|x| x.abs()));
    if v.get(k).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    order
}

/// Dense real symmetric eigendecomposition.
pub fn eigh_dense(a: &DMatrix<f64>) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::InvalidParameter("matrix is not square".into()));
    }
    if let Some(k) = a.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(k % a.nrows(), k / a.nrows()));
    }
    let n = a.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(a.clone(), f64::EPSILON, 0)
        .ok_or(Error::NoConvergence(0))?;
    let order = sorted_order(eig.eigenvalues.as_slice());
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let mut col: Vec<f64> = eig.eigenvectors.column(src).iter().copied().collect();
        fix_sign(&mut col);
        vectors.set_column(k, &DVector::from_vec(col));
    }
    Ok(Spectrum {
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        eigenvectors: vectors,
    })
}

/// Dense complex Hermitian eigendecomposition.
pub fn eigh_hermitian(a: &DMatrix<Complex64>) -> Result<HermitianSpectrum> {
    if !a.is_square() {
        return Err(Error::InvalidParameter("matrix is not square".into()));
    }
    if let Some(k) = a.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite(k % a.nrows(), k / a.nrows()));
    }
    let n = a.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(a.clone(), f64::EPSILON, 0)
        .ok_or(Error::NoConvergence(0))?;
    let order = sorted_order(eig.eigenvalues.as_slice());
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let lead = col[leading_index(col.iter().map(|z| z.norm()))];
        let phase = if lead.norm() > 0.0 { lead.conj() / lead.norm() } else { Complex64::new(1.0, 0.0) };
        vectors.set_column(k, &(col * phase));
    }
    Ok(HermitianSpectrum {
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        eigenvectors: vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_parity_hamiltonian, ModelParams};
    use crate::hilbert::{Parity, ParityBasis};

    #[test]
    fn diagonal_input() {
        let mut m = SymmetricBandedMatrix::zeros(3, 1);
        m.set(0, 0, 3.0);
        m.set(1, 1, 1.0);
        m.set(2, 2, 2.0);
        let s = m.eigh().unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!((&s.eigenvectors - expected).abs().max() < 1e-14);
    }

    #[test]
    fn two_by_two_flip() {
        let mut m = SymmetricBandedMatrix::zeros(2, 1);
        m.set(0, 1, 1.0);
        let s = m.eigh().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-15);
        // largest component positive; first on ties
        assert!((s.eigenvector(0)[0] - h).abs() < 1e-14 && (s.eigenvector(0)[1] + h).abs() < 1e-14);
        assert!((s.eigenvector(1)[0] - h).abs() < 1e-14 && (s.eigenvector(1)[1] - h).abs() < 1e-14);

        let d = eigh_dense(&m.to_dense()).unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!(d.eigenvector(0)[0] > 0.0);
    }

    #[test]
    fn decoupled_model_closed_form() {
        let basis = ParityBasis::new(Parity::Positive, 8).unwrap();
        let h = build_parity_hamiltonian(&ModelParams::dicke(1.0, 1.0, 0.0), &basis).unwrap();
        let s = h.eigh().unwrap();
        let mut expected: Vec<f64> = basis
            .states()
            .iter()
            .map(|st| st.photon as f64 + st.qubits.sz())
            .collect();
        expected.sort_by(f64::total_cmp);
        assert_eq!(s.eigenvalues, expected);
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = SymmetricBandedMatrix::zeros(3, 1);
        m.set(2, 1, f64::NAN);
        assert!(matches!(m.eigh(), Err(Error::NonFinite(2, 1))));
        let d = DMatrix::from_element(2, 2, f64::INFINITY);
        assert!(matches!(eigh_dense(&d), Err(Error::NonFinite(0, 0))));
    }

    #[test]
    fn banded_matches_dense_on_model() {
        let basis = ParityBasis::new(Parity::Negative, 64).unwrap();
        let params = ModelParams::dicke(1.0, 0.7, 1.3).with_dipole([0.1, -0.2, 0.05]);
        let h = build_parity_hamiltonian(&params, &basis).unwrap();
        let s = h.eigh().unwrap();
        let d = eigh_dense(&h.to_dense()).unwrap();
        for k in 0..64 {
            assert!((s.eigenvalues[k] - d.eigenvalues[k]).abs() < 1e-11);
        }
        assert!(s.max_relative_residual(&h) < 1e-13);
        assert!(s.orthonormality_error() < 1e-12);
    }

    #[test]
    fn hermitian_phase_convention() {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        let s = eigh_hermitian(&a).unwrap();
        assert!((s.eigenvalues[0]).abs() < 1e-14 && (s.eigenvalues[1] - 2.0).abs() < 1e-14);
        for k in 0..2 {
            let col = s.eigenvectors.column(k);
            let residual = &a * col - col * Complex64::new(s.eigenvalues[k], 0.0);
            assert!(residual.norm() < 1e-14);
            assert!(col[0].im.abs() < 1e-15 && col[0].re > 0.0);
        }
    }
}
