use dicke::banded::SymmetricBandedMatrix;
use dicke::eigensolver::{eigh_dense, eigh_hermitian, eigh_lowest, eigvalsh, Eigh, DEFAULT_RESIDUAL_TOL};
use dicke::entanglement::{reduce_to_density, spin_expectations};
use dicke::hamiltonian::{build_parity_hamiltonian, ModelParams};
use dicke::hilbert::{Parity, ParityBasis};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn to_dense(a: &SymmetricBandedMatrix) -> DMatrix<f64> {
    let n = a.dimension();
    let b = a.half_bandwidth();
    DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) <= b { a.get(i, j) } else { 0.0 })
}

fn model() -> impl Strategy<Value = (ModelParams, Parity)> {
    (
        0.3..2.0f64,
        0.0..2.0f64,
        0.0..4.0f64,
        prop::array::uniform3(-0.4..0.4f64),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(w, w0, g, dip, variant, positive)| {
            let base = if variant { ModelParams::variant(w, w0, g) } else { ModelParams::dicke(w, w0, g) };
            let parity = if positive { Parity::Positive } else { Parity::Negative };
            (base.with_dipole(dip), parity)
        })
}

fn random_band() -> impl Strategy<Value = SymmetricBandedMatrix> {
    (1usize..60, 0usize..8).prop_flat_map(|(n, b)| {
        let b = b.min(n - 1);
        prop::collection::vec(-1.0..1.0f64, n * (b + 1)).prop_map(move |vals| {
            let mut m = SymmetricBandedMatrix::zeros(n, b);
            for i in 0..n {
                for d in 0..=b.min(n - 1 - i) {
                    m.set(i, i + d, vals[i * (b + 1) + d]);
                }
            }
            m
        })
    })
}

fn random_hermitian() -> impl Strategy<Value = DMatrix<Complex64>> {
    (1usize..12).prop_flat_map(|n| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
            let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(v[i * n + j].0, v[i * n + j].1));
            (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
        })
    })
}

/// Real image `[[A, −B], [B, A]]` of `A + iB`; every eigenvalue is doubled.
fn embed(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn dense_routes_reconstruct_degenerate_input(h in random_hermitian()) {
        let n = h.nrows();
        let c = eigh_hermitian(&h).unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, c.eigenvalues.iter().map(|&v| Complex64::new(v, 0.0))));
        let rec = &c.eigenvectors * d * c.eigenvectors.adjoint();
        prop_assert!((rec - &h).norm() <= 1e-12);
        let r = eigh_dense(&embed(&h)).unwrap();
        let rec = &r.eigenvectors * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(r.eigenvalues.clone())) * r.eigenvectors.transpose();
        prop_assert!((rec - embed(&h)).norm() <= 1e-12);
        for k in 0..n {
            prop_assert!((r.eigenvalues[2 * k] - c.eigenvalues[k]).abs() <= 1e-12);
            prop_assert!((r.eigenvalues[2 * k + 1] - c.eigenvalues[k]).abs() <= 1e-12);
        }
    }

    #[test]
    fn banded_spectrum_matches_dense(m in random_band()) {
        let ours = m.eigh().unwrap();
        let reference = eigh_dense(&to_dense(&m)).unwrap();
        let scale = reference.eigenvalues.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for (a, b) in ours.eigenvalues.iter().zip(&reference.eigenvalues) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
        prop_assert!(ours.max_relative_residual(&m) <= 1e-12);
        prop_assert!(ours.orthonormality_error() <= 1e-12);
    }

    #[test]
    fn model_eigenpairs_are_accurate((p, parity) in model(), rungs in 4usize..40) {
        let basis = ParityBasis::new(parity, 4 * rungs).unwrap();
        let h = build_parity_hamiltonian(&p, &basis).unwrap();
        let count = basis.len().min(24);
        let s = eigh_lowest(&h, count, DEFAULT_RESIDUAL_TOL).unwrap();
        prop_assert!(s.max_relative_residual(&h) <= 1e-12);
        prop_assert!(s.orthonormality_error() <= 1e-12);
        let all = eigvalsh(&h).unwrap();
        prop_assert!(all.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(&all[..count], &s.eigenvalues[..]);
    }

    #[test]
    fn eigenvalues_decrease_with_truncation((p, parity) in model(), rungs in 2usize..30) {
        let small = eigvalsh(&build_parity_hamiltonian(&p, &ParityBasis::new(parity, 4 * rungs).unwrap()).unwrap()).unwrap();
        let large = eigvalsh(&build_parity_hamiltonian(&p, &ParityBasis::new(parity, 4 * rungs + 4).unwrap()).unwrap()).unwrap();
        let scale = small.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for (k, s) in small.iter().enumerate() {
            prop_assert!(large[k] <= s + 1e-12 * scale);
            prop_assert!(large[k + 4] >= s - 1e-12 * scale);
        }
    }

    #[test]
    fn transverse_spin_vanishes_on_eigenstates((p, parity) in model(), rungs in 4usize..30) {
        let basis = ParityBasis::new(parity, 4 * rungs).unwrap();
        let h = build_parity_hamiltonian(&p, &basis).unwrap();
        let s = eigh_lowest(&h, 12, DEFAULT_RESIDUAL_TOL).unwrap();
        for k in 0..s.len() {
            let rho = reduce_to_density(s.eigenvector(k), &basis).unwrap();
            let [sx, sy, _] = spin_expectations(&rho);
            prop_assert!(sx.abs() <= 1e-14 && sy.abs() <= 1e-14);
        }
    }
}

#[test]
fn sign_convention_is_deterministic() {
    let p = ModelParams::dicke(1.0, 0.9, 1.7).with_dipole([0.05, 0.1, -0.2]);
    let basis = ParityBasis::new(Parity::Negative, 200).unwrap();
    let h = build_parity_hamiltonian(&p, &basis).unwrap();
    let a = eigh_lowest(&h, 40, DEFAULT_RESIDUAL_TOL).unwrap();
    let b = eigh_lowest(&h, 40, DEFAULT_RESIDUAL_TOL).unwrap();
    assert_eq!(a.eigenvectors, b.eigenvectors);
    for k in 0..a.len() {
        let v = a.eigenvector(k);
        let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lead = v.iter().find(|x| x.abs() >= max * (1.0 - 1e-10)).unwrap();
        assert!(*lead > 0.0);
    }
}
