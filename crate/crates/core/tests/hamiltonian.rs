use dicke::hamiltonian::{
    build_composite_hamiltonian, build_dense_hamiltonian, build_parity_hamiltonian, second_qubit_rotation,
    EnvironmentMode, EnvironmentParams, ModelParams,
};
use dicke::hilbert::{Parity, ParityBasis};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

type M = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn eye(n: usize) -> M {
    M::identity(n, n)
}

fn annihilate(n: usize) -> M {
    M::from_fn(n, n, |i, j| if j == i + 1 { c((j as f64).sqrt()) } else { c(0.0) })
}

// Pauli matrices with |e⟩ first
fn pauli() -> [M; 3] {
    let i = Complex64::new(0.0, 1.0);
    [
        M::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        M::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]),
        M::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
    ]
}

fn kron3(a: &M, b: &M, d: &M) -> M {
    a.kronecker(b).kronecker(d)
}

/// Kronecker-product assembly of the two-qubit Hamiltonians.
fn oracle(p: &ModelParams, n: usize) -> M {
    let a = annihilate(n);
    let x = &a + a.adjoint();
    let num = a.adjoint() * &a;
    let [sx, sy, sz] = pauli();
    let i2 = eye(2);
    let i_n = eye(n);
    let variant = p.model == dicke::hamiltonian::Model::Variant;
    let sign2 = if variant { -1.0 } else { 1.0 };
    let mut h = kron3(&num, &i2, &i2) * c(p.omega);
    h += (kron3(&i_n, &sz, &i2) + kron3(&i_n, &i2, &sz) * c(sign2)) * c(p.omega0 / 2.0);
    h += (kron3(&x, &sx, &i2) + kron3(&x, &i2, &sx)) * c(p.g / 2.0);
    h += (kron3(&i_n, &sx, &i2) + kron3(&i_n, &i2, &sx)) * c(p.drive_x / 2.0);
    h += (kron3(&i_n, &sy, &i2) + kron3(&i_n, &i2, &sy)) * c(p.drive_y / 2.0);
    for (s, d) in [&sx, &sy, &sz].into_iter().zip(p.dipole) {
        h += kron3(&i_n, s, s) * c(d / 4.0);
    }
    h
}

fn max_abs(m: &M) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn params() -> impl Strategy<Value = ModelParams> {
    (
        0.2..2.0f64,
        0.0..2.0f64,
        0.0..3.0f64,
        -0.5..0.5f64,
        -0.5..0.5f64,
        prop::array::uniform3(-0.5..0.5f64),
        any::<bool>(),
    )
        .prop_map(|(w, w0, g, dx, dy, dip, variant)| {
            let base = if variant { ModelParams::variant(w, w0, g) } else { ModelParams::dicke(w, w0, g) };
            base.with_drive(dx, dy).with_dipole(dip)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dense_matches_kronecker_oracle(p in params(), n in 2usize..7) {
        let h = build_dense_hamiltonian(&p, n, 2).unwrap();
        prop_assert!(max_abs(&(&h - oracle(&p, n))) <= 1e-14);
        prop_assert_eq!(&h, &h.adjoint());
    }

    #[test]
    fn rotation_maps_dicke_to_variant(w in 0.2..2.0f64, w0 in 0.0..2.0f64, g in 0.0..3.0f64, n in 2usize..9) {
        let h1 = build_dense_hamiltonian(&ModelParams::dicke(w, w0, g), n, 2).unwrap();
        let h2 = build_dense_hamiltonian(&ModelParams::variant(w, w0, g), n, 2).unwrap();
        let r = second_qubit_rotation(n).unwrap();
        prop_assert!(max_abs(&(&r * h1 * r.adjoint() - h2)) <= 1e-13);
    }

    #[test]
    fn no_cross_parity_elements(p in params(), rungs in 2usize..6) {
        let p = p.with_drive(0.0, 0.0);
        let pos = ParityBasis::new(Parity::Positive, 4 * rungs).unwrap();
        let neg = ParityBasis::new(Parity::Negative, 4 * rungs).unwrap();
        let n = pos.max_photon().max(neg.max_photon()) + 1;
        let h = build_dense_hamiltonian(&p, n, 2).unwrap();
        for i in 0..pos.len() {
            for j in 0..neg.len() {
                prop_assert_eq!(h[(pos.dense_index(i), neg.dense_index(j))], c(0.0));
            }
        }
    }

    #[test]
    fn banded_is_dense_projection(p in params(), rungs in 1usize..8, positive in any::<bool>()) {
        let p = p.with_drive(0.0, 0.0);
        let parity = if positive { Parity::Positive } else { Parity::Negative };
        let basis = ParityBasis::new(parity, 4 * rungs).unwrap();
        let banded = build_parity_hamiltonian(&p, &basis).unwrap();
        let dense = build_dense_hamiltonian(&p, basis.max_photon() + 1, 2).unwrap();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let d = dense[(basis.dense_index(i), basis.dense_index(j))];
                prop_assert!(d.im == 0.0);
                let b = if i.abs_diff(j) <= banded.half_bandwidth() { banded.get(i, j) } else { 0.0 };
                prop_assert!((d.re - b).abs() <= 1e-15, "({}, {}): dense {} banded {}", i, j, d.re, b);
            }
        }
    }
}

#[test]
fn decoupled_dense_spectrum() {
    let h = build_dense_hamiltonian(&ModelParams::dicke(1.0, 1.0, 0.0), 2, 2).unwrap();
    let mut got: Vec<f64> = (0..8).map(|k| h[(k, k)].re).collect();
    got.sort_by(f64::total_cmp);
    assert_eq!(got, vec![-1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
    assert!(max_abs(&(&h - M::from_diagonal(&h.diagonal()))) == 0.0);
}

#[test]
fn composite_without_environment_is_dense() {
    let p = ModelParams::dicke(1.0, 0.9, 0.7).with_drive(0.2, 0.1).with_dipole([0.1, 0.2, 0.3]);
    let a = build_composite_hamiltonian(&p, &EnvironmentParams::default(), 5).unwrap();
    let b = build_dense_hamiltonian(&p, 5, 2).unwrap();
    assert_eq!(a, b);
}

#[test]
fn composite_matches_kronecker_oracle() {
    let (n, nq, nf) = (3, 3, 2);
    let qm = EnvironmentMode { frequency: 0.7, coupling: 0.4, truncation: nq };
    let fm = EnvironmentMode { frequency: 1.3, coupling: 0.6, truncation: nf };
    let env = EnvironmentParams { qubit_modes: vec![qm], field_modes: vec![fm] };
    let p = ModelParams::dicke(1.0, 0.8, 1.1).with_dipole([0.1, 0.1, 0.1]);
    let h = build_composite_hamiltonian(&p, &env, n).unwrap();

    // ordering: field, qubit 1, qubit 2, qubit bath, field bath
    let sys = oracle(&p, n);
    let (ib, ic) = (eye(nq), eye(nf));
    let b = annihilate(nq);
    let cc = annihilate(nf);
    let a = annihilate(n);
    let [sx, ..] = pauli();
    let sx_total = (kron3(&eye(n), &sx, &eye(2)) + kron3(&eye(n), &eye(2), &sx)) * c(0.5);
    let x_field = kron3(&(&a + a.adjoint()), &eye(2), &eye(2));
    let mut expect = sys.kronecker(&ib).kronecker(&ic);
    expect += eye(4 * n).kronecker(&(b.adjoint() * &b)).kronecker(&ic) * c(qm.frequency);
    expect += sx_total.kronecker(&(&b + b.adjoint())).kronecker(&ic) * c(qm.coupling);
    expect += eye(4 * n).kronecker(&ib).kronecker(&(cc.adjoint() * &cc)) * c(fm.frequency);
    expect += x_field.kronecker(&ib).kronecker(&(&cc + cc.adjoint())) * c(fm.coupling);
    assert!(max_abs(&(&h - expect)) <= 1e-14);
}
