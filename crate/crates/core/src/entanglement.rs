//! Reduced two-qubit states, Wootters concurrence, von Neumann entropies,
//! mutual information and the Mandel Q parameter of the field.
//!
//! Two-qubit matrices use the register order `ee, eg, ge, gg` (qubit 1 is
//! the most significant bit, `e = 0`).

use std::io::Write;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csvio;
use crate::eigensolver::ConvergedSpectrum;
use crate::error::{Error, Result};
use crate::hilbert::{to_bell, ParityBasis, QubitLabel};

const STATE_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;
const DENSITY_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as exact zeros (eigensolver noise floor).
const NOISE_FLOOR: f64 = 8.0 * f64::EPSILON;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Reduced qubit state of a parity eigenvector: an X block on
/// `{ee, gg}` ⊕ `{Ψ₊}` plus, for general vectors, a singlet block.
///
/// `r_psi` is the common value of `ρ_{ge,ge}`, `ρ_{eg,eg}` and `ρ_{ge,eg}`
/// carried by `Ψ₊`, so `Ψ₊` has weight `2·r_psi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XState {
    pub r_ee: f64,
    pub r_psi: f64,
    pub r_gg: f64,
    /// `ρ_{ee,gg}`.
    pub r_eg: Complex64,
    /// Weight of `Ψ₋`.
    pub r_sing: f64,
    /// `Ψ₊ Ψ₋*` coherence.
    pub r_mix: Complex64,
}

impl XState {
    /// A triplet-sector X-state (no singlet weight).
    pub fn new(r_ee: f64, r_psi: f64, r_gg: f64, r_eg: Complex64) -> Result<Self> {
        let x = XState {
            r_ee,
            r_psi,
            r_gg,
            r_eg,
            r_sing: 0.0,
            r_mix: c(0.0),
        };
        x.validate()?;
        Ok(x)
    }

    pub fn trace(&self) -> f64 {
        self.r_ee + 2.0 * self.r_psi + self.r_gg + self.r_sing
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidState(format!("{m}: {self:?}")));
        let all = [self.r_ee, self.r_psi, self.r_gg, self.r_sing, self.r_eg.re, self.r_eg.im];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("non-finite entry");
        }
        if [self.r_ee, self.r_psi, self.r_gg, self.r_sing].iter().any(|&v| v < -STATE_TOL) {
            return bad("negative population");
        }
        if (self.trace() - 1.0).abs() > STATE_TOL {
            return bad("trace differs from 1");
        }
        if self.r_ee * self.r_gg - self.r_eg.norm_sqr() < -STATE_TOL {
            return bad("outer block is not positive");
        }
        if 2.0 * self.r_psi * self.r_sing - self.r_mix.norm_sqr() < -STATE_TOL {
            return bad("Ψ block is not positive");
        }
        Ok(())
    }

    pub fn is_triplet(&self) -> bool {
        self.r_sing <= 1e-14 && self.r_mix.norm() <= 1e-14
    }

    /// Full `4 × 4` density matrix in register order.
    pub fn to_density(&self) -> Matrix4<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi_plus = [0.0, h, h, 0.0];
        let psi_minus = [0.0, -h, h, 0.0];
        let mut rho = Matrix4::zeros();
        rho[(0, 0)] = c(self.r_ee);
        rho[(3, 3)] = c(self.r_gg);
        rho[(0, 3)] = self.r_eg;
        rho[(3, 0)] = self.r_eg.conj();
        for i in 0..4 {
            for j in 0..4 {
                rho[(i, j)] += c(2.0 * self.r_psi * psi_plus[i] * psi_plus[j]
                    + self.r_sing * psi_minus[i] * psi_minus[j])
                    + self.r_mix * psi_plus[i] * psi_minus[j]
                    + self.r_mix.conj() * psi_minus[i] * psi_plus[j];
            }
        }
        rho
    }
}

fn check_normalized(v: &[f64]) -> Result<()> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

fn check_basis(v: &[f64], basis: &ParityBasis) -> Result<()> {
    if v.len() != basis.len() {
        return Err(Error::InvalidState(format!(
            "vector length {} does not match basis size {}",
            v.len(),
            basis.len()
        )));
    }
    check_normalized(v)
}

/// Trace out the field from a unit vector on `basis`.
pub fn reduce_to_qubits(v: &[f64], basis: &ParityBasis) -> Result<XState> {
    check_basis(v, basis)?;
    let mut x = XState {
        r_ee: 0.0,
        r_psi: 0.0,
        r_gg: 0.0,
        r_eg: c(0.0),
        r_sing: 0.0,
        r_mix: c(0.0),
    };
    for rung in v.chunks_exact(4) {
        let (ee, gg, ge, eg) = (rung[0], rung[1], rung[2], rung[3]);
        let (plus, minus) = to_bell(ge, eg);
        x.r_ee += ee * ee;
        x.r_gg += gg * gg;
        x.r_eg += ee * gg;
        x.r_psi += 0.5 * plus * plus;
        x.r_sing += minus * minus;
        x.r_mix += plus * minus;
    }
    Ok(x)
}

/// Reduced density matrix with no structural assumption.
pub fn reduce_to_density(v: &[f64], basis: &ParityBasis) -> Result<Matrix4<Complex64>> {
    check_basis(v, basis)?;
    let mut rho = Matrix4::zeros();
    let max_photon = basis.max_photon();
    let mut by_photon = vec![[0.0f64; 4]; max_photon + 1];
    for (amp, s) in v.iter().zip(basis.states()) {
        by_photon[s.photon][s.qubits.register_index()] = *amp;
    }
    for row in &by_photon {
        for i in 0..4 {
            for j in 0..4 {
                rho[(i, j)] += c(row[i] * row[j]);
            }
        }
    }
    Ok(rho)
}

/// Concurrence of a reduced state. Triplet-sector states use the closed
/// form; anything with singlet weight goes through [`concurrence_bruteforce`].
pub fn concurrence(x: &XState) -> Result<f64> {
    x.validate()?;
    if !x.is_triplet() {
        return concurrence_bruteforce(&x.to_density());
    }
    let a = (x.r_ee.max(0.0) * x.r_gg.max(0.0)).sqrt();
    let b = x.r_eg.norm();
    let mut eps = [2.0 * x.r_psi.max(0.0), 0.0, a + b, (a - b).abs()];
    eps.sort_by(|p, q| q.total_cmp(p));
    Ok((eps[0] - eps[1] - eps[2] - eps[3]).max(0.0))
}

fn validate_density(rho: &Matrix4<Complex64>) -> Result<()> {
    if rho.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::InvalidState("non-finite density matrix".into()));
    }
    if (rho - rho.adjoint()).norm() > DENSITY_TOL {
        return Err(Error::InvalidState("density matrix is not Hermitian".into()));
    }
    if (rho.trace() - c(1.0)).norm() > DENSITY_TOL {
        return Err(Error::InvalidState(format!("trace {} differs from 1", rho.trace())));
    }
    Ok(())
}

/// Eigenvalues and eigenvectors of a Hermitian matrix, with the
/// clipping rules applied: below `−tol` is an error, values under the noise
/// floor become exact zeros.
fn psd_eigen(m: DMatrix<Complex64>, tol: f64) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let eig = crate::eigensolver::eigh_hermitian(&m)?;
    let mut w = Vec::with_capacity(eig.eigenvalues.len());
    for &v in eig.eigenvalues.iter() {
        if v < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {v}")));
        }
        w.push(if v < NOISE_FLOOR { 0.0 } else { v });
    }
    Ok((w, eig.eigenvectors))
}

/// Wootters concurrence from a general `4 × 4` density matrix.
///
/// The `ε_i` are the singular values of `√ρ (σ_y⊗σ_y) √ρ*`, whose squares are
/// the eigenvalues of `ρ ρ̃`.
pub fn concurrence_bruteforce(rho: &Matrix4<Complex64>) -> Result<f64> {
    validate_density(rho)?;
    let (w, v) = psd_eigen(DMatrix::from_iterator(4, 4, rho.iter().copied()), DENSITY_TOL)?;
    let sqrt_w = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(4, w.iter().map(|x| c(x.sqrt()))));
    let sqrt_rho = &v * sqrt_w * v.adjoint();
    let yy = DMatrix::from_fn(4, 4, |i, j| if i + j == 3 { c(if i == 0 || i == 3 { -1.0 } else { 1.0 }) } else { c(0.0) });
    let a = &sqrt_rho * yy * sqrt_rho.map(|z| z.conj());
    let mut eps: Vec<f64> = a.singular_values().iter().copied().collect();
    eps.sort_by(|p, q| q.total_cmp(p));
    Ok((eps[0] - eps[1] - eps[2] - eps[3]).max(0.0))
}

/// Base-2 entropy of a Hermitian matrix; `0·log 0 = 0`.
pub fn von_neumann_entropy(rho: &DMatrix<Complex64>) -> Result<f64> {
    let (w, _) = psd_eigen(rho.clone(), STATE_TOL)?;
    Ok(w.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum())
}

/// Reduced state of qubit `keep` (0 or 1).
pub fn partial_trace(rho: &Matrix4<Complex64>, keep: usize) -> Matrix2<Complex64> {
    let mut out = Matrix2::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for k in 0..2 {
                let (i, j) = if keep == 0 { (2 * a + k, 2 * b + k) } else { (2 * k + a, 2 * k + b) };
                out[(a, b)] += rho[(i, j)];
            }
        }
    }
    out
}

/// `S(ρ₁) + S(ρ₂) − S(ρ)` in bits.
pub fn mutual_information(rho: &Matrix4<Complex64>) -> Result<f64> {
    validate_density(rho)?;
    let dyn4 = |m: &Matrix4<Complex64>| DMatrix::from_iterator(4, 4, m.iter().copied());
    let dyn2 = |m: Matrix2<Complex64>| DMatrix::from_iterator(2, 2, m.iter().copied());
    let total = von_neumann_entropy(&dyn4(rho))?;
    let s1 = von_neumann_entropy(&dyn2(partial_trace(rho, 0)))?;
    let s2 = von_neumann_entropy(&dyn2(partial_trace(rho, 1)))?;
    Ok((s1 + s2 - total).max(0.0))
}

pub fn mutual_information_x(x: &XState) -> Result<f64> {
    x.validate()?;
    mutual_information(&x.to_density())
}

/// `(⟨n²⟩ − ⟨n⟩²)/⟨n⟩ − 1` of the photon-number marginal.
pub fn mandel_q(v: &[f64], basis: &ParityBasis) -> Result<f64> {
    check_basis(v, basis)?;
    let (mut m1, mut m2) = (0.0, 0.0);
    for (amp, s) in v.iter().zip(basis.states()) {
        let p = amp * amp;
        let n = s.photon as f64;
        m1 += p * n;
        m2 += p * n * n;
    }
    mandel_q_from_moments(m1, m2)
}

pub fn mandel_q_from_moments(mean: f64, second: f64) -> Result<f64> {
    if mean <= f64::EPSILON {
        return Err(Error::VacuumState);
    }
    Ok((second - mean * mean) / mean - 1.0)
}

/// `⟨S_x⟩, ⟨S_y⟩, ⟨S_z⟩` on the qubit register.
pub fn spin_expectations(rho: &Matrix4<Complex64>) -> [f64; 3] {
    use crate::hamiltonian::ops::{spin_x, spin_y, spin_z};
    let id = DMatrix::<Complex64>::identity(2, 2);
    let rho = DMatrix::from_iterator(4, 4, rho.iter().copied());
    [spin_x(), spin_y(), spin_z()].map(|s| {
        let total = s.kronecker(&id) + id.kronecker(&s);
        (&rho * total).trace().re
    })
}

/// Weight of `Ψ₋` summed over photon numbers.
pub fn singlet_weight(v: &[f64], basis: &ParityBasis) -> f64 {
    let mut w = 0.0;
    for (rung, states) in v.chunks_exact(4).zip(basis.states().chunks_exact(4)) {
        debug_assert_eq!(states[2].qubits, QubitLabel::Ge);
        let (_, minus) = to_bell(rung[2], rung[3]);
        w += minus * minus;
    }
    w
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDiagnostics {
    pub index: usize,
    pub eigenvalue: f64,
    pub concurrence: f64,
    pub mutual_information: f64,
    /// `None` for a vacuum-only photon distribution.
    pub mandel_q: Option<f64>,
    pub sz: f64,
    pub singlet_weight: f64,
    pub x_state: XState,
}

pub fn diagnose_state(index: usize, eigenvalue: f64, v: &[f64], basis: &ParityBasis) -> Result<StateDiagnostics> {
    let x = reduce_to_qubits(v, basis)?;
    let rho = x.to_density();
    let mandel = match mandel_q(v, basis) {
        Ok(q) => Some(q),
        Err(Error::VacuumState) => None,
        Err(e) => return Err(e),
    };
    Ok(StateDiagnostics {
        index,
        eigenvalue,
        concurrence: concurrence(&x)?,
        mutual_information: mutual_information(&rho)?,
        mandel_q: mandel,
        sz: spin_expectations(&rho)[2],
        singlet_weight: x.r_sing,
        x_state: x,
    })
}

/// Diagnostics for every state of a converged spectrum (in parallel).
pub fn diagnose(c: &ConvergedSpectrum) -> Result<Vec<StateDiagnostics>> {
    let basis = c.basis();
    (0..c.spectrum.len())
        .into_par_iter()
        .map(|k| diagnose_state(k, c.spectrum.eigenvalues[k], c.spectrum.eigenvector(k), &basis))
        .collect()
}

/// Columns `index, eigenvalue, concurrence, mutual_information, mandel_q,
/// Sz_expectation, singlet_weight`; an undefined Mandel Q is left empty.
pub fn write_diagnostics_csv<W: Write>(out: W, rows: &[StateDiagnostics]) -> Result<()> {
    let mut w = csvio::writer_from(
        out,
        &[
            "index",
            "eigenvalue",
            "concurrence",
            "mutual_information",
            "mandel_q",
            "Sz_expectation",
            "singlet_weight",
        ],
    )?;
    for d in rows {
        w.write_record([
            d.index.to_string(),
            csvio::num(d.eigenvalue),
            csvio::num(d.concurrence),
            csvio::num(d.mutual_information),
            d.mandel_q.map(csvio::num).unwrap_or_default(),
            csvio::num(d.sz),
            csvio::num(d.singlet_weight),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Fraction of states with a defined, positive Mandel Q.
pub fn positive_mandel_fraction(rows: &[StateDiagnostics]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    rows.iter().filter(|d| d.mandel_q.is_some_and(|q| q > 0.0)).count() as f64 / rows.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{BasisState, Parity};

    fn basis() -> ParityBasis {
        ParityBasis::new(Parity::Positive, 16).unwrap()
    }

    fn unit(basis: &ParityBasis, entries: &[(BasisState, f64)]) -> Vec<f64> {
        let mut v = vec![0.0; basis.len()];
        for (s, a) in entries {
            v[basis.index_of(*s).unwrap()] = *a;
        }
        v
    }

    #[test]
    fn pure_singlet_reduces_to_singlet_weight() {
        let b = basis();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = unit(&b, &[(BasisState::new(5, QubitLabel::Ge), h), (BasisState::new(5, QubitLabel::Eg), -h)]);
        let x = reduce_to_qubits(&v, &b).unwrap();
        assert!((x.r_sing - 1.0).abs() < 1e-15);
        assert!(x.r_ee == 0.0 && x.r_gg == 0.0 && x.r_psi.abs() < 1e-16 && x.r_eg.norm() == 0.0);
        assert!((concurrence(&x).unwrap() - 1.0).abs() < 1e-12);
        assert!((singlet_weight(&v, &b) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_and_bell_reductions() {
        let b = basis();
        let v = unit(&b, &[(BasisState::new(0, QubitLabel::Ee), 1.0)]);
        let x = reduce_to_qubits(&v, &b).unwrap();
        assert_eq!(x.r_ee, 1.0);
        assert_eq!(concurrence(&x).unwrap(), 0.0);
        assert!(mutual_information_x(&x).unwrap().abs() < 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = unit(&b, &[(BasisState::new(0, QubitLabel::Ee), h), (BasisState::new(0, QubitLabel::Gg), h)]);
        let x = reduce_to_qubits(&v, &b).unwrap();
        assert!((x.r_ee - 0.5).abs() < 1e-15 && (x.r_gg - 0.5).abs() < 1e-15);
        assert!((x.r_eg.re - 0.5).abs() < 1e-15);
        assert!((concurrence(&x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized() {
        let b = basis();
        let v = unit(&b, &[(BasisState::new(0, QubitLabel::Ee), 0.9)]);
        assert!(matches!(reduce_to_qubits(&v, &b), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn closed_form_examples() {
        let x = XState::new(0.0, 0.5, 0.0, c(0.0)).unwrap();
        assert_eq!(concurrence(&x).unwrap(), 1.0);
        let x = XState::new(1.0, 0.0, 0.0, c(0.0)).unwrap();
        assert_eq!(concurrence(&x).unwrap(), 0.0);
        assert!(XState::new(0.5, 0.0, 0.5, c(0.6)).is_err());
        assert!(XState::new(0.5, 0.1, 0.5, c(0.0)).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = nalgebra::Vector4::new(c(0.0), c(-h), c(h), c(0.0));
        let pure = singlet * singlet.adjoint();
        assert!((concurrence_bruteforce(&pure).unwrap() - 1.0).abs() < 1e-12);
        let mixed = Matrix4::identity() * c(0.25);
        assert!(concurrence_bruteforce(&mixed).unwrap().abs() < 1e-12);
        let mut bad = mixed;
        bad[(0, 0)] = c(0.5);
        assert!(concurrence_bruteforce(&bad).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi_minus = nalgebra::Vector4::new(c(-h), c(0.0), c(0.0), c(h));
        assert!((mutual_information(&(phi_minus * phi_minus.adjoint())).unwrap() - 2.0).abs() < 1e-12);
        let mut gg = Matrix4::zeros();
        gg[(3, 3)] = c(1.0);
        assert!(mutual_information(&gg).unwrap().abs() < 1e-12);
        let mut classical = Matrix4::zeros();
        classical[(0, 0)] = c(0.5);
        classical[(3, 3)] = c(0.5);
        assert!((mutual_information(&classical).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_orders_qubits() {
        // |eg⟩: qubit 1 excited, qubit 2 ground
        let mut rho = Matrix4::zeros();
        rho[(1, 1)] = c(1.0);
        assert_eq!(partial_trace(&rho, 0)[(0, 0)], c(1.0));
        assert_eq!(partial_trace(&rho, 1)[(1, 1)], c(1.0));
    }

    #[test]
    fn mandel_examples() {
        let b = basis();
        let v = unit(&b, &[(BasisState::new(3, QubitLabel::Ge), 1.0)]);
        assert!((mandel_q(&v, &b).unwrap() + 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = unit(&b, &[(BasisState::new(0, QubitLabel::Ee), h), (BasisState::new(2, QubitLabel::Ee), h)]);
        assert!(mandel_q(&v, &b).unwrap().abs() < 1e-14);
        let v = unit(&b, &[(BasisState::new(0, QubitLabel::Gg), 1.0)]);
        assert!(matches!(mandel_q(&v, &b), Err(Error::VacuumState)));
    }

    #[test]
    fn spin_expectation_of_ee() {
        let mut rho = Matrix4::zeros();
        rho[(0, 0)] = c(1.0);
        let s = spin_expectations(&rho);
        assert!(s[0].abs() < 1e-15 && s[1].abs() < 1e-15 && (s[2] - 1.0).abs() < 1e-15);
    }
}
