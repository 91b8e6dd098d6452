//! Closed-system evolution of qubits, field and bosonic baths, and the
//! trapping states that survive it.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::csvio;
use crate::eigensolver::{eigh_hermitian, HermitianSpectrum};
use crate::error::{Error, Result};
use crate::hamiltonian::dense::{environment_terms, system_terms};
use crate::hamiltonian::ops::{self, TensorSpace, Term};
use crate::hamiltonian::{
    collective_spin, composite_space, Axis, CompositeSpace, EnvironmentParams, Matching, Model, ModelParams,
    DENSE_DIMENSION_LIMIT,
};

const NORM_TOL: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `exp(−iHt)` through the eigendecomposition of a time-independent `H`.
pub struct Propagator {
    spectrum: HermitianSpectrum,
}

impl Propagator {
    pub fn new(h: &DMatrix<Complex64>) -> Result<Self> {
        if h.nrows() > DENSE_DIMENSION_LIMIT {
            return Err(Error::DimensionTooLarge { dim: h.nrows(), limit: DENSE_DIMENSION_LIMIT });
        }
        Ok(Propagator { spectrum: eigh_hermitian(h)? })
    }

    pub fn dimension(&self) -> usize {
        self.spectrum.eigenvalues.len()
    }

    pub fn spectrum(&self) -> &HermitianSpectrum {
        &self.spectrum
    }

    /// Coefficients of `psi` in the eigenbasis.
    pub fn project(&self, psi: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if psi.len() != self.dimension() {
            return Err(Error::InvalidState(format!(
                "state of length {} for dimension {}",
                psi.len(),
                self.dimension()
            )));
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(self.spectrum.eigenvectors.ad_mul(psi))
    }

    pub fn apply(&self, coeffs: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&self.spectrum.eigenvalues)
                .map(|(a, &e)| a * Complex64::from_polar(1.0, -e * t)),
        );
        &self.spectrum.eigenvectors * phased
    }

    pub fn energy(&self, coeffs: &DVector<Complex64>) -> f64 {
        coeffs
            .iter()
            .zip(&self.spectrum.eigenvalues)
            .map(|(a, e)| a.norm_sqr() * e)
            .sum()
    }
}

/// `|ψ(t)⟩ = exp(−iHt)|ψ(0)⟩` at each requested time.
pub fn evolve(
    h: &DMatrix<Complex64>,
    initial: &DVector<Complex64>,
    times: &[f64],
) -> Result<Vec<DVector<Complex64>>> {
    let p = Propagator::new(h)?;
    let coeffs = p.project(initial)?;
    Ok(times.iter().map(|&t| p.apply(&coeffs, t)).collect())
}

/// Reduced density matrix on the sites in `keep` (in the given order).
pub fn reduced_density(space: &TensorSpace, psi: &DVector<Complex64>, keep: &[usize]) -> DMatrix<Complex64> {
    let dims = space.dims();
    let rest: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();
    let kept = TensorSpace::new(keep.iter().map(|&s| dims[s]).collect());
    let other = TensorSpace::new(rest.iter().map(|&s| dims[s]).collect());
    let mut m = DMatrix::zeros(kept.dimension(), other.dimension());
    let mut a = vec![0; keep.len()];
    let mut b = vec![0; rest.len()];
    for (i, &amp) in psi.iter().enumerate() {
        for (slot, &s) in keep.iter().enumerate() {
            a[slot] = space.digit(i, s);
        }
        for (slot, &s) in rest.iter().enumerate() {
            b[slot] = space.digit(i, s);
        }
        m[(kept.index(&a), other.index(&b))] = amp;
    }
    &m * m.adjoint()
}

fn purity(rho: &DMatrix<Complex64>) -> f64 {
    (rho * rho).trace().re
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitFactor {
    /// `(|ge⟩ − |eg⟩)/√2` on every pair.
    SingletPairs,
    /// `(|ee⟩ − |gg⟩)/√2` on every pair.
    PhiMinusPairs,
}

impl QubitFactor {
    pub fn for_model(model: Model) -> Self {
        match model {
            Model::Dicke => QubitFactor::SingletPairs,
            Model::Variant => QubitFactor::PhiMinusPairs,
        }
    }

    /// Amplitude of `|b_p b_q⟩` (bit 0 = e, 1 = g).
    fn pair_amplitude(self, bp: usize, bq: usize) -> f64 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match (self, bp, bq) {
            (QubitFactor::SingletPairs, 1, 0) => h,
            (QubitFactor::SingletPairs, 0, 1) => -h,
            (QubitFactor::PhiMinusPairs, 0, 0) => h,
            (QubitFactor::PhiMinusPairs, 1, 1) => -h,
            _ => 0.0,
        }
    }
}

/// Paired qubit factor on `n` qubits as a `2ⁿ` vector, qubit 0 most significant.
pub fn paired_qubit_state(factor: QubitFactor, matching: &Matching) -> DVector<Complex64> {
    let n = matching.n_qubits();
    DVector::from_fn(1 << n, |i, _| {
        let bit = |k: usize| (i >> (n - 1 - k)) & 1;
        c(matching.pairs().iter().map(|&(p, q)| factor.pair_amplitude(bit(p), bit(q))).product())
    })
}

/// Truncated coherent state, renormalized.
pub fn coherent_state(alpha: Complex64, truncation: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(truncation);
    let mut amp = c((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..truncation {
        v[n] = amp;
        amp = amp * alpha / ((n + 1) as f64).sqrt();
    }
    let norm = v.norm();
    v / c(norm)
}

fn fock(n: usize, truncation: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(truncation);
    v[n] = c(1.0);
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrappingState {
    pub photon: usize,
    /// Fock occupation of each qubit-bath mode, then each field-bath mode.
    pub environment_occupations: Vec<usize>,
    pub qubit_factor: QubitFactor,
    pub n_qubits: usize,
    pub matching: Matching,
    /// Optional coherent admixture: the field starts in `|n⟩ + α-coherent`, normalized.
    pub field_displacement: Complex64,
}

impl TrappingState {
    pub fn new(photon: usize, qubit_factor: QubitFactor, env: &EnvironmentParams) -> Self {
        TrappingState {
            photon,
            environment_occupations: vec![0; env.qubit_modes.len() + env.field_modes.len()],
            qubit_factor,
            n_qubits: 2,
            matching: Matching::sequential(2).expect("two qubits"),
            field_displacement: c(0.0),
        }
    }

    pub fn qubit_state(&self) -> DVector<Complex64> {
        paired_qubit_state(self.qubit_factor, &self.matching)
    }

    fn field_state(&self, truncation: usize) -> DVector<Complex64> {
        let mut v = fock(self.photon, truncation);
        if self.field_displacement != c(0.0) {
            v += coherent_state(self.field_displacement, truncation);
        }
        let norm = v.norm();
        v / c(norm)
    }

    /// Product state on `cs`.
    pub fn state_on(&self, cs: &CompositeSpace) -> Result<DVector<Complex64>> {
        if self.n_qubits != cs.n_qubits || self.matching.n_qubits() != cs.n_qubits {
            return Err(Error::InvalidState(format!(
                "trap on {} qubits in a {}-qubit space",
                self.n_qubits, cs.n_qubits
            )));
        }
        let dims = cs.space.dims();
        let env = cs.environment_sites();
        if self.environment_occupations.len() != env.len() {
            return Err(Error::InvalidState(format!(
                "{} environment occupations for {} modes",
                self.environment_occupations.len(),
                env.len()
            )));
        }
        if self.photon >= cs.photon_truncation {
            return Err(Error::OutsideTruncation { photon: self.photon, max: cs.photon_truncation - 1 });
        }
        let qubits = self.qubit_state();
        let field = self.field_state(cs.photon_truncation);
        let mut out = DVector::zeros(cs.dimension());
        for (i, slot) in out.iter_mut().enumerate() {
            let mut q = 0;
            for k in 0..cs.n_qubits {
                q = (q << 1) | cs.space.digit(i, cs.qubit_site(k));
            }
            let mut amp = field[cs.space.digit(i, CompositeSpace::FIELD)] * qubits[q];
            for (site, &occ) in env.clone().zip(&self.environment_occupations) {
                if occ >= dims[site] {
                    return Err(Error::OutsideTruncation { photon: occ, max: dims[site] - 1 });
                }
                if cs.space.digit(i, site) != occ {
                    amp = c(0.0);
                }
            }
            *slot = amp;
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityPoint {
    pub t: f64,
    pub qubit_fidelity: f64,
    pub field_mean_n: f64,
    pub qubit_purity: f64,
    pub field_purity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    pub points: Vec<FidelityPoint>,
    pub dimension: usize,
    pub max_norm_error: f64,
    pub max_energy_error: f64,
}

impl FidelityTrace {
    pub fn min_fidelity(&self) -> f64 {
        self.points.iter().map(|p| p.qubit_fidelity).fold(f64::INFINITY, f64::min)
    }
}

/// Evolve `initial` under `h` and follow the overlap of the reduced qubit state
/// with `target` (a `2ⁿ` qubit vector).
pub fn fidelity_trace(
    h: &DMatrix<Complex64>,
    cs: &CompositeSpace,
    initial: &DVector<Complex64>,
    target: &DVector<Complex64>,
    times: &[f64],
) -> Result<FidelityTrace> {
    let p = Propagator::new(h)?;
    let coeffs = p.project(initial)?;
    let e0 = p.energy(&coeffs);
    let number = ops::number(cs.photon_truncation);
    let qubit_sites: Vec<usize> = (0..cs.n_qubits).map(|k| cs.qubit_site(k)).collect();
    let mut max_norm_error: f64 = 0.0;
    let mut max_energy_error: f64 = 0.0;
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let psi = p.apply(&coeffs, t);
        max_norm_error = max_norm_error.max((psi.norm() - 1.0).abs());
        let e = (psi.adjoint() * (h * &psi))[(0, 0)].re;
        max_energy_error = max_energy_error.max((e - e0).abs() / e0.abs().max(1.0));
        let rho_q = reduced_density(&cs.space, &psi, &qubit_sites);
        let rho_f = reduced_density(&cs.space, &psi, &[CompositeSpace::FIELD]);
        points.push(FidelityPoint {
            t,
            qubit_fidelity: (target.adjoint() * &rho_q * target)[(0, 0)].re,
            field_mean_n: (&number * &rho_f).trace().re,
            qubit_purity: purity(&rho_q),
            field_purity: purity(&rho_f),
        });
    }
    Ok(FidelityTrace { points, dimension: cs.dimension(), max_norm_error, max_energy_error })
}

/// Evolve a two-qubit trap with the field and baths and report the fidelity
/// of the reduced qubit state to the trap's qubit factor. Driving and dipole
/// terms come from `params`.
pub fn trapping_fidelity(
    params: &ModelParams,
    env: &EnvironmentParams,
    trap: &TrappingState,
    photon_truncation: usize,
    times: &[f64],
) -> Result<FidelityTrace> {
    if QubitFactor::for_model(params.model) != trap.qubit_factor {
        return Err(Error::ModelMismatch(format!(
            "{:?} trap in the {} model",
            trap.qubit_factor, params.model
        )));
    }
    if trap.n_qubits != 2 {
        return Err(Error::InvalidParameter("composite evolution is for two qubits".into()));
    }
    params.validate()?;
    let cs = composite_space(photon_truncation, 2, env)?;
    let mut terms = system_terms(params, &cs, &trap.matching);
    terms.extend(environment_terms(&cs, env));
    let h = ops::assemble(&cs.space, &terms);
    let initial = trap.state_on(&cs)?;
    fidelity_trace(&h, &cs, &initial, &trap.qubit_state(), times)
}

/// `n` evenly spaced times on `[0, t_max]`.
pub fn time_grid(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Columns `t, qubit_fidelity, field_mean_n, qubit_purity, field_purity`.
pub fn write_fidelity_csv<W: Write>(out: W, trace: &FidelityTrace) -> Result<()> {
    let mut w = csvio::writer_from(out, &["t", "qubit_fidelity", "field_mean_n", "qubit_purity", "field_purity"])?;
    for p in &trace.points {
        w.write_record([
            csvio::num(p.t),
            csvio::num(p.qubit_fidelity),
            csvio::num(p.field_mean_n),
            csvio::num(p.qubit_purity),
            csvio::num(p.field_purity),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapCheck {
    pub label: String,
    /// Whether this state should be an eigenstate of the Hamiltonian.
    pub expect_eigenstate: bool,
    pub eigenvalue: f64,
    pub eigen_residual: f64,
    /// `‖S_x φ‖, ‖S_y φ‖, ‖S_z φ‖`.
    pub spin_norms: [f64; 3],
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiqubitReport {
    pub n_qubits: usize,
    pub photon: usize,
    pub model: Model,
    pub hamiltonian_matching: Matching,
    pub checks: Vec<TrapCheck>,
}

impl MultiqubitReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const EIGEN_TOL: f64 = 1e-10;
pub const ANNIHILATION_TOL: f64 = 1e-12;

fn with_field(cs: &CompositeSpace, photon: usize, qubits: &DVector<Complex64>) -> DVector<Complex64> {
    let mut out = DVector::zeros(cs.dimension());
    for (i, slot) in out.iter_mut().enumerate() {
        if cs.space.digit(i, CompositeSpace::FIELD) != photon {
            continue;
        }
        let mut q = 0;
        for k in 0..cs.n_qubits {
            q = (q << 1) | cs.space.digit(i, cs.qubit_site(k));
        }
        *slot = qubits[q];
    }
    out
}

/// Paired states `|n⟩ ⊗ ∏ pairs` for every matching of `n_qubits` and two
/// superpositions of them, checked against the Hamiltonian built on
/// `hamiltonian_matching`.
///
/// Dicke singlet products must be eigenstates with eigenvalue
/// `ωn − (n_qubits/2)·Σδ/4` and be annihilated by `S_x, S_y, S_z`. Variant
/// `Φ₋` products need only be annihilated by `S_x`; the one on the
/// Hamiltonian's own matching must be an eigenstate unless `Ω_y ≠ 0`.
pub fn verify_multiqubit_traps(
    params: &ModelParams,
    n_qubits: usize,
    photon: usize,
    photon_truncation: usize,
    hamiltonian_matching: &Matching,
) -> Result<MultiqubitReport> {
    if n_qubits == 0 || !n_qubits.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("qubit count must be even, got {n_qubits}")));
    }
    if hamiltonian_matching.n_qubits() != n_qubits {
        return Err(Error::InvalidParameter(format!(
            "matching {hamiltonian_matching} is not on {n_qubits} qubits"
        )));
    }
    if photon >= photon_truncation {
        return Err(Error::OutsideTruncation { photon, max: photon_truncation - 1 });
    }
    params.validate()?;
    let cs = composite_space(photon_truncation, n_qubits, &EnvironmentParams::default())?;
    let h = system_terms(params, &cs, hamiltonian_matching);
    let spins: Vec<Vec<Term>> = [Axis::X, Axis::Y, Axis::Z].iter().map(|&a| collective_spin(&cs, a)).collect();
    let factor = QubitFactor::for_model(params.model);
    let [dx, dy, dz] = params.dipole;
    let pair_shift = match params.model {
        Model::Dicke => -(dx + dy + dz) / 4.0,
        Model::Variant => (-dx + dy + dz) / 4.0,
    };
    let eigenvalue = params.omega * photon as f64 + (n_qubits / 2) as f64 * pair_shift;
    let has_dipole = params.dipole.iter().any(|&d| d != 0.0);

    let matchings = Matching::all(n_qubits)?;
    let mut states: Vec<(String, bool, DVector<Complex64>)> = Vec::new();
    for m in &matchings {
        let own = m.pairs() == hamiltonian_matching.pairs() || sorted(m) == sorted(hamiltonian_matching);
        let expect = match params.model {
            Model::Dicke => own || !has_dipole,
            Model::Variant => own && params.drive_y == 0.0,
        };
        states.push((m.to_string(), expect, paired_qubit_state(factor, m)));
    }
    if matchings.len() > 1 {
        let expect = params.model == Model::Dicke && !has_dipole;
        let uniform = matchings
            .iter()
            .fold(DVector::zeros(1 << n_qubits), |acc, m| acc + paired_qubit_state(factor, m));
        let weights = [c(1.0), Complex64::new(-0.5, 2.0), Complex64::new(0.25, -1.0)];
        let mixed = matchings
            .iter()
            .zip(weights.iter().cycle())
            .fold(DVector::zeros(1 << n_qubits), |acc, (m, &w)| acc + paired_qubit_state(factor, m) * w);
        for (label, v) in [("uniform superposition", uniform), ("weighted superposition", mixed)] {
            let norm = v.norm();
            states.push((label.to_string(), expect, v / c(norm)));
        }
    }

    let checks = states
        .into_iter()
        .map(|(label, expect_eigenstate, qubits)| {
            let phi = with_field(&cs, photon, &qubits);
            let hphi = ops::apply(&cs.space, &h, &phi);
            let eigen_residual = (&hphi - &phi * c(eigenvalue)).norm();
            let spin_norms = [0, 1, 2].map(|a| ops::apply(&cs.space, &spins[a], &phi).norm());
            let annihilated = match params.model {
                Model::Dicke => spin_norms.iter().all(|&s| s <= ANNIHILATION_TOL),
                Model::Variant => spin_norms[0] <= ANNIHILATION_TOL,
            };
            let passed = annihilated && (!expect_eigenstate || eigen_residual <= EIGEN_TOL);
            TrapCheck { label, expect_eigenstate, eigenvalue, eigen_residual, spin_norms, passed }
        })
        .collect();

    Ok(MultiqubitReport {
        n_qubits,
        photon,
        model: params.model,
        hamiltonian_matching: hamiltonian_matching.clone(),
        checks,
    })
}

fn sorted(m: &Matching) -> Vec<(usize, usize)> {
    let mut p: Vec<(usize, usize)> = m.pairs().iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    p.sort();
    p
}
