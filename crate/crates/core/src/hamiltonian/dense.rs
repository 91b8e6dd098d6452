use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ops::{self, LocalOp, TensorSpace, Term};
use super::{Model, ModelParams};
use crate::error::{Error, Result};

/// Largest dense dimension any full-space builder will assemble.
pub const DENSE_DIMENSION_LIMIT: usize = 1 << 14;

/// Perfect matching of `n_qubits` qubits into disjoint pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    n_qubits: usize,
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(n_qubits: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if n_qubits == 0 || !n_qubits.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "qubit count must be even and positive, got {n_qubits}"
            )));
        }
        let mut seen = vec![false; n_qubits];
        for &(p, q) in &pairs {
            for k in [p, q] {
                if k >= n_qubits || seen[k] {
                    return Err(Error::InvalidParameter(format!(
                        "pairs {pairs:?} are not a perfect matching of {n_qubits} qubits"
                    )));
                }
                seen[k] = true;
            }
        }
        if pairs.len() * 2 != n_qubits {
            return Err(Error::InvalidParameter(format!(
                "pairs {pairs:?} do not cover {n_qubits} qubits"
            )));
        }
        Ok(Matching { n_qubits, pairs })
    }

    /// `(0,1)(2,3)…`.
    pub fn sequential(n_qubits: usize) -> Result<Self> {
        Matching::new(n_qubits, (0..n_qubits / 2).map(|k| (2 * k, 2 * k + 1)).collect())
    }

    /// Every perfect matching, each pair ordered `(low, high)`.
    pub fn all(n_qubits: usize) -> Result<Vec<Matching>> {
        fn rec(free: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
            if free.is_empty() {
                out.push(acc.clone());
                return;
            }
            let first = free[0];
            for k in 1..free.len() {
                let rest: Vec<usize> = free
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != 0 && i != k)
                    .map(|(_, &v)| v)
                    .collect();
                acc.push((first, free[k]));
                rec(&rest, acc, out);
                acc.pop();
            }
        }
        Matching::sequential(n_qubits)?;
        let free: Vec<usize> = (0..n_qubits).collect();
        let mut out = Vec::new();
        rec(&free, &mut Vec::new(), &mut out);
        out.into_iter().map(|p| Matching::new(n_qubits, p)).collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

impl std::str::FromStr for Matching {
    type Err = Error;

    /// Parses `"0-1,2-3"` (zero-based qubit indices).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse matching '{s}'"));
        let pairs = s
            .split(',')
            .map(|p| {
                let (a, b) = p.trim().split_once('-').ok_or_else(bad)?;
                Ok((
                    a.trim().parse().map_err(|_| bad())?,
                    b.trim().parse().map_err(|_| bad())?,
                ))
            })
            .collect::<Result<Vec<(usize, usize)>>>()?;
        Matching::new(pairs.len() * 2, pairs)
    }
}

impl std::fmt::Display for Matching {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(p, q)| format!("{p}-{q}")).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentMode {
    pub frequency: f64,
    pub coupling: f64,
    pub truncation: usize,
}

impl EnvironmentMode {
    pub fn unit(truncation: usize) -> Self {
        EnvironmentMode {
            frequency: 1.0,
            coupling: 1.0,
            truncation,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.truncation < 2 {
            return Err(Error::InvalidParameter(format!(
                "environment truncation must be at least 2, got {}",
                self.truncation
            )));
        }
        if !(self.frequency > 0.0 && self.frequency.is_finite() && self.coupling.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "invalid environment mode {self:?}"
            )));
        }
        Ok(())
    }
}

impl std::str::FromStr for EnvironmentMode {
    type Err = Error;

    /// `"frequency:coupling:truncation"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse environment mode '{s}'"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let mode = EnvironmentMode {
            frequency: parts[0].parse().map_err(|_| bad())?,
            coupling: parts[1].parse().map_err(|_| bad())?,
            truncation: parts[2].parse().map_err(|_| bad())?,
        };
        mode.validate()?;
        Ok(mode)
    }
}

/// Bosonic baths: `qubit_modes` couple through `(b + b†) S_x`,
/// `field_modes` through `(c + c†)(a + a†)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentParams {
    pub qubit_modes: Vec<EnvironmentMode>,
    pub field_modes: Vec<EnvironmentMode>,
}

impl EnvironmentParams {
    pub fn is_empty(&self) -> bool {
        self.qubit_modes.is_empty() && self.field_modes.is_empty()
    }
}

/// Site layout: field, qubits, qubit-bath modes, field-bath modes.
#[derive(Clone, Debug)]
pub struct CompositeSpace {
    pub space: TensorSpace,
    pub n_qubits: usize,
    pub photon_truncation: usize,
    pub n_qubit_modes: usize,
    pub n_field_modes: usize,
}

impl CompositeSpace {
    pub const FIELD: usize = 0;

    pub fn qubit_site(&self, k: usize) -> usize {
        1 + k
    }

    pub fn qubit_bath_site(&self, j: usize) -> usize {
        1 + self.n_qubits + j
    }

    pub fn field_bath_site(&self, j: usize) -> usize {
        1 + self.n_qubits + self.n_qubit_modes + j
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn environment_sites(&self) -> std::ops::Range<usize> {
        1 + self.n_qubits..self.space.dims().len()
    }
}

pub fn composite_space(
    photon_truncation: usize,
    n_qubits: usize,
    env: &EnvironmentParams,
) -> Result<CompositeSpace> {
    if photon_truncation == 0 {
        return Err(Error::InvalidParameter("photon truncation must be positive".into()));
    }
    if n_qubits == 0 || !n_qubits.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "qubit count must be even and positive, got {n_qubits}"
        )));
    }
    for m in env.qubit_modes.iter().chain(&env.field_modes) {
        m.validate()?;
    }
    let mut dims = vec![photon_truncation];
    dims.extend(std::iter::repeat_n(2, n_qubits));
    dims.extend(env.qubit_modes.iter().map(|m| m.truncation));
    dims.extend(env.field_modes.iter().map(|m| m.truncation));
    let dim = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .unwrap_or(usize::MAX);
    if dim > DENSE_DIMENSION_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim,
            limit: DENSE_DIMENSION_LIMIT,
        });
    }
    Ok(CompositeSpace {
        space: TensorSpace::new(dims),
        n_qubits,
        photon_truncation,
        n_qubit_modes: env.qubit_modes.len(),
        n_field_modes: env.field_modes.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

fn spin(axis: Axis) -> DMatrix<Complex64> {
    match axis {
        Axis::X => ops::spin_x(),
        Axis::Y => ops::spin_y(),
        Axis::Z => ops::spin_z(),
    }
}

fn local(site: usize, matrix: DMatrix<Complex64>) -> LocalOp {
    LocalOp { site, matrix }
}

/// Terms of `S_axis = Σ_k s_axis⁽ᵏ⁾` on the composite space.
pub fn collective_spin(cs: &CompositeSpace, axis: Axis) -> Vec<Term> {
    (0..cs.n_qubits)
        .map(|k| Term::real(1.0, vec![local(cs.qubit_site(k), spin(axis))]))
        .collect()
}

pub(crate) fn system_terms(
    params: &ModelParams,
    cs: &CompositeSpace,
    matching: &Matching,
) -> Vec<Term> {
    let n_fock = cs.photon_truncation;
    let field = CompositeSpace::FIELD;
    let mut terms = vec![Term::real(params.omega, vec![local(field, ops::number(n_fock))])];

    match params.model {
        Model::Dicke => {
            for k in 0..cs.n_qubits {
                terms.push(Term::real(params.omega0, vec![local(cs.qubit_site(k), ops::spin_z())]));
            }
        }
        Model::Variant => {
            for &(p, q) in matching.pairs() {
                terms.push(Term::real(params.omega0, vec![local(cs.qubit_site(p), ops::spin_z())]));
                terms.push(Term::real(-params.omega0, vec![local(cs.qubit_site(q), ops::spin_z())]));
            }
        }
    }

    for k in 0..cs.n_qubits {
        let site = cs.qubit_site(k);
        terms.push(Term::real(
            params.g,
            vec![local(field, ops::quadrature(n_fock)), local(site, ops::spin_x())],
        ));
        terms.push(Term::real(params.drive_x, vec![local(site, ops::spin_x())]));
        terms.push(Term::real(params.drive_y, vec![local(site, ops::spin_y())]));
    }

    for &(p, q) in matching.pairs() {
        for (axis, &delta) in [Axis::X, Axis::Y, Axis::Z].iter().zip(&params.dipole) {
            terms.push(Term::real(
                delta,
                vec![local(cs.qubit_site(p), spin(*axis)), local(cs.qubit_site(q), spin(*axis))],
            ));
        }
    }
    terms.retain(|t| t.coeff.norm() != 0.0);
    terms
}

pub(crate) fn environment_terms(cs: &CompositeSpace, env: &EnvironmentParams) -> Vec<Term> {
    let mut terms = Vec::new();
    for (j, m) in env.qubit_modes.iter().enumerate() {
        let site = cs.qubit_bath_site(j);
        terms.push(Term::real(m.frequency, vec![local(site, ops::number(m.truncation))]));
        for k in 0..cs.n_qubits {
            terms.push(Term::real(
                m.coupling,
                vec![local(site, ops::quadrature(m.truncation)), local(cs.qubit_site(k), ops::spin_x())],
            ));
        }
    }
    for (j, m) in env.field_modes.iter().enumerate() {
        let site = cs.field_bath_site(j);
        terms.push(Term::real(m.frequency, vec![local(site, ops::number(m.truncation))]));
        terms.push(Term::real(
            m.coupling,
            vec![
                local(site, ops::quadrature(m.truncation)),
                local(CompositeSpace::FIELD, ops::quadrature(cs.photon_truncation)),
            ],
        ));
    }
    terms.retain(|t| t.coeff.norm() != 0.0);
    terms
}

/// Full-space Hamiltonian on `Fock(photon_truncation) ⊗ qubit^{n_qubits}` with the
/// sequential pair matching.
pub fn build_dense_hamiltonian(
    params: &ModelParams,
    photon_truncation: usize,
    n_qubits: usize,
) -> Result<DMatrix<Complex64>> {
    build_dense_hamiltonian_with_matching(params, photon_truncation, &Matching::sequential(n_qubits)?)
}

/// As [`build_dense_hamiltonian`]; `matching` selects the pairs carrying the
/// variant's `ω₀(s_z⁽ᵖ⁾ − s_z⁽ᑫ⁾)` and the dipole-dipole terms.
pub fn build_dense_hamiltonian_with_matching(
    params: &ModelParams,
    photon_truncation: usize,
    matching: &Matching,
) -> Result<DMatrix<Complex64>> {
    params.validate()?;
    let cs = composite_space(photon_truncation, matching.n_qubits(), &EnvironmentParams::default())?;
    Ok(ops::assemble(&cs.space, &system_terms(params, &cs, matching)))
}

/// Two-qubit system plus bosonic baths.
pub fn build_composite_hamiltonian(
    params: &ModelParams,
    env: &EnvironmentParams,
    photon_truncation: usize,
) -> Result<DMatrix<Complex64>> {
    params.validate()?;
    let matching = Matching::sequential(2)?;
    let cs = composite_space(photon_truncation, 2, env)?;
    let mut terms = system_terms(params, &cs, &matching);
    terms.extend(environment_terms(&cs, env));
    Ok(ops::assemble(&cs.space, &terms))
}

/// `R = exp(iπ s_x⁽²⁾) = i σ_x⁽²⁾` on `Fock(photon_truncation) ⊗ qubit²`; maps the
/// Dicke Hamiltonian onto the variant, `R H₁ R† = H₂`.
pub fn second_qubit_rotation(photon_truncation: usize) -> Result<DMatrix<Complex64>> {
    let cs = composite_space(photon_truncation, 2, &EnvironmentParams::default())?;
    let term = Term {
        coeff: Complex64::new(0.0, 2.0),
        factors: vec![local(cs.qubit_site(1), ops::spin_x())],
    };
    Ok(ops::assemble(&cs.space, &[term]))
}
