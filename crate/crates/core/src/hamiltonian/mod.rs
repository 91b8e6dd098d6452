//! Hamiltonians of the two-qubit Dicke model and its ion-trap variant.
//!
//! * `Dicke`:   `H₁ = ω n + ω₀ S_z + g (a + a†) S_x`
//! * `Variant`: `H₂ = ω n + ω₀ (s_z⁽¹⁾ − s_z⁽²⁾) + g (a + a†) S_x`
//!
//! with optional driving `Ω_x S_x + Ω_y S_y` and dipole-dipole terms
//! `Σ_j δ_j s_j⁽¹⁾ s_j⁽²⁾`. Qubit operators are half Pauli matrices and
//! `S_j = Σ_k s_j⁽ᵏ⁾`.
//!
//! Parity-projected builds produce a [`SymmetricBandedMatrix`]; full-space
//! builds ([`build_dense_hamiltonian`], [`build_composite_hamiltonian`]) produce
//! a dense complex Hermitian matrix.

pub(crate) mod dense;
pub mod ops;

use serde::{Deserialize, Serialize};

use crate::banded::SymmetricBandedMatrix;
use crate::error::{Error, Result};
use crate::hilbert::{ParityBasis, QubitLabel};

pub use dense::{
    build_composite_hamiltonian, build_dense_hamiltonian, build_dense_hamiltonian_with_matching,
    collective_spin, composite_space, second_qubit_rotation, Axis, CompositeSpace, EnvironmentMode, EnvironmentParams, Matching,
    DENSE_DIMENSION_LIMIT,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Dicke,
    Variant,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dicke" => Ok(Model::Dicke),
            "variant" => Ok(Model::Variant),
            other => Err(Error::InvalidParameter(format!("unknown model '{other}'"))),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Model::Dicke => f.write_str("dicke"),
            Model::Variant => f.write_str("variant"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub omega0: f64,
    pub g: f64,
    #[serde(default)]
    pub drive_x: f64,
    #[serde(default)]
    pub drive_y: f64,
    /// `(δ_x, δ_y, δ_z)`.
    #[serde(default)]
    pub dipole: [f64; 3],
    pub model: Model,
}

impl ModelParams {
    pub fn dicke(omega: f64, omega0: f64, g: f64) -> Self {
        ModelParams {
            omega,
            omega0,
            g,
            drive_x: 0.0,
            drive_y: 0.0,
            dipole: [0.0; 3],
            model: Model::Dicke,
        }
    }

    pub fn variant(omega: f64, omega0: f64, g: f64) -> Self {
        ModelParams {
            model: Model::Variant,
            ..ModelParams::dicke(omega, omega0, g)
        }
    }

    pub fn with_dipole(mut self, dipole: [f64; 3]) -> Self {
        self.dipole = dipole;
        self
    }

    pub fn with_drive(mut self, drive_x: f64, drive_y: f64) -> Self {
        self.drive_x = drive_x;
        self.drive_y = drive_y;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.omega, self.omega0, self.g, self.drive_x, self.drive_y]
            .into_iter()
            .chain(self.dipole);
        for v in all {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite parameter {v}")));
            }
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        Ok(())
    }

    pub fn has_driving(&self) -> bool {
        self.drive_x != 0.0 || self.drive_y != 0.0
    }

    pub fn dipole_sum(&self) -> f64 {
        self.dipole.iter().sum()
    }

    /// Diagonal entry of `|n⟩ ⊗ label`, summed term by term in the same order
    /// as the full-space builder so both agree to the last bit.
    fn diagonal(&self, photon: usize, label: QubitLabel) -> f64 {
        let r = label.register_index();
        let s1 = if r >> 1 == 0 { 0.5 } else { -0.5 };
        let s2 = if r & 1 == 0 { 0.5 } else { -0.5 };
        let second = match self.model {
            Model::Dicke => self.omega0,
            Model::Variant => -self.omega0,
        };
        let mut d = self.omega * photon as f64;
        d += self.omega0 * s1;
        d += second * s2;
        d += self.dipole[2] * s1 * s2;
        d
    }
}

/// Projection of the Hamiltonian onto one parity subspace.
///
/// Driving terms are rejected because `S_x` and `S_y` do not commute with parity.
pub fn build_parity_hamiltonian(
    params: &ModelParams,
    basis: &ParityBasis,
) -> Result<SymmetricBandedMatrix> {
    params.validate()?;
    if params.has_driving() {
        return Err(Error::DrivingBreaksParity);
    }
    let n = basis.len();
    let mut h = SymmetricBandedMatrix::zeros(n, basis.half_bandwidth());
    let [dx, dy, _] = params.dipole;

    for (i, s) in basis.states().iter().enumerate() {
        h.set(i, i, params.diagonal(s.photon, s.qubits));
    }

    // dipole flips of both qubits stay within a rung: ee↔gg and ge↔eg
    for rung in 0..basis.rung_count() {
        let base = 4 * rung;
        h.set(base, base + 1, 0.25 * dx - 0.25 * dy);
        h.set(base + 2, base + 3, 0.25 * dx + 0.25 * dy);
    }

    // g (a + a†) S_x: ⟨ee|S_x|ge⟩ = ⟨ee|S_x|eg⟩ = ⟨gg|S_x|ge⟩ = ⟨gg|S_x|eg⟩ = 1/2
    if params.g != 0.0 {
        for (i, s) in basis.states().iter().enumerate() {
            if !s.qubits.is_aligned() {
                continue;
            }
            for label in [QubitLabel::Ge, QubitLabel::Eg] {
                for photon in [s.photon.wrapping_sub(1), s.photon + 1] {
                    if photon == usize::MAX {
                        continue;
                    }
                    let other = crate::hilbert::BasisState::new(photon, label);
                    if let Some(j) = basis.index_of(other) {
                        let ladder = (s.photon.max(photon) as f64).sqrt();
                        h.set(i, j, 0.5 * params.g * ladder);
                    }
                }
            }
        }
    }
    Ok(h)
}
