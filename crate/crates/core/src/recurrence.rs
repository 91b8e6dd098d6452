//! Analytic singlet branch and the three-term recurrence obeyed by the `Ψ₊`
//! coefficients of triplet-sector eigenvectors.
//!
//! With `c_{1,j}` the `Ψ₊` amplitude on rung `j` and
//! `γ(D) = g² D / (D² − ω₀²)`:
//!
//! ```text
//! α_j c_{1,j−1} + β_j c_{1,j} + α_{j+1} c_{1,j+1} = 0
//!
//! (+)  α_j = √(2j(2j+1)) γ(2jω − λ)
//!      β_j = λ − (2j+1)ω + (2j+1) γ(2jω − λ) + (2j+2) γ((2j+2)ω − λ)
//! (−)  α_j = √(2j(2j−1)) γ((2j−1)ω − λ)
//!      β_j = λ − 2jω + 2j γ((2j−1)ω − λ) + (2j+1) γ((2j+1)ω − λ)
//! ```

use std::io::Write;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csvio;
use crate::eigensolver::{ConvergedSpectrum, SymmetricOperator};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_parity_hamiltonian, Model, ModelParams};
use crate::hilbert::{from_bell, to_bell, BasisState, Parity, ParityBasis, QubitLabel};

/// Relative to `ω`.
pub const POLE_TOL: f64 = 1e-6;

/// `|Ψ₋, n⟩` with eigenvalue `ωn − (δ_x + δ_y + δ_z)/4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingletEigenpair {
    pub photon: usize,
    pub eigenvalue: f64,
    pub parity: Parity,
    /// Qubit factor.
    pub bell: crate::hilbert::BellLabel,
}

impl SingletEigenpair {
    /// The state as a unit vector on `basis`.
    pub fn state_on(&self, basis: &ParityBasis) -> Result<Vec<f64>> {
        if basis.parity() != self.parity {
            return Err(Error::ModelMismatch(format!(
                "photon {} lives in the {} subspace",
                self.photon, self.parity
            )));
        }
        let amps = self.bell.amplitudes();
        let mut v = vec![0.0; basis.len()];
        for (k, label) in [QubitLabel::Ee, QubitLabel::Gg, QubitLabel::Ge, QubitLabel::Eg].iter().enumerate() {
            if amps[k] == 0.0 {
                continue;
            }
            let state = BasisState::new(self.photon, *label);
            let i = basis.index_of(state).ok_or(Error::OutsideTruncation {
                photon: self.photon,
                max: basis.max_photon(),
            })?;
            v[i] = amps[k];
        }
        Ok(v)
    }

    /// `‖H v − λ v‖` on `basis`.
    pub fn residual(&self, params: &ModelParams, basis: &ParityBasis) -> Result<f64> {
        let v = self.state_on(basis)?;
        let h = build_parity_hamiltonian(params, basis)?;
        let mut hv = vec![0.0; v.len()];
        h.apply(&v, &mut hv);
        Ok(hv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - self.eigenvalue * b).powi(2))
            .sum::<f64>()
            .sqrt())
    }
}

pub fn singlet_eigenpair(n: usize, params: &ModelParams) -> Result<SingletEigenpair> {
    params.validate()?;
    if params.model != Model::Dicke {
        return Err(Error::ModelMismatch(
            "the singlet branch belongs to the Dicke model; use variant_trapped_eigenpair".into(),
        ));
    }
    Ok(SingletEigenpair {
        photon: n,
        eigenvalue: params.omega * n as f64 - params.dipole_sum() / 4.0,
        parity: Parity::of(n, QubitLabel::Ge),
        bell: crate::hilbert::BellLabel::PsiMinus,
    })
}

/// `|Φ₋, n⟩` of the variant, eigenvalue `ωn + (−δ_x + δ_y + δ_z)/4`.
pub fn variant_trapped_eigenpair(n: usize, params: &ModelParams) -> Result<SingletEigenpair> {
    params.validate()?;
    if params.model != Model::Variant {
        return Err(Error::ModelMismatch("Φ₋ traps belong to the variant model".into()));
    }
    let [dx, dy, dz] = params.dipole;
    Ok(SingletEigenpair {
        photon: n,
        eigenvalue: params.omega * n as f64 + (-dx + dy + dz) / 4.0,
        parity: Parity::of(n, QubitLabel::Ee),
        bell: crate::hilbert::BellLabel::PhiMinus,
    })
}

/// Deviations of the collective-spin actions on `|Φ₋⟩` from
/// `(s_z⁽¹⁾ − s_z⁽²⁾)|Φ₋⟩ = 0`, `S_x|Φ₋⟩ = 0`, `S_y|Φ₋⟩ = −i|Ψ₊⟩`,
/// `S_z|Φ₋⟩ = −|Φ₊⟩`, in that order.
pub fn phi_minus_actions() -> [f64; 4] {
    use crate::hamiltonian::ops::{spin_x, spin_y, spin_z};
    let id = nalgebra::DMatrix::<Complex64>::identity(2, 2);
    let on1 = |s: nalgebra::DMatrix<Complex64>| s.kronecker(&id);
    let on2 = |s: nalgebra::DMatrix<Complex64>| id.kronecker(&s);
    let collective = |s: fn() -> nalgebra::DMatrix<Complex64>| on1(s()) + on2(s());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |x: f64| Complex64::new(x, 0.0);
    // register order ee, eg, ge, gg
    let phi_minus = nalgebra::DVector::from_vec(vec![c(-h), c(0.0), c(0.0), c(h)]);
    let phi_plus = nalgebra::DVector::from_vec(vec![c(h), c(0.0), c(0.0), c(h)]);
    let psi_plus = nalgebra::DVector::from_vec(vec![c(0.0), c(h), c(h), c(0.0)]);
    let diff = on1(spin_z()) - on2(spin_z());
    [
        (diff * &phi_minus).norm(),
        (collective(spin_x) * &phi_minus).norm(),
        (collective(spin_y) * &phi_minus + psi_plus * Complex64::i()).norm(),
        (collective(spin_z) * &phi_minus + phi_plus).norm(),
    ]
}

/// Singlet annihilation by the driving operator `Ω_x S_x + Ω_y S_y` on the
/// register; returns the norm of the image.
pub fn singlet_driving_image(drive_x: f64, drive_y: f64) -> f64 {
    use crate::hamiltonian::ops::{spin_x, spin_y};
    let id = nalgebra::DMatrix::<Complex64>::identity(2, 2);
    let collective = |s: nalgebra::DMatrix<Complex64>| s.kronecker(&id) + id.kronecker(&s);
    let drive = collective(spin_x()) * Complex64::new(drive_x, 0.0)
        + collective(spin_y()) * Complex64::new(drive_y, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = Vector4::new(0.0, -h, h, 0.0).map(|x| Complex64::new(x, 0.0));
    let m = Matrix4::from_iterator(drive.iter().copied());
    (m * singlet).norm()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecurrenceCoefficients {
    pub parity: Parity,
    pub lambda: f64,
    omega: f64,
    omega0: f64,
    g: f64,
}

impl RecurrenceCoefficients {
    fn gamma(&self, d: f64) -> f64 {
        self.g * self.g * d / (d * d - self.omega0 * self.omega0)
    }

    /// Photon number of the aligned (`ee`, `gg`) states on rung `j`.
    pub fn aligned_photon(&self, j: usize) -> usize {
        match self.parity {
            Parity::Positive => 2 * j,
            Parity::Negative => 2 * j + 1,
        }
    }

    pub fn alpha(&self, j: usize) -> f64 {
        if j == 0 {
            return 0.0;
        }
        let jf = j as f64;
        let w = self.omega;
        match self.parity {
            Parity::Positive => (2.0 * jf * (2.0 * jf + 1.0)).sqrt() * self.gamma(2.0 * jf * w - self.lambda),
            Parity::Negative => {
                (2.0 * jf * (2.0 * jf - 1.0)).sqrt() * self.gamma((2.0 * jf - 1.0) * w - self.lambda)
            }
        }
    }

    pub fn beta(&self, j: usize) -> f64 {
        let jf = j as f64;
        let (w, l) = (self.omega, self.lambda);
        match self.parity {
            Parity::Positive => {
                l - (2.0 * jf + 1.0) * w
                    + (2.0 * jf + 1.0) * self.gamma(2.0 * jf * w - l)
                    + (2.0 * jf + 2.0) * self.gamma((2.0 * jf + 2.0) * w - l)
            }
            Parity::Negative => {
                let lower = if j == 0 { 0.0 } else { 2.0 * jf * self.gamma((2.0 * jf - 1.0) * w - l) };
                l - 2.0 * jf * w + lower + (2.0 * jf + 1.0) * self.gamma((2.0 * jf + 1.0) * w - l)
            }
        }
    }

    /// First rung `j ≤ j_max` whose coefficients sit within `POLE_TOL·ω` of a
    /// pole `λ = kω ± ω₀`.
    pub fn near_pole(&self, j_max: usize) -> Option<usize> {
        let tol = POLE_TOL * self.omega;
        let hits = |photon: usize| {
            let base = photon as f64 * self.omega;
            (self.lambda - base - self.omega0).abs() < tol || (self.lambda - base + self.omega0).abs() < tol
        };
        (0..=j_max).find(|&j| {
            let k = self.aligned_photon(j);
            hits(k) || hits(k + 2)
        })
    }
}

pub fn recurrence_coefficients(
    parity: Parity,
    lambda: f64,
    params: &ModelParams,
) -> Result<RecurrenceCoefficients> {
    params.validate()?;
    if params.model != Model::Dicke || params.dipole != [0.0; 3] {
        return Err(Error::ModelMismatch(
            "the recurrence holds for the Dicke model without dipole terms".into(),
        ));
    }
    Ok(RecurrenceCoefficients {
        parity,
        lambda,
        omega: params.omega,
        omega0: params.omega0,
        g: params.g,
    })
}

/// `Ψ₊` amplitude on every rung.
pub fn psi_plus_coefficients(v: &[f64]) -> Vec<f64> {
    v.chunks_exact(4).map(|r| to_bell(r[2], r[3]).0).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualStatus {
    Checked,
    /// `λ` within the pole tolerance on some occupied rung.
    PoleFlagged,
    /// All `c₁ ≈ 0`: a singlet-branch state.
    SingletState,
    /// `g = 0`: `α ≡ 0`.
    Decoupled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceResidual {
    pub residual: Option<f64>,
    pub status: ResidualStatus,
}

/// `max_j |α_j c_{j−1} + β_j c_j + α_{j+1} c_{j+1}| / max_j |c_j|`, with
/// `c_{J} = 0` past the last rung.
pub fn recurrence_residual(
    v: &[f64],
    lambda: f64,
    parity: Parity,
    params: &ModelParams,
) -> Result<RecurrenceResidual> {
    let coeffs = recurrence_coefficients(parity, lambda, params)?;
    if params.g == 0.0 {
        return Ok(RecurrenceResidual { residual: None, status: ResidualStatus::Decoupled });
    }
    let c1 = psi_plus_coefficients(v);
    let scale = c1.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale <= 1e-8 {
        return Ok(RecurrenceResidual { residual: None, status: ResidualStatus::SingletState });
    }
    let rungs = c1.len();
    let flagged = coeffs.near_pole(rungs).is_some();
    let at = |j: usize| c1.get(j).copied().unwrap_or(0.0);
    let mut worst = 0.0f64;
    for j in 0..rungs {
        let lower = if j == 0 { 0.0 } else { coeffs.alpha(j) * at(j - 1) };
        let r = lower + coeffs.beta(j) * at(j) + coeffs.alpha(j + 1) * at(j + 1);
        worst = worst.max(r.abs());
    }
    Ok(RecurrenceResidual {
        residual: Some(worst / scale),
        status: if flagged { ResidualStatus::PoleFlagged } else { ResidualStatus::Checked },
    })
}

/// Rebuild the full eigenvector from its `Ψ₊` coefficients:
/// `f₀ = −(g/√2) (ωn̂ + ω₀ − λ)⁻¹ (a + a†) f₁`, `f₂ = −(g/√2) (ωn̂ − ω₀ − λ)⁻¹ (a + a†) f₁`.
pub fn reconstruct_from_f1(
    f1: &[f64],
    lambda: f64,
    params: &ModelParams,
    parity: Parity,
) -> Result<Vec<f64>> {
    let coeffs = recurrence_coefficients(parity, lambda, params)?;
    let tol = POLE_TOL * params.omega;
    let rungs = f1.len();
    let at = |j: isize| if j < 0 { 0.0 } else { f1.get(j as usize).copied().unwrap_or(0.0) };
    let scale = params.g * std::f64::consts::FRAC_1_SQRT_2;
    let mut v = vec![0.0; 4 * rungs];
    for j in 0..rungs {
        let ji = j as isize;
        let n = coeffs.aligned_photon(j) as f64;
        // (a + a†) f₁ projected on photon n
        let u = match parity {
            Parity::Positive => (n + 1.0).sqrt() * at(ji) + n.sqrt() * at(ji - 1),
            Parity::Negative => n.sqrt() * at(ji) + (n + 1.0).sqrt() * at(ji + 1),
        };
        let d_ee = params.omega * n + params.omega0 - lambda;
        let d_gg = params.omega * n - params.omega0 - lambda;
        if u != 0.0 && (d_ee.abs() < tol || d_gg.abs() < tol) {
            return Err(Error::NearPole { j, lambda });
        }
        let (ge, eg) = from_bell(f1[j], 0.0);
        let base = 4 * j;
        v[base] = if u == 0.0 { 0.0 } else { -scale * u / d_ee };
        v[base + 1] = if u == 0.0 { 0.0 } else { -scale * u / d_gg };
        v[base + 2] = ge;
        v[base + 3] = eg;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidState("f₁ is identically zero".into()));
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub index: usize,
    pub eigenvalue: f64,
    pub residual: RecurrenceResidual,
}

/// Recurrence residual of every state in a converged spectrum.
pub fn check_spectrum(c: &ConvergedSpectrum) -> Result<Vec<ResidualRow>> {
    (0..c.spectrum.len())
        .into_par_iter()
        .map(|k| {
            let lambda = c.spectrum.eigenvalues[k];
            let residual = recurrence_residual(c.spectrum.eigenvector(k), lambda, c.parity, &c.params)?;
            Ok(ResidualRow { index: k, eigenvalue: lambda, residual })
        })
        .collect()
}

/// Normalized residual bound for a state to count as confirming the recurrence.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceSummary {
    pub checked: usize,
    pub within_tol: usize,
    pub pole_flagged: usize,
    pub singlet: usize,
    pub decoupled: usize,
    pub worst_residual: f64,
    /// `within_tol / checked`, 1 when nothing was checked.
    pub pass_fraction: f64,
}

pub fn summarize(rows: &[ResidualRow], tol: f64) -> RecurrenceSummary {
    let count = |s: ResidualStatus| rows.iter().filter(|r| r.residual.status == s).count();
    let checked: Vec<f64> = rows
        .iter()
        .filter(|r| r.residual.status == ResidualStatus::Checked)
        .filter_map(|r| r.residual.residual)
        .collect();
    let within_tol = checked.iter().filter(|&&r| r <= tol).count();
    RecurrenceSummary {
        checked: checked.len(),
        within_tol,
        pole_flagged: count(ResidualStatus::PoleFlagged),
        singlet: count(ResidualStatus::SingletState),
        decoupled: count(ResidualStatus::Decoupled),
        worst_residual: checked.iter().copied().fold(0.0, f64::max),
        pass_fraction: if checked.is_empty() { 1.0 } else { within_tol as f64 / checked.len() as f64 },
    }
}

/// `|⟨v_rebuilt|v⟩|` for state `k`, rebuilding from its `Ψ₊` coefficients.
pub fn reconstruction_overlap(c: &ConvergedSpectrum, k: usize) -> Result<f64> {
    let v = c.spectrum.eigenvector(k);
    let rebuilt = reconstruct_from_f1(&psi_plus_coefficients(v), c.spectrum.eigenvalues[k], &c.params, c.parity)?;
    Ok(rebuilt.iter().zip(v).map(|(a, b)| a * b).sum::<f64>().abs())
}

/// Columns `index, eigenvalue, residual, pole_flag`; skipped states have an
/// empty residual.
pub fn write_residual_csv<W: Write>(out: W, rows: &[ResidualRow]) -> Result<()> {
    let mut w = csvio::writer_from(out, &["index", "eigenvalue", "residual", "pole_flag"])?;
    for r in rows {
        w.write_record([
            r.index.to_string(),
            csvio::num(r.eigenvalue),
            r.residual.residual.map(csvio::num).unwrap_or_default(),
            (r.residual.status == ResidualStatus::PoleFlagged).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
