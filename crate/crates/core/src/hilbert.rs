//! Parity-subspace bases of Fock ⊗ (two qubits).
//!
//! Each parity subspace is enumerated in rungs of four states. For positive
//! parity rung `k` holds `|2k,ee⟩, |2k,gg⟩, |2k+1,ge⟩, |2k+1,eg⟩`; for negative
//! parity it holds `|2k+1,ee⟩, |2k+1,gg⟩, |2k,ge⟩, |2k,eg⟩`. The ordering is fixed
//! so eigenvector files are comparable across runs.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Positive,
    Negative,
}

impl Parity {
    pub fn other(self) -> Parity {
        match self {
            Parity::Positive => Parity::Negative,
            Parity::Negative => Parity::Positive,
        }
    }

    /// Parity of the sector containing `|n⟩ ⊗ label`.
    pub fn of(photon: usize, label: QubitLabel) -> Parity {
        let even = photon.is_multiple_of(2);
        match (label.is_aligned(), even) {
            (true, true) | (false, false) => Parity::Positive,
            _ => Parity::Negative,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Positive => write!(f, "positive"),
            Parity::Negative => write!(f, "negative"),
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" | "+" => Ok(Parity::Positive),
            "negative" | "-" => Ok(Parity::Negative),
            other => Err(Error::InvalidParameter(format!("unknown parity '{other}'"))),
        }
    }
}

/// Bare two-qubit label, first letter for qubit 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QubitLabel {
    Ee,
    Gg,
    Ge,
    Eg,
}

impl QubitLabel {
    /// Rung slot order.
    pub const SLOTS: [QubitLabel; 4] = [QubitLabel::Ee, QubitLabel::Gg, QubitLabel::Ge, QubitLabel::Eg];

    /// `true` for `ee`/`gg`, the labels sharing photon parity with the sector sign.
    pub fn is_aligned(self) -> bool {
        matches!(self, QubitLabel::Ee | QubitLabel::Gg)
    }

    pub fn slot(self) -> usize {
        match self {
            QubitLabel::Ee => 0,
            QubitLabel::Gg => 1,
            QubitLabel::Ge => 2,
            QubitLabel::Eg => 3,
        }
    }

    /// Index in the computational register `(q1 q2)` with `e = 0`, `g = 1`:
    /// `ee = 0, eg = 1, ge = 2, gg = 3`.
    pub fn register_index(self) -> usize {
        match self {
            QubitLabel::Ee => 0,
            QubitLabel::Eg => 1,
            QubitLabel::Ge => 2,
            QubitLabel::Gg => 3,
        }
    }

    /// Eigenvalue of `S_z = s_z⁽¹⁾ + s_z⁽²⁾`.
    pub fn sz(self) -> f64 {
        match self {
            QubitLabel::Ee => 1.0,
            QubitLabel::Gg => -1.0,
            QubitLabel::Ge | QubitLabel::Eg => 0.0,
        }
    }

    /// Eigenvalue of `s_z⁽¹⁾ − s_z⁽²⁾`.
    pub fn sz_difference(self) -> f64 {
        match self {
            QubitLabel::Eg => 1.0,
            QubitLabel::Ge => -1.0,
            QubitLabel::Ee | QubitLabel::Gg => 0.0,
        }
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QubitLabel::Ee => "ee",
            QubitLabel::Gg => "gg",
            QubitLabel::Ge => "ge",
            QubitLabel::Eg => "eg",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisState {
    pub photon: usize,
    pub qubits: QubitLabel,
}

impl BasisState {
    pub fn new(photon: usize, qubits: QubitLabel) -> Self {
        BasisState { photon, qubits }
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}⟩", self.photon, self.qubits)
    }
}

/// Ordered basis of one parity subspace truncated to whole rungs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityBasis {
    parity: Parity,
    states: Vec<BasisState>,
}

impl ParityBasis {
    pub fn new(parity: Parity, size: usize) -> Result<Self> {
        if size == 0 || !size.is_multiple_of(4) {
            return Err(Error::InvalidBasisSize(size));
        }
        let states = (0..size)
            .map(|i| Self::state_at(parity, i))
            .collect();
        Ok(ParityBasis { parity, states })
    }

    fn state_at(parity: Parity, index: usize) -> BasisState {
        let rung = index / 4;
        let label = QubitLabel::SLOTS[index % 4];
        let photon = match (parity, label.is_aligned()) {
            (Parity::Positive, true) | (Parity::Negative, false) => 2 * rung,
            _ => 2 * rung + 1,
        };
        BasisState::new(photon, label)
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn rung_count(&self) -> usize {
        self.states.len() / 4
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> BasisState {
        self.states[index]
    }

    pub fn max_photon(&self) -> usize {
        self.states.iter().map(|s| s.photon).max().unwrap_or(0)
    }

    /// Index of `state`, or `None` if it lies in the other parity or beyond the truncation.
    pub fn index_of(&self, state: BasisState) -> Option<usize> {
        if Parity::of(state.photon, state.qubits) != self.parity {
            return None;
        }
        let rung = match (self.parity, state.qubits.is_aligned()) {
            (Parity::Positive, true) | (Parity::Negative, false) => state.photon / 2,
            _ => (state.photon - 1) / 2,
        };
        let index = 4 * rung + state.qubits.slot();
        (index < self.states.len()).then_some(index)
    }

    /// Largest `|i − j|` over pairs coupled by `(a + a†) S_x` or the in-rung dipole terms.
    pub fn half_bandwidth(&self) -> usize {
        match self.parity {
            Parity::Positive => 3,
            Parity::Negative => 7,
        }
        .min(self.states.len().saturating_sub(1))
    }

    /// Index into a dense `Fock(n_fock) ⊗ qubit ⊗ qubit` register.
    pub fn dense_index(&self, index: usize) -> usize {
        let s = self.states[index];
        4 * s.photon + s.qubits.register_index()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// Rows: `Φ₊, Φ₋, Ψ₊, Ψ₋`; columns: `ee, gg, ge, eg`.
/// `Φ± = (|gg⟩ ± |ee⟩)/√2`, `Ψ± = (|ge⟩ ± |eg⟩)/√2`.
pub const BELL_TRANSFORM: [[f64; 4]; 4] = [
    [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0],
    [-FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0],
    [0.0, 0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2],
    [0.0, 0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
];

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    /// Amplitudes on `(ee, gg, ge, eg)`.
    pub fn amplitudes(self) -> [f64; 4] {
        BELL_TRANSFORM[self as usize]
    }
}

/// Rotates `(c_ge, c_eg)` onto `(c_Ψ₊, c_Ψ₋)`.
pub fn to_bell(c_ge: f64, c_eg: f64) -> (f64, f64) {
    ((c_ge + c_eg) * FRAC_1_SQRT_2, (c_ge - c_eg) * FRAC_1_SQRT_2)
}

/// Inverse of [`to_bell`].
pub fn from_bell(c_psi_plus: f64, c_psi_minus: f64) -> (f64, f64) {
    (
        (c_psi_plus + c_psi_minus) * FRAC_1_SQRT_2,
        (c_psi_plus - c_psi_minus) * FRAC_1_SQRT_2,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smallest_rungs() {
        let pos = ParityBasis::new(Parity::Positive, 4).unwrap();
        let expected = [
            BasisState::new(0, QubitLabel::Ee),
            BasisState::new(0, QubitLabel::Gg),
            BasisState::new(1, QubitLabel::Ge),
            BasisState::new(1, QubitLabel::Eg),
        ];
        assert_eq!(pos.states(), &expected);

        let neg = ParityBasis::new(Parity::Negative, 4).unwrap();
        let expected = [
            BasisState::new(1, QubitLabel::Ee),
            BasisState::new(1, QubitLabel::Gg),
            BasisState::new(0, QubitLabel::Ge),
            BasisState::new(0, QubitLabel::Eg),
        ];
        assert_eq!(neg.states(), &expected);
    }

    #[test]
    fn rejects_partial_rungs() {
        for s in [0, 1, 3, 6, 4001] {
            assert!(matches!(
                ParityBasis::new(Parity::Positive, s),
                Err(Error::InvalidBasisSize(_))
            ));
        }
    }

    #[test]
    fn large_basis_photon_range() {
        let basis = ParityBasis::new(Parity::Positive, 4000).unwrap();
        // direct enumeration of the rung structure
        let mut max_aligned = 0;
        let mut max_anti = 0;
        for k in 0..1000 {
            max_aligned = max_aligned.max(2 * k);
            max_anti = max_anti.max(2 * k + 1);
        }
        let aligned = basis
            .states()
            .iter()
            .filter(|s| s.qubits.is_aligned())
            .map(|s| s.photon)
            .max()
            .unwrap();
        let anti = basis
            .states()
            .iter()
            .filter(|s| !s.qubits.is_aligned())
            .map(|s| s.photon)
            .max()
            .unwrap();
        assert_eq!(aligned, max_aligned);
        assert_eq!(anti, max_anti);
        assert_eq!(basis.max_photon(), 1999);
        assert_eq!(basis.rung_count(), 1000);
    }

    #[test]
    fn parity_constraint_holds() {
        for parity in [Parity::Positive, Parity::Negative] {
            let basis = ParityBasis::new(parity, 64).unwrap();
            for s in basis.states() {
                assert_eq!(Parity::of(s.photon, s.qubits), parity);
            }
        }
    }

    #[test]
    fn bases_cover_each_pair_once() {
        let pos = ParityBasis::new(Parity::Positive, 40).unwrap();
        let neg = ParityBasis::new(Parity::Negative, 40).unwrap();
        let mut seen = std::collections::HashSet::new();
        for s in pos.states().iter().chain(neg.states()) {
            assert!(seen.insert(*s), "{s} appears twice");
        }
        // every (photon ≤ 19, label) pair appears
        for n in 0..20 {
            for label in QubitLabel::SLOTS {
                assert!(seen.contains(&BasisState::new(n, label)));
            }
        }
        assert_eq!(seen.len(), 80);
    }

    #[test]
    fn out_of_range_lookup() {
        let pos = ParityBasis::new(Parity::Positive, 8).unwrap();
        assert_eq!(pos.index_of(BasisState::new(1, QubitLabel::Ee)), None);
        assert_eq!(pos.index_of(BasisState::new(4, QubitLabel::Ee)), None);
        assert_eq!(pos.index_of(BasisState::new(3, QubitLabel::Eg)), Some(7));
    }

    #[test]
    fn bell_examples() {
        let r = FRAC_1_SQRT_2;
        let (p, m) = to_bell(r, r);
        assert!((p - 1.0).abs() < 1e-15 && m.abs() < 1e-15);
        let (p, m) = to_bell(r, -r);
        assert!(p.abs() < 1e-15 && (m - 1.0).abs() < 1e-15);
        let (p, m) = to_bell(1.0, 0.0);
        assert!((p - r).abs() < 1e-15 && (m - r).abs() < 1e-15);
    }

    #[test]
    fn bell_transform_is_orthogonal() {
        for i in 0..4 {
            for j in 0..4 {
                let dot: f64 = (0..4).map(|k| BELL_TRANSFORM[i][k] * BELL_TRANSFORM[j][k]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn to_bell_preserves_norm_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            let (p, m) = to_bell(a, b);
            assert!((p * p + m * m - (a * a + b * b)).abs() <= 1e-14);
        }
    }

    proptest! {
        #[test]
        fn index_round_trip(rungs in 1usize..300, positive in any::<bool>()) {
            let parity = if positive { Parity::Positive } else { Parity::Negative };
            let basis = ParityBasis::new(parity, 4 * rungs).unwrap();
            for i in 0..basis.len() {
                prop_assert_eq!(basis.index_of(basis.state(i)), Some(i));
            }
        }

        #[test]
        fn bell_round_trip(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            let (p, m) = to_bell(a, b);
            let (x, y) = from_bell(p, m);
            prop_assert!((x - a).abs() <= 1e-12 * (1.0 + a.abs()));
            prop_assert!((y - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }
}
