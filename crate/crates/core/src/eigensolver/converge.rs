use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{eigh_with_values, eigvalsh, Spectrum, DEFAULT_RESIDUAL_TOL};
use crate::csvio;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_parity_hamiltonian, ModelParams};
use crate::hilbert::{Parity, ParityBasis};

/// Extra eigenpairs computed past `n_states` so the last compared state has
/// neighbours on both sides.
const MARGIN: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceOptions {
    pub n_states: usize,
    pub tol_lambda: f64,
    pub tol_vector: f64,
    /// Defaults to `4 · n_states` rounded up to whole rungs.
    pub s_start: Option<usize>,
    pub s_step: usize,
    /// Defaults to `4 · s_start`.
    pub s_max: Option<usize>,
    pub residual_tol: f64,
    /// Pairs closer than `degeneracy_tol · ω` are treated as degenerate.
    pub degeneracy_tol: f64,
}

impl ConvergenceOptions {
    pub fn new(n_states: usize) -> Self {
        ConvergenceOptions {
            n_states,
            tol_lambda: 1e-10,
            tol_vector: 1e-10,
            s_start: None,
            s_step: 4,
            s_max: None,
            residual_tol: DEFAULT_RESIDUAL_TOL,
            degeneracy_tol: 1e-9,
        }
    }

    pub fn start(&self) -> usize {
        self.s_start.unwrap_or((4 * self.n_states).div_ceil(4) * 4)
    }

    pub fn max(&self) -> usize {
        self.s_max.unwrap_or(4 * self.start())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_states == 0 {
            return bad("n_states must be at least 1".into());
        }
        if !(self.tol_lambda > 0.0 && self.tol_vector > 0.0 && self.residual_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.start() < 4 * self.n_states {
            return bad(format!(
                "S_start = {} is below 4·N = {}",
                self.start(),
                4 * self.n_states
            ));
        }
        if self.s_step == 0 || !self.s_step.is_multiple_of(4) {
            return bad(format!("S_step must be a positive multiple of 4, got {}", self.s_step));
        }
        if self.max() < self.start() + self.s_step {
            return bad(format!(
                "S_max = {} leaves no room for a step from {}",
                self.max(),
                self.start()
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ConvergedSpectrum {
    pub params: ModelParams,
    pub parity: Parity,
    /// The lowest `n_states` eigenpairs at `final_size`.
    pub spectrum: Spectrum,
    /// Length of the leading run of states within both tolerances.
    pub n_converged: usize,
    pub delta_lambda: Vec<f64>,
    pub delta_vector: Vec<f64>,
    /// States whose overlap was taken against a degenerate cluster.
    pub degenerate: Vec<bool>,
    pub final_size: usize,
    pub converged: bool,
    /// `(S, max δλ, max ΔV)` for every comparison made.
    pub history: Vec<(usize, f64, f64)>,
}

impl ConvergedSpectrum {
    pub fn basis(&self) -> ParityBasis {
        ParityBasis::new(self.parity, self.final_size).expect("recorded size is valid")
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn max_delta_lambda(&self) -> f64 {
        self.delta_lambda.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_delta_vector(&self) -> f64 {
        self.delta_vector.iter().copied().fold(0.0, f64::max)
    }
}

/// Errors between two truncations `S` and `S + ΔS` for the lowest states.
#[derive(Clone, Debug)]
pub struct TruncationComparison {
    pub size: usize,
    pub delta_lambda: Vec<f64>,
    pub delta_vector: Option<Vec<f64>>,
    pub degenerate: Vec<bool>,
}

struct Solved {
    size: usize,
    values: Vec<f64>,
    spectrum: Option<Spectrum>,
}

fn solve(
    params: &ModelParams,
    parity: Parity,
    size: usize,
    needed: usize,
    vectors: bool,
    opts: &ConvergenceOptions,
) -> Result<Solved> {
    let basis = ParityBasis::new(parity, size)?;
    let h = build_parity_hamiltonian(params, &basis)?;
    let values = eigvalsh(&h)?;
    let spectrum = if vectors {
        let gap = opts.degeneracy_tol * params.omega;
        let mut count = (needed + MARGIN).min(size);
        while count < size && values[count] - values[count - 1] < gap {
            count += 1;
        }
        Some(eigh_with_values(&h, values.clone(), count, opts.residual_tol)?)
    } else {
        None
    };
    Ok(Solved {
        size,
        values,
        spectrum,
    })
}

fn cluster(values: &[f64], k: usize, gap: f64) -> std::ops::Range<usize> {
    let mut lo = k;
    while lo > 0 && values[lo] - values[lo - 1] < gap {
        lo -= 1;
    }
    let mut hi = k + 1;
    while hi < values.len() && values[hi] - values[hi - 1] < gap {
        hi += 1;
    }
    lo..hi
}

fn compare(
    small: &Solved,
    large: &Solved,
    n_states: usize,
    gap: f64,
) -> (Vec<f64>, Option<Vec<f64>>, Vec<bool>) {
    let delta_lambda: Vec<f64> = (0..n_states)
        .map(|k| (small.values[k] - large.values[k]).abs())
        .collect();
    let mut degenerate = vec![false; n_states];
    let delta_vector = match (&small.spectrum, &large.spectrum) {
        (Some(a), Some(b)) => {
            let mut out = Vec::with_capacity(n_states);
            for k in 0..n_states {
                let v = a.eigenvector(k);
                let overlap = |m: usize| -> f64 {
                    let w = b.eigenvector(m);
                    v.iter().zip(w).map(|(x, y)| x * y).sum()
                };
                let ca = cluster(&a.eigenvalues, k, gap);
                let cb = cluster(&b.eigenvalues, k, gap);
                let dv = if ca.len() > 1 || cb.len() > 1 {
                    degenerate[k] = true;
                    let projected: f64 = cb.map(|m| overlap(m).powi(2)).sum();
                    1.0 - projected.sqrt()
                } else {
                    1.0 - overlap(k).abs()
                };
                out.push(dv.max(0.0));
            }
            Some(out)
        }
        _ => None,
    };
    (delta_lambda, delta_vector, degenerate)
}

/// Compare the lowest `n_states` at truncation `size` against `size + step`.
/// Eigenvectors (and hence `delta_vector`) only when `with_vectors`.
pub fn compare_truncations(
    params: &ModelParams,
    parity: Parity,
    n_states: usize,
    size: usize,
    step: usize,
    with_vectors: bool,
) -> Result<TruncationComparison> {
    if n_states == 0 || n_states > size {
        return Err(Error::InvalidParameter(format!(
            "cannot compare {n_states} states at S = {size}"
        )));
    }
    let opts = ConvergenceOptions::new(n_states);
    let gap = opts.degeneracy_tol * params.omega;
    let small = solve(params, parity, size, n_states, with_vectors, &opts)?;
    let large = solve(params, parity, size + step, n_states, with_vectors, &opts)?;
    let (delta_lambda, delta_vector, degenerate) = compare(&small, &large, n_states, gap);
    Ok(TruncationComparison {
        size,
        delta_lambda,
        delta_vector,
        degenerate,
    })
}

/// Grow the truncation one step at a time until the lowest `n_states`
/// eigenpairs agree between `S` and `S + S_step`.
///
/// Reaching `S_max` returns the last comparison with `converged = false`.
pub fn converge(
    params: &ModelParams,
    parity: Parity,
    opts: &ConvergenceOptions,
) -> Result<ConvergedSpectrum> {
    opts.validate()?;
    params.validate()?;
    let n = opts.n_states;
    let gap = opts.degeneracy_tol * params.omega;
    let mut current = solve(params, parity, opts.start(), n, true, opts)?;
    let mut history = Vec::new();

    loop {
        let next = solve(params, parity, current.size + opts.s_step, n, true, opts)?;
        let (delta_lambda, delta_vector, degenerate) = compare(&current, &next, n, gap);
        let delta_vector = delta_vector.expect("vectors requested");
        let n_converged = delta_lambda
            .iter()
            .zip(&delta_vector)
            .take_while(|(l, v)| **l <= opts.tol_lambda && **v <= opts.tol_vector)
            .count();
        history.push((
            current.size,
            delta_lambda.iter().copied().fold(0.0, f64::max),
            delta_vector.iter().copied().fold(0.0, f64::max),
        ));
        let converged = n_converged == n;
        if converged || next.size + opts.s_step > opts.max() {
            let mut spectrum = current.spectrum.take().expect("vectors requested");
            spectrum.eigenvalues.truncate(n);
            spectrum.eigenvectors = spectrum.eigenvectors.columns(0, n).into_owned();
            return Ok(ConvergedSpectrum {
                params: *params,
                parity,
                spectrum,
                n_converged,
                delta_lambda,
                delta_vector,
                degenerate,
                final_size: current.size,
                converged,
                history,
            });
        }
        current = next;
    }
}

/// Columns `index, eigenvalue, delta_lambda, delta_vector`.
pub fn write_spectrum_csv<W: Write>(out: W, c: &ConvergedSpectrum) -> Result<()> {
    let mut w = csvio::writer_from(out, &["index", "eigenvalue", "delta_lambda", "delta_vector"])?;
    for k in 0..c.spectrum.len() {
        w.write_record([
            k.to_string(),
            csvio::num(c.spectrum.eigenvalues[k]),
            csvio::num(c.delta_lambda[k]),
            csvio::num(c.delta_vector[k]),
        ])?;
    }
    w.flush()?;
    Ok(())
}
