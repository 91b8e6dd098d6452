//! Three-term recurrence on the Ψ₊ coefficients: residuals of numerical
//! eigenvectors and reconstruction of a full eigenvector from f₁.

use dicke::eigensolver::{converge, ConvergenceOptions};
use dicke::hamiltonian::ModelParams;
use dicke::hilbert::Parity;
use dicke::recurrence::{check_spectrum, reconstruction_overlap, recurrence_coefficients, summarize, RESIDUAL_TOL};

fn main() -> dicke::Result<()> {
    let params = ModelParams::dicke(1.0, 1.0, 1.1);
    let c = converge(&params, Parity::Positive, &ConvergenceOptions::new(400))?;
    let summary = summarize(&check_spectrum(&c)?, RESIDUAL_TOL);
    println!("{summary:?}");

    let k = 37;
    let lambda = c.spectrum.eigenvalues[k];
    let coeffs = recurrence_coefficients(Parity::Positive, lambda, &params)?;
    println!("state {k}: λ = {lambda:.10}, α₁ = {:.6}, β₀ = {:.6}", coeffs.alpha(1), coeffs.beta(0));
    println!("reconstruction overlap defect {:.1e}", (1.0 - reconstruction_overlap(&c, k)?).abs());
    Ok(())
}
