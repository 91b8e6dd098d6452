//! Converged lowest eigenvalues of one parity subspace, with the singlet
//! ladder λ = ωn picked out.

use dicke::eigensolver::{converge, ConvergenceOptions};
use dicke::entanglement::singlet_weight;
use dicke::hamiltonian::ModelParams;
use dicke::hilbert::Parity;

fn main() -> dicke::Result<()> {
    let params = ModelParams::dicke(1.0, 1.0, 1.1);
    let c = converge(&params, Parity::Positive, &ConvergenceOptions::new(400))?;
    println!(
        "S = {}, converged = {}, max δλ = {:.2e}, max ΔV = {:.2e}",
        c.final_size,
        c.converged,
        c.max_delta_lambda(),
        c.max_delta_vector()
    );
    let basis = c.basis();
    for k in 0..12 {
        let w = singlet_weight(c.spectrum.eigenvector(k), &basis);
        let tag = if w > 1.0 - 1e-10 { "  singlet" } else { "" };
        println!("{k:3}  {:>14.10}{tag}", c.spectrum.eigenvalues[k]);
    }
    Ok(())
}
