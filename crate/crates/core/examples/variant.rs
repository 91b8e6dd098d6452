//! The variant model: rotation equivalence with the Dicke model and the
//! trapped Φ₋ states with mutual information 2.

use dicke::entanglement::{mutual_information, reduce_to_density};
use dicke::hamiltonian::{build_dense_hamiltonian, second_qubit_rotation, ModelParams};
use dicke::hilbert::ParityBasis;
use dicke::recurrence::variant_trapped_eigenpair;

fn main() -> dicke::Result<()> {
    let n_fock = 6;
    let h1 = build_dense_hamiltonian(&ModelParams::dicke(1.0, 0.8, 1.3), n_fock, 2)?;
    let h2 = build_dense_hamiltonian(&ModelParams::variant(1.0, 0.8, 1.3), n_fock, 2)?;
    let r = second_qubit_rotation(n_fock)?;
    let diff = (&r * h1 * r.adjoint() - h2).iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("max |R H₁ R† − H₂| = {diff:.1e}");

    let params = ModelParams::variant(1.0, 0.8, 1.3).with_dipole([0.1, 0.2, 0.3]);
    for n in 0..4 {
        let pair = variant_trapped_eigenpair(n, &params)?;
        let basis = ParityBasis::new(pair.parity, 64)?;
        let v = pair.state_on(&basis)?;
        let rho = reduce_to_density(&v, &basis)?;
        println!(
            "n = {n}: λ = {:.4}, residual {:.1e}, I = {:.12}",
            pair.eigenvalue,
            pair.residual(&params, &basis)?,
            mutual_information(&rho)?
        );
    }
    Ok(())
}
