//! The banded solver on its own: a parity Hamiltonian, all eigenvalues, the
//! lowest eigenvectors, and their residuals.

use dicke::eigensolver::{eigh_lowest, eigvalsh, DEFAULT_RESIDUAL_TOL};
use dicke::hamiltonian::{build_parity_hamiltonian, ModelParams};
use dicke::hilbert::{Parity, ParityBasis};

fn main() -> dicke::Result<()> {
    let params = ModelParams::dicke(1.0, 0.7, 2.0).with_dipole([0.1, 0.2, 0.3]);
    let basis = ParityBasis::new(Parity::Negative, 800)?;
    let h = build_parity_hamiltonian(&params, &basis)?;
    println!("dimension {}, half-bandwidth {}", h.dimension(), h.half_bandwidth());

    let values = eigvalsh(&h)?;
    println!("lowest five: {:?}", &values[..5]);

    let s = eigh_lowest(&h, 50, DEFAULT_RESIDUAL_TOL)?;
    println!("max relative residual {:.2e}", s.max_relative_residual(&h));
    println!("orthonormality error {:.2e}", s.orthonormality_error());
    Ok(())
}
