//! Paired-singlet eigenstates of the four-qubit Dicke model.

use dicke::dynamics::verify_multiqubit_traps;
use dicke::hamiltonian::{Matching, ModelParams};

fn main() -> dicke::Result<()> {
    let params = ModelParams::dicke(1.0, 1.0, 2.0);
    let report = verify_multiqubit_traps(&params, 4, 1, 4, &Matching::sequential(4)?)?;
    for c in &report.checks {
        println!(
            "{:<24} λ = {}  ‖Hφ − λφ‖ = {:.1e}  ‖S φ‖ = {:.1e} {:.1e} {:.1e}",
            c.label, c.eigenvalue, c.eigen_residual, c.spin_norms[0], c.spin_norms[1], c.spin_norms[2]
        );
    }
    println!("all passed: {}", report.all_passed());
    Ok(())
}
