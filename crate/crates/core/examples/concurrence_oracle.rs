//! Closed-form X-state concurrence against the spin-flip route, and the
//! Werner state.

use dicke::entanglement::{concurrence, concurrence_bruteforce, mutual_information, XState};
use num_complex::Complex64;

fn main() -> dicke::Result<()> {
    // Werner state p|Ψ₋⟩⟨Ψ₋| + (1 − p) I/4 at p = 0.5
    let p = 0.5;
    let w = XState {
        r_ee: (1.0 - p) / 4.0,
        r_gg: (1.0 - p) / 4.0,
        r_psi: (1.0 - p) / 8.0,
        r_eg: Complex64::new(0.0, 0.0),
        r_sing: p + (1.0 - p) / 4.0,
        r_mix: Complex64::new(0.0, 0.0),
    };
    let rho = w.to_density();
    println!("Werner p = 0.5: C = {:.15}, brute force {:.15}", concurrence(&w)?, concurrence_bruteforce(&rho)?);
    println!("mutual information {:.6}", mutual_information(&rho)?);

    let x = XState::new(0.1, 0.3, 0.3, Complex64::new(0.05, -0.1))?;
    println!("triplet X-state: C = {:.15}, brute force {:.15}", concurrence(&x)?, concurrence_bruteforce(&x.to_density())?);
    Ok(())
}
