//! Concurrence, mutual information and Mandel Q of every converged state.

use dicke::eigensolver::{converge, ConvergenceOptions};
use dicke::entanglement::{diagnose, positive_mandel_fraction, write_diagnostics_csv};
use dicke::hamiltonian::ModelParams;
use dicke::hilbert::Parity;

fn main() -> dicke::Result<()> {
    let c = converge(&ModelParams::dicke(1.0, 1.0, 1.1), Parity::Positive, &ConvergenceOptions::new(100))?;
    let rows = diagnose(&c)?;
    for d in rows.iter().take(10) {
        println!(
            "{:3} λ = {:>9.5}  C = {:.6}  I = {:.6}  Q = {}",
            d.index,
            d.eigenvalue,
            d.concurrence,
            d.mutual_information,
            d.mandel_q.map_or("-".into(), |q| format!("{q:.4}"))
        );
    }
    println!("fraction with Q > 0: {:.3}", positive_mandel_fraction(&rows));
    write_diagnostics_csv(std::io::sink(), &rows)?;
    Ok(())
}
