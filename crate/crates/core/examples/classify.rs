//! Four interleaved classes of the spectrum and their mean spacings.

use dicke::classify::{classify_spectrum, singlet_statistics, spacing_statistics};
use dicke::eigensolver::{converge, ConvergenceOptions};
use dicke::entanglement::diagnose;
use dicke::hamiltonian::ModelParams;
use dicke::hilbert::Parity;

fn main() -> dicke::Result<()> {
    let c = converge(&ModelParams::dicke(1.0, 1.0, 1.1), Parity::Positive, &ConvergenceOptions::new(400))?;
    let report = classify_spectrum(&c, &diagnose(&c)?)?;
    println!("singlet class {:?}, interleaving broken: {}", report.singlet_class, report.interleaving_broken);
    for (r, s) in spacing_statistics(&report)?.iter().enumerate() {
        println!("λ_(4n+{r}): mean spacing {:.6} ± {:.2e}", s.mean, s.std);
    }
    if let Some(s) = singlet_statistics(&report) {
        println!("singlet states: {:.12} ± {:.1e}", s.mean, s.std);
    }
    Ok(())
}
