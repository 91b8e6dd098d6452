//! A small on-resonance ensemble written to a temporary directory.

use dicke::classify::format_table;
use dicke::sweep::{run_sweep, SweepConfig, SweepMode};

fn main() -> dicke::Result<()> {
    let dir = tempfile::tempdir()?;
    let config = SweepConfig::new(SweepMode::OnResonanceGrid, 8, 100);
    let outcome = run_sweep(&config, dir.path(), false)?;
    for s in &outcome.manifest.samples {
        println!("g = {:.4}  S = {:?}  converged {}", s.params.g, s.final_size, s.converged);
    }
    if let Some(t) = &outcome.table {
        print!("{}", format_table(std::slice::from_ref(t)));
    }
    Ok(())
}
