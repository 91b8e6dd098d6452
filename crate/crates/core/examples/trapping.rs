//! A singlet trap coupled to a qubit bath and a field bath, with driving and
//! dipole terms, against a Φ₋ trap of the variant under Ω_y driving.

use dicke::dynamics::{time_grid, trapping_fidelity, QubitFactor, TrappingState};
use dicke::hamiltonian::{EnvironmentMode, EnvironmentParams, ModelParams};

fn main() -> dicke::Result<()> {
    let env = EnvironmentParams {
        qubit_modes: vec![EnvironmentMode::unit(4)],
        field_modes: vec![EnvironmentMode::unit(4)],
    };
    let times = time_grid(50.0, 101);

    let dicke = ModelParams::dicke(1.0, 1.0, 1.1).with_drive(0.3, 0.0).with_dipole([0.1; 3]);
    let trap = TrappingState::new(1, QubitFactor::SingletPairs, &env);
    let trace = trapping_fidelity(&dicke, &env, &trap, 8, &times)?;
    println!("singlet trap, dim {}: fidelity defect {:.1e}", trace.dimension, (1.0 - trace.min_fidelity()).abs());

    let variant = ModelParams::variant(1.0, 1.0, 1.1).with_drive(0.0, 0.3);
    let trap = TrappingState::new(1, QubitFactor::PhiMinusPairs, &env);
    let trace = trapping_fidelity(&variant, &env, &trap, 8, &times)?;
    println!("Φ₋ trap with Ω_y: min fidelity {:.4}", trace.min_fidelity());
    Ok(())
}
