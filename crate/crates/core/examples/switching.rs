//! Detuning both marks away from λ = 1 switches the transfer off. On a
//! large lattice a 10% detuning already cuts the received signal below 0.1.
use latticewave::protocols::{run_switch_probe, InitialState, ScenarioConfig};
use latticewave::*;

fn main() -> Result<()> {
    let n = 181;
    let spec = build_lattice(2, n)?;
    let marks = MarkedSet::uniform(&spec, &[spec.vertex(&[0, 0])?, spec.vertex(&[n / 2, n / 2])?], 1.0)?;
    let config = ScenarioConfig::new(spec, marks)
        .with_initial(InitialState::LocalizedAt(0))
        .with_threads(rayon::current_num_threads());
    let lambdas = [0.9, 0.95, 0.98, 1.0, 1.02, 1.05, 1.1, 2.0];
    for row in run_switch_probe(&config, &lambdas)? {
        println!(
            "lambda {:.2}: receiver fidelity {:.4}, relative intensity {:.4}, left at sender {:.4}",
            row.lambda, row.fidelity, row.relative_intensity, row.sender_fidelity
        );
    }
    Ok(())
}
