//! A driven, damped sender feeding a receiver that is moved halfway through
//! the run. The signal follows the receiver within about one transfer time.
use latticewave::protocols::{run_continuous, EventAction, InitialState, ScenarioConfig};
use latticewave::spectral::crossing_model;
use latticewave::*;

fn main() -> Result<()> {
    let spec = build_lattice(2, 21)?;
    let sender = spec.vertex(&[0, 0])?;
    let receiver = spec.vertex(&[10, 10])?;
    let moved = spec.vertex(&[10, 0])?;
    let far = spec.vertex(&[5, 15])?;
    let marks = MarkedSet::uniform(&spec, &[sender.clone(), receiver.clone()], 1.0)?;
    let t_s = crossing_model(&spec, &marks)?.t_s;
    let config = ScenarioConfig::new(spec, marks)
        .with_initial(InitialState::Vacuum)
        .with_damping(0.01)
        .with_source(0, Complex64::new(0.1, 0.0))
        .with_event(200, EventAction::Relocate { mark: 1, to: moved.clone() })
        .with_probe(far.clone())
        .with_steps(200 + 2 * t_s);
    let record = run_continuous(&config)?;
    for (step, what) in &record.events {
        println!("step {step}: {what}");
    }
    let columns = [&sender, &receiver, &moved, &far].map(|v| record.probe_index(v).expect("probe"));
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "step", "sender", "old", "new", "far");
    for row in record.series.iter().step_by(20) {
        let p = columns.map(|c| row.probes[c]);
        println!("{:>5} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e}", row.step, p[0], p[1], p[2], p[3]);
    }
    Ok(())
}
