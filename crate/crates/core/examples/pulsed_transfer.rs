//! One sender, m − 1 receivers: what each mark holds after the transfer time.
use latticewave::protocols::{run_transfer, InitialState, ScenarioConfig};
use latticewave::*;

fn main() -> Result<()> {
    let spec = build_lattice(2, 21)?;
    let places = [[0, 0], [10, 10], [0, 10], [10, 0], [5, 15]];
    let places: Vec<VertexIndex> = places.iter().map(|c| spec.vertex(c)).collect::<Result<_>>()?;
    for m in 2..=5 {
        let marks = MarkedSet::uniform(&spec, &places[..m], 1.0)?;
        let config = ScenarioConfig::new(spec, marks).with_initial(InitialState::LocalizedAt(m - 1));
        let t = run_transfer(&config)?.summary.transfer.expect("transfer summary");
        let receivers: Vec<String> = t.relative_intensity[..m - 1].iter().map(|x| format!("{x:.3}")).collect();
        println!(
            "m = {m}, T_s = {}: sender {:.3} (expect {:.3}), receivers [{}] (expect {:.3}), fidelity {:.3}",
            t.steps,
            t.relative_intensity[m - 1],
            (1.0 - 2.0 / m as f64).powi(2),
            receivers.join(" "),
            4.0 / (m * m) as f64,
            t.fidelity[0]
        );
    }
    Ok(())
}
