//! The crossing gap grows like √m with the number of marks.
use latticewave::spectral::{crossing_model, measure_gap};
use latticewave::*;

fn main() -> Result<()> {
    let spec = build_lattice(2, 21)?;
    let places = [[0, 0], [10, 10], [0, 10], [10, 0]];
    let places: Vec<VertexIndex> = places.iter().map(|c| spec.vertex(c)).collect::<Result<_>>()?;
    let single = measure_gap(&spec, &MarkedSet::single(&spec, places[0].clone(), 1.0)?, 8192)?.gap;
    for m in 1..=4 {
        let marks = MarkedSet::uniform(&spec, &places[..m], 1.0)?;
        let gap = measure_gap(&spec, &marks, 8192)?.gap;
        let model = crossing_model(&spec, &marks)?;
        println!(
            "m = {m}: gap {gap:.6} (model {:.6}), gap/gap1 = {:.4}, sqrt(m) = {:.4}",
            model.delta,
            gap / single,
            (m as f64).sqrt()
        );
    }
    Ok(())
}
