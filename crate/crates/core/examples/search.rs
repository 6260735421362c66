//! Spatial search for one mark on a 31×31 torus, printed as a text heatmap
//! at the peak.
use latticewave::protocols::{run_search, ScenarioConfig};
use latticewave::*;

fn main() -> Result<()> {
    let spec = build_lattice(2, 31)?;
    let target = spec.vertex(&[15, 15])?;
    let marks = MarkedSet::single(&spec, target.clone(), 1.0)?;
    let record = run_search(&ScenarioConfig::new(spec, marks).with_heatmap_every(1))?;
    let s = record.summary.search.as_ref().expect("search summary");
    println!(
        "peak p = {:.4} at step {} (predicted {}, error {:.1}%)",
        s.peak_probability,
        s.peak_step,
        s.predicted_t0,
        100.0 * s.relative_timing_error
    );
    let map = &record.heatmaps[s.peak_step].probabilities;
    let shades = [' ', '.', ':', '+', '#'];
    for row in map.chunks(31) {
        let line: String = row
            .iter()
            .map(|&p| shades[((p / s.peak_probability).sqrt() * 4.0).round().min(4.0) as usize])
            .collect();
        println!("{line}");
    }
    Ok(())
}
