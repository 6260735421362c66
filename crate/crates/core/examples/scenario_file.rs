//! Loads a JSON scenario, runs it and writes a result bundle.
//!
//! ```text
//! cargo run --release --example scenario_file -- examples/scenarios/transfer.json out/
//! ```
use std::path::PathBuf;

use latticewave::io::{execute_to_bundle, parse_scenario, Executed};

fn main() -> latticewave::Result<()> {
    let mut args = std::env::args().skip(1);
    let here = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| here.join("examples/scenarios/transfer.json"));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("latticewave_example"));
    let (scenario, report) = parse_scenario(&path, false)?;
    for key in &report.unknown_keys {
        eprintln!("ignored unknown key {key}");
    }
    println!("{:?} on n = {}, {} marks", scenario.kind, scenario.config.spec.side(), scenario.config.marks.len());
    match execute_to_bundle(&scenario, &out)? {
        Executed::Run(record) => println!("{} steps, summary {:?}", record.steps(), record.summary.transfer),
        Executed::Sweep(rows) => println!("{} sweep rows", rows.len()),
    }
    println!("bundle written to {}", out.display());
    Ok(())
}
