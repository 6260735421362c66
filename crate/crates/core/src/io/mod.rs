//! Scenario files in, result bundles out.

mod bundle;
mod scenario;

pub use bundle::{
    fmt_f64, read_matrix, spectral_json, write_bundle, write_heatmap, write_json, write_series, write_sweep, Manifest,
    Outcome, SOFTWARE_VERSION,
};
pub use scenario::{
    parse_scenario, parse_scenario_file, parse_scenario_str, resolve, ActionSpec, AmplitudeSpec, EventSpec,
    InitialSpec, LatticeSection, MarkEntry, OutputSection, ParseReport, PerturberSpec, Scenario, ScenarioFile,
    ScenarioKind, ScenarioSection, SourceSpec, DEFAULT_SWEEP_LAMBDAS, SCHEMA_VERSION,
};

use std::time::Instant;

use crate::error::Result;
use crate::protocols::{run_continuous, run_search, run_switch_probe, run_transfer, RunRecord, SwitchRow};

/// Result of executing a resolved scenario.
pub enum Executed {
    Run(RunRecord),
    Sweep(Vec<SwitchRow>),
}

/// Runs the protocol selected by the scenario kind.
pub fn execute(scenario: &Scenario) -> Result<Executed> {
    let c = &scenario.config;
    Ok(match scenario.kind {
        ScenarioKind::Search => Executed::Run(run_search(c)?),
        ScenarioKind::Transfer => Executed::Run(run_transfer(c)?),
        ScenarioKind::Continuous => Executed::Run(run_continuous(c)?),
        ScenarioKind::Sweep => Executed::Sweep(run_switch_probe(c, &scenario.lambdas)?),
    })
}

/// Executes a scenario and writes its bundle to `dir`, including the
/// manifest when the run fails.
pub fn execute_to_bundle(scenario: &Scenario, dir: &std::path::Path) -> Result<Executed> {
    let start = Instant::now();
    match execute(scenario) {
        Ok(done) => {
            let outcome = match &done {
                Executed::Run(r) => Outcome::Run(r),
                Executed::Sweep(rows) => Outcome::Sweep(rows, None),
            };
            write_bundle(dir, Some(scenario), outcome, start.elapsed().as_secs_f64())?;
            Ok(done)
        }
        Err(e) => {
            write_bundle(dir, Some(scenario), Outcome::Failed(&e), start.elapsed().as_secs_f64())?;
            Err(e)
        }
    }
}
