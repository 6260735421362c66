//! Result bundles: `manifest.json`, `series.csv`, `heatmaps/*.csv`,
//! `spectral.json` and, for sweeps, `sweep.csv`.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which reads back
//! to the same `f64`. A heatmap holds `n` rows of `n^{d-1}` values; the
//! flat vertex order is row-major over the coordinates with axis 0 slowest,
//! so row `i` is every vertex with first coordinate `i`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::scenario::{Scenario, SCHEMA_VERSION};
use crate::lattice::LatticeSpec;
use crate::protocols::{RunRecord, SwitchRow};
use crate::spectral::CrossingModel;

pub const SOFTWARE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub software_version: String,
    /// Resolved scenario document, or null when resolution failed.
    pub config: Value,
    pub wall_time_seconds: f64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub summary: Value,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// `step, <probes...>, norm[, fidelity_<i>...]`.
pub fn write_series(path: &Path, record: &RunRecord) -> Result<()> {
    let mut w = csv_writer(path)?;
    let fidelities = record.series.first().map_or(0, |r| r.fidelity.len());
    let mut header = vec!["step".to_string()];
    header.extend(record.probe_labels.iter().cloned());
    header.push("norm".into());
    header.extend((0..fidelities).map(|i| format!("fidelity_{i}")));
    w.write_record(&header)?;
    for row in &record.series {
        let mut fields = vec![row.step.to_string()];
        fields.extend(row.probes.iter().map(|&p| fmt_f64(p)));
        fields.push(fmt_f64(row.norm));
        fields.extend(row.fidelity.iter().map(|&f| fmt_f64(f)));
        w.write_record(&fields)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_heatmap(path: &Path, spec: &LatticeSpec, probabilities: &[f64]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for row in probabilities.chunks(spec.vertex_count() / spec.side()) {
        w.write_record(row.iter().map(|&p| fmt_f64(p)))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a CSV of floats written by this module.
pub fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display()))))
            .collect::<Result<Vec<f64>>>()?;
        out.push(row);
    }
    Ok(out)
}

pub fn spectral_json(model: &CrossingModel) -> Value {
    json!({
        "epsilon": model.epsilon,
        "closed_form_epsilon": model.closed_form_epsilon,
        "delta": model.delta,
        "t0": model.t0,
        "t_s": model.t_s,
        "m_targets": model.m_targets,
        "overlap_sv": model.overlap_sv,
        "model_eigenvalues": model.eigenpairs.iter().map(|p| p.value).collect::<Vec<_>>(),
    })
}

fn summary_json(record: &RunRecord) -> Value {
    let s = &record.summary;
    let mut v = json!({
        "steps": record.steps(),
        "probes": record.probe_labels,
        "peak_values": s.peak_values,
        "peak_steps": s.peak_steps,
        "events": record.events.iter().map(|(t, what)| json!({"step": t, "event": what})).collect::<Vec<_>>(),
    });
    if let Some(search) = &s.search {
        v["search"] = json!({
            "peak_step": search.peak_step,
            "peak_probability": search.peak_probability,
            "predicted_t0": search.predicted_t0,
            "relative_timing_error": search.relative_timing_error,
        });
    }
    if let Some(t) = &s.transfer {
        v["transfer"] = json!({
            "sender": t.sender,
            "steps": t.steps,
            "fidelity": t.fidelity,
            "intensity": t.intensity,
            "relative_intensity": t.relative_intensity,
            "sender_initial_intensity": t.sender_initial_intensity,
        });
    }
    v
}

/// What a run produced, for [`write_bundle`].
pub enum Outcome<'a> {
    Run(&'a RunRecord),
    Sweep(&'a [SwitchRow], Option<&'a CrossingModel>),
    Failed(&'a Error),
}

pub fn write_sweep(path: &Path, rows: &[SwitchRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["lambda", "fidelity", "relative_intensity", "sender_fidelity"])?;
    for r in rows {
        w.write_record([
            fmt_f64(r.lambda),
            fmt_f64(r.fidelity),
            fmt_f64(r.relative_intensity),
            fmt_f64(r.sender_fidelity),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes every file of the bundle into `dir`. The manifest is written
/// last and always, also when writing a data file fails; the returned error
/// is then that failure.
pub fn write_bundle(dir: &Path, scenario: Option<&Scenario>, outcome: Outcome<'_>, wall_time: f64) -> Result<PathBuf> {
    create_dir(dir)?;
    let mut files = Vec::new();
    let written = write_data(dir, scenario, &outcome, &mut files);
    let config = match scenario.map(Scenario::to_file) {
        Some(Ok(file)) => serde_json::to_value(file)?,
        _ => Value::Null,
    };
    let (status, error) = match (&outcome, &written) {
        (Outcome::Failed(e), _) => ("error", Some(e.to_string())),
        (_, Err(e)) => ("error", Some(e.to_string())),
        _ => ("ok", None),
    };
    let summary = match &outcome {
        Outcome::Run(record) => summary_json(record),
        _ => Value::Null,
    };
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        software_version: SOFTWARE_VERSION.into(),
        config,
        wall_time_seconds: wall_time,
        status: status.into(),
        error,
        files,
        summary,
    };
    let path = dir.join("manifest.json");
    write_json(&path, &manifest)?;
    written.map(|_| path)
}

fn write_data(dir: &Path, scenario: Option<&Scenario>, outcome: &Outcome<'_>, files: &mut Vec<String>) -> Result<()> {
    match outcome {
        Outcome::Failed(_) => Ok(()),
        Outcome::Sweep(rows, model) => {
            write_sweep(&dir.join("sweep.csv"), rows)?;
            files.push("sweep.csv".into());
            if let Some(model) = model {
                write_json(&dir.join("spectral.json"), &spectral_json(model))?;
                files.push("spectral.json".into());
            }
            Ok(())
        }
        Outcome::Run(record) => {
            write_series(&dir.join("series.csv"), record)?;
            files.push("series.csv".into());
            if !record.heatmaps.is_empty() {
                let spec = scenario
                    .map(|s| s.config.spec.clone())
                    .ok_or_else(|| Error::InvalidConfig("heatmaps need the lattice".into()))?;
                let hdir = dir.join("heatmaps");
                create_dir(&hdir)?;
                for h in &record.heatmaps {
                    let name = format!("heatmaps/step_{:06}.csv", h.step);
                    write_heatmap(&dir.join(&name), &spec, &h.probabilities)?;
                    files.push(name);
                }
            }
            if let Some(model) = &record.crossing {
                write_json(&dir.join("spectral.json"), &spectral_json(model))?;
                files.push("spectral.json".into());
            }
            Ok(())
        }
    }
}
