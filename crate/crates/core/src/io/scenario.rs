//! JSON scenario files.
//!
//! ```json
//! {
//!   "lattice": { "d": 2, "n": 31 },
//!   "marks": [ { "vertex": [15, 15], "lambda": 1.0 } ],
//!   "scenario": { "kind": "search", "steps": 90 },
//!   "output": { "heatmap_every": 15, "out_path": "out/search" }
//! }
//! ```
//!
//! Optional scenario keys: `steps`, `damping`, `initial` (`"uniform"`,
//! `"vacuum"` or `{"localized_at": i}`), `source` (`{"mark": i,
//! "amplitude": a}` with `a` a number or `[re, im]`), `events`
//! (`{"step": t, "action": {"relocate": {"mark": i, "to": [..]}}}` or
//! `{"set_lambda": {"mark": i, "lambda": l}}`), `lambdas` for sweeps and
//! `perturber` (`"dense"` or `"formula"`).

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{build_lattice, LatticeSpec, VertexIndex};
use crate::marks::MarkedSet;
use crate::protocols::{EventAction, InitialState, ScenarioConfig};
use crate::spectral::{crossing_model_from, perturber_state, PerturberMethod};

pub const SCHEMA_VERSION: u32 = 1;

/// Detunings probed by a sweep that lists none.
pub const DEFAULT_SWEEP_LAMBDAS: [f64; 9] = [0.9, 0.95, 0.98, 0.99, 1.0, 1.01, 1.02, 1.05, 1.1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Search,
    Transfer,
    Continuous,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub lattice: LatticeSection,
    pub marks: Vec<MarkEntry>,
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSection {
    pub d: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkEntry {
    pub vertex: Vec<i64>,
    #[serde(default = "one")]
    pub lambda: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSection {
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<EventSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturber: Option<PerturberSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialSpec {
    Uniform,
    Vacuum,
    LocalizedAt(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub mark: usize,
    pub amplitude: AmplitudeSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AmplitudeSpec {
    Real(f64),
    Complex([f64; 2]),
}

impl AmplitudeSpec {
    pub fn value(self) -> Complex64 {
        match self {
            AmplitudeSpec::Real(re) => Complex64::new(re, 0.0),
            AmplitudeSpec::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    pub step: usize,
    pub action: ActionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSpec {
    Relocate { mark: usize, to: Vec<i64> },
    SetLambda { mark: usize, lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturberSpec {
    Dense,
    Formula,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputSection {
    /// Vertices probed in addition to the marks.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heatmap_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_path: Option<PathBuf>,
}

/// A scenario with every default applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub config: ScenarioConfig,
    /// Detunings of a sweep; empty for other kinds.
    pub lambdas: Vec<f64>,
    pub out_path: Option<PathBuf>,
}

/// Keys present in the document that no field consumed.
#[derive(Debug, Clone, Default)]
pub struct ParseReport {
    pub unknown_keys: Vec<String>,
}

/// Deserializes a scenario document. Unknown keys are collected; with
/// `strict` they are an error.
pub fn parse_scenario_file(text: &str, strict: bool) -> Result<(ScenarioFile, ParseReport)> {
    let mut unknown = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = {
        let mut record = |path: serde_ignored::Path<'_>| unknown.push(path.to_string());
        let tracked = serde_ignored::Deserializer::new(&mut de, &mut record);
        serde_path_to_error::deserialize(tracked).map_err(|e| {
            let field = e.path().to_string();
            schema_error(field, e.into_inner())
        })?
    };
    de.end().map_err(|e| schema_error(".".into(), e))?;
    if strict && !unknown.is_empty() {
        return Err(Error::UnknownKeys(unknown));
    }
    Ok((file, ParseReport { unknown_keys: unknown }))
}

fn schema_error(field: String, e: serde_json::Error) -> Error {
    let (line, column) = (e.line(), e.column());
    let full = e.to_string();
    let suffix = format!(" at line {line} column {column}");
    let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
    Error::Schema {
        field,
        message,
        line,
        column,
    }
}

/// Reads, validates and resolves a scenario file.
pub fn parse_scenario(path: &Path, strict: bool) -> Result<(Scenario, ParseReport)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (file, report) = parse_scenario_file(&text, strict)?;
    Ok((resolve(&file)?, report))
}

/// Parses and resolves a scenario held in memory.
pub fn parse_scenario_str(text: &str, strict: bool) -> Result<Scenario> {
    resolve(&parse_scenario_file(text, strict)?.0)
}

fn vertex(spec: &LatticeSpec, coords: &[i64], field: impl Into<String>) -> Result<VertexIndex> {
    spec.vertex_signed(coords).map_err(|e| Error::field(field, e))
}

/// Applies defaults: damping 0, initial state by kind (uniform for search,
/// the first mark's perturber state for transfer and sweep, vacuum for a
/// continuous run), and steps equal to the transfer time `T_s`.
pub fn resolve(file: &ScenarioFile) -> Result<Scenario> {
    let spec = build_lattice(file.lattice.d, file.lattice.n).map_err(|e| Error::field("lattice", e))?;
    let mut marks = MarkedSet::empty();
    for (i, m) in file.marks.iter().enumerate() {
        let v = vertex(&spec, &m.vertex, format!("marks[{i}].vertex"))?;
        marks.push(&spec, v, m.lambda).map_err(|e| Error::field(format!("marks[{i}]"), e))?;
    }
    let sc = &file.scenario;
    let mut config = ScenarioConfig::new(spec, marks);
    config.damping = sc.damping.unwrap_or(0.0);
    config.initial = match sc.initial {
        Some(InitialSpec::Uniform) => InitialState::Uniform,
        Some(InitialSpec::Vacuum) => InitialState::Vacuum,
        Some(InitialSpec::LocalizedAt(i)) => InitialState::LocalizedAt(i),
        None => match sc.kind {
            ScenarioKind::Search => InitialState::Uniform,
            ScenarioKind::Transfer | ScenarioKind::Sweep => InitialState::LocalizedAt(0),
            ScenarioKind::Continuous => InitialState::Vacuum,
        },
    };
    if let Some(src) = sc.source {
        config = config.with_source(src.mark, src.amplitude.value());
    }
    for (i, e) in sc.events.iter().enumerate() {
        let action = match &e.action {
            ActionSpec::Relocate { mark, to } => EventAction::Relocate {
                mark: *mark,
                to: vertex(&spec, to, format!("scenario.events[{i}].action.relocate.to"))?,
            },
            ActionSpec::SetLambda { mark, lambda } => EventAction::SetLambda {
                mark: *mark,
                lambda: *lambda,
            },
        };
        config = config.with_event(e.step, action);
    }
    config.perturber = match sc.perturber {
        Some(PerturberSpec::Formula) => PerturberMethod::Formula,
        Some(PerturberSpec::Dense) | None => PerturberMethod::DenseCrossing,
    };
    for (i, p) in file.output.probes.iter().enumerate() {
        config = config.with_probe(vertex(&spec, p, format!("output.probes[{i}]"))?);
    }
    config.probes.heatmap_every = file.output.heatmap_every;
    config.validate()?;

    config.steps = Some(match sc.steps {
        Some(steps) => steps,
        None => default_steps(&config)?,
    });
    config.validate()?;

    let lambdas = match sc.kind {
        ScenarioKind::Sweep => sc.lambdas.clone().unwrap_or_else(|| DEFAULT_SWEEP_LAMBDAS.to_vec()),
        _ => Vec::new(),
    };
    Ok(Scenario {
        kind: sc.kind,
        config,
        lambdas,
        out_path: file.output.out_path.clone(),
    })
}

fn default_steps(config: &ScenarioConfig) -> Result<usize> {
    let first = &config
        .marks
        .get(0)
        .ok_or_else(|| Error::field("scenario.steps", Error::InvalidConfig("no marks to derive a default from".into())))?
        .vertex;
    let perturber = perturber_state(&config.spec, first)?;
    Ok(crossing_model_from(&config.spec, &perturber, config.marks.len())?.t_s)
}

fn coords(v: &VertexIndex) -> Vec<i64> {
    v.coords().iter().map(|&c| c as i64).collect()
}

impl Scenario {
    /// The fully explicit document describing this scenario; parsing it
    /// gives back an equal `Scenario`.
    pub fn to_file(&self) -> Result<ScenarioFile> {
        let c = &self.config;
        let initial = match &c.initial {
            InitialState::Uniform => InitialSpec::Uniform,
            InitialState::Vacuum => InitialSpec::Vacuum,
            InitialState::LocalizedAt(i) => InitialSpec::LocalizedAt(*i),
            InitialState::Custom(_) => {
                return Err(Error::InvalidConfig("a custom initial state cannot be written to a scenario file".into()))
            }
        };
        Ok(ScenarioFile {
            lattice: LatticeSection {
                d: c.spec.dim(),
                n: c.spec.side(),
            },
            marks: c
                .marks
                .iter()
                .map(|m| MarkEntry {
                    vertex: coords(&m.vertex),
                    lambda: m.lambda,
                })
                .collect(),
            scenario: ScenarioSection {
                kind: self.kind,
                steps: c.steps,
                damping: Some(c.damping),
                initial: Some(initial),
                source: c.source.map(|s| SourceSpec {
                    mark: s.mark,
                    amplitude: AmplitudeSpec::Complex([s.amplitude.re, s.amplitude.im]),
                }),
                events: c
                    .events
                    .iter()
                    .map(|e| EventSpec {
                        step: e.step,
                        action: match &e.action {
                            EventAction::Relocate { mark, to } => ActionSpec::Relocate {
                                mark: *mark,
                                to: coords(to),
                            },
                            EventAction::SetLambda { mark, lambda } => ActionSpec::SetLambda {
                                mark: *mark,
                                lambda: *lambda,
                            },
                        },
                    })
                    .collect(),
                lambdas: (self.kind == ScenarioKind::Sweep).then(|| self.lambdas.clone()),
                perturber: Some(match c.perturber {
                    PerturberMethod::Formula => PerturberSpec::Formula,
                    PerturberMethod::DenseCrossing => PerturberSpec::Dense,
                }),
            },
            output: OutputSection {
                probes: c.probes.extra.iter().map(coords).collect(),
                heatmap_every: c.probes.heatmap_every,
                out_path: self.out_path.clone(),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "lattice": {"d": 2, "n": 31},
        "marks": [{"vertex": [15, 15]}],
        "scenario": {"kind": "search"}
    }"#;

    #[test]
    fn minimal_search_defaults_steps_to_transfer_time() {
        let s = parse_scenario_str(MINIMAL, true).unwrap();
        let spec = build_lattice(2, 31).unwrap();
        let v = spec.vertex(&[15, 15]).unwrap();
        let t_s = crossing_model_from(&spec, &perturber_state(&spec, &v).unwrap(), 1).unwrap().t_s;
        assert_eq!(s.config.steps, Some(t_s));
        assert_eq!(s.config.damping, 0.0);
        assert_eq!(s.config.initial, InitialState::Uniform);
    }

    #[test]
    fn coordinate_out_of_range() {
        let text = MINIMAL.replace("[15, 15]", "[31, 0]");
        let err = parse_scenario_str(&text, true).unwrap_err();
        assert!(err.to_string().contains("coordinate out of range [0, 31)"), "{err}");
    }

    #[test]
    fn duplicate_marks_rejected() {
        let text = MINIMAL.replace(r#"[{"vertex": [15, 15]}]"#, r#"[{"vertex": [1, 2]}, {"vertex": [1, 2]}]"#);
        assert!(parse_scenario_str(&text, true).is_err());
    }

    #[test]
    fn type_errors_carry_position_and_field() {
        let text = MINIMAL.replace(r#""n": 31"#, r#""n": "big""#);
        match parse_scenario_str(&text, false).unwrap_err() {
            Error::Schema { field, line, column, message } => {
                assert_eq!(field, "lattice.n");
                assert_eq!(line, 2);
                assert!(column > 0);
                assert!(message.contains("expected usize"), "{message}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_keys_are_reported_and_rejected_when_strict() {
        let text = MINIMAL.replace(r#""kind": "search""#, r#""kind": "search", "stpes": 4"#);
        let (_, report) = parse_scenario_file(&text, false).unwrap();
        assert_eq!(report.unknown_keys, vec!["scenario.stpes".to_string()]);
        match parse_scenario_file(&text, true).unwrap_err() {
            Error::UnknownKeys(keys) => assert_eq!(keys, vec!["scenario.stpes".to_string()]),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn resolved_config_round_trips() {
        let text = r#"{
            "lattice": {"d": 2, "n": 9},
            "marks": [{"vertex": [0, 0]}, {"vertex": [4, 4], "lambda": 1.0}],
            "scenario": {
                "kind": "continuous", "steps": 30, "damping": 0.01,
                "source": {"mark": 0, "amplitude": 0.1},
                "events": [{"step": 10, "action": {"relocate": {"mark": 1, "to": [4, 0]}}}]
            },
            "output": {"probes": [[2, 2]], "heatmap_every": 5}
        }"#;
        let s = parse_scenario_str(text, true).unwrap();
        let written = serde_json::to_string_pretty(&s.to_file().unwrap()).unwrap();
        assert_eq!(parse_scenario_str(&written, true).unwrap(), s);
    }
}
