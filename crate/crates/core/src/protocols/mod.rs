//! Time-domain protocols: search from `|Φ0⟩`, pulsed transfer from a
//! perturber state, continuous driving with loss, and detuning probes.

mod config;
mod record;

pub use config::{Event, EventAction, InitialState, Probes, ScenarioConfig, Source};
pub use record::{Heatmap, RunRecord, SearchSummary, SeriesRow, Summary, TransferSummary};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, VertexIndex};
use crate::marks::MarkedSet;
use crate::spectral::{
    crossing_model_from, perturber_state, perturber_state_dense, CrossingModel, PerturberMethod, PerturberState,
};
use crate::state::{vertex_probabilities, WaveState};
use crate::walk::Walker;

/// Perturber state of `target` by the requested method. The dense method
/// falls back to the formula when the operator would exceed `cap`.
pub fn reference_perturber(
    spec: &LatticeSpec,
    target: &VertexIndex,
    method: PerturberMethod,
    cap: usize,
) -> Result<PerturberState> {
    match method {
        PerturberMethod::DenseCrossing if spec.state_dim() <= cap => perturber_state_dense(spec, target, cap),
        _ => perturber_state(spec, target),
    }
}

fn probe_list(config: &ScenarioConfig) -> Vec<VertexIndex> {
    let mut out: Vec<VertexIndex> = Vec::new();
    let relocations = config.events.iter().filter_map(|e| match &e.action {
        EventAction::Relocate { to, .. } => Some(to),
        _ => None,
    });
    for v in config.marks.vertices().chain(relocations).chain(&config.probes.extra) {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    out
}

struct Simulation<'a> {
    config: &'a ScenarioConfig,
    steps: usize,
    /// Perturber states tracked per mark, for fidelity rows.
    references: Option<Vec<WaveState>>,
}

impl Simulation<'_> {
    fn run(&self, mut state: WaveState) -> Result<RunRecord> {
        let config = self.config;
        let spec = &config.spec;
        let mut marks = config.marks.clone();
        let mut walker = Walker::with_threads(spec.clone(), config.threads)?;
        let probes = probe_list(config);
        let keep = 1.0 - config.damping;
        let mut events: Vec<&Event> = config.events.iter().collect();
        events.sort_by_key(|e| e.step);

        let mut series = Vec::with_capacity(self.steps + 1);
        let mut heatmaps = Vec::new();
        let mut log = Vec::new();
        let mut next_event = 0;
        for t in 0..=self.steps {
            series.push(SeriesRow {
                step: t,
                probes: probes.iter().map(|v| state.vertex_probability(spec, v)).collect(),
                norm: state.norm(),
                fidelity: match &self.references {
                    Some(refs) => refs.iter().map(|r| r.overlap_sqr(&state)).collect(),
                    None => Vec::new(),
                },
            });
            if let Some(every) = config.probes.heatmap_every {
                if t % every == 0 {
                    heatmaps.push(Heatmap {
                        step: t,
                        probabilities: vertex_probabilities(&state, spec)?,
                    });
                }
            }
            if t == self.steps {
                break;
            }
            while next_event < events.len() && events[next_event].step == t {
                log.push((t, apply_event(spec, &mut marks, &events[next_event].action)?));
                next_event += 1;
            }
            if let Some(src) = &config.source {
                // the drive follows its mark through relocations
                let v = &marks.get(src.mark).ok_or(Error::MarkIndex { index: src.mark, len: marks.len() })?.vertex;
                let share = src.amplitude / (spec.channel_count() as f64).sqrt();
                for a in state.vertex_block_mut(spec, v) {
                    *a += share;
                }
            }
            walker.step(&mut state, &marks)?;
            if config.damping > 0.0 {
                state.scale(keep);
            }
        }

        let mut summary = Summary::default();
        for i in 0..probes.len() {
            let (step, value) = series
                .iter()
                .map(|row| (row.step, row.probes[i]))
                .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
            summary.peak_steps.push(step);
            summary.peak_values.push(value);
        }
        Ok(RunRecord {
            probe_labels: probes.iter().map(|v| format!("p{v}")).collect(),
            probe_vertices: probes,
            series,
            events: log,
            heatmaps,
            summary,
            crossing: None,
        })
    }
}

fn apply_event(spec: &LatticeSpec, marks: &mut MarkedSet, action: &EventAction) -> Result<String> {
    match action {
        EventAction::Relocate { mark, to } => {
            let from = marks.get(*mark).ok_or(Error::MarkIndex { index: *mark, len: marks.len() })?.vertex.clone();
            marks.relocate(spec, *mark, to.clone())?;
            Ok(format!("relocate mark {mark} from {from} to {to}"))
        }
        EventAction::SetLambda { mark, lambda } => {
            marks.set_lambda(*mark, *lambda)?;
            Ok(format!("set lambda of mark {mark} to {lambda}"))
        }
    }
}

fn initial_state(config: &ScenarioConfig, reference: Option<&PerturberState>) -> Result<WaveState> {
    let spec = &config.spec;
    let state = match &config.initial {
        InitialState::Uniform => WaveState::uniform(spec),
        InitialState::Vacuum => WaveState::zeros(spec, config.norm_policy()),
        InitialState::Custom(s) => s.clone(),
        InitialState::LocalizedAt(i) => {
            let target = &config.marks.get(*i).ok_or(Error::MarkIndex { index: *i, len: config.marks.len() })?.vertex;
            match reference {
                Some(r) => r.translated(spec, target).vector,
                None => reference_perturber(spec, target, config.perturber, config.dense_cap)?.vector,
            }
        }
    };
    Ok(state.with_policy(config.norm_policy()))
}

fn require_marks_at_one(config: &ScenarioConfig) -> Result<()> {
    if config.marks.is_empty() {
        return Err(Error::InvalidConfig("at least one mark is required".into()));
    }
    if !config.marks.all_lambdas_equal(1.0) {
        return Err(Error::InvalidConfig("every mark must start at lambda = 1".into()));
    }
    Ok(())
}

fn model_for(config: &ScenarioConfig) -> Result<CrossingModel> {
    let first = &config.marks.get(0).ok_or(Error::InvalidConfig("no marks".into()))?.vertex;
    let formula = perturber_state(&config.spec, first)?;
    crossing_model_from(&config.spec, &formula, config.marks.len())
}

/// Quantum search: start in `|Φ0⟩` with every mark at `λ = 1`. Runs for
/// `steps`, or `2 T0` if unset, and reports the first maximum of the summed
/// probability on the marks.
pub fn run_search(config: &ScenarioConfig) -> Result<RunRecord> {
    config.validate()?;
    require_marks_at_one(config)?;
    if config.initial != InitialState::Uniform {
        return Err(Error::InvalidConfig("search starts from the uniform state".into()));
    }
    if config.damping != 0.0 || config.source.is_some() {
        return Err(Error::InvalidConfig("search is lossless and undriven".into()));
    }
    let model = model_for(config)?;
    let steps = config.steps.unwrap_or(model.t_s);
    let mut record = Simulation { config, steps, references: None }.run(WaveState::uniform(&config.spec))?;

    let m = config.marks.len();
    let totals: Vec<f64> = record.series.iter().map(|row| row.probes[..m].iter().sum()).collect();
    let (peak_step, peak_probability) = totals
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    record.summary.search = Some(SearchSummary {
        peak_step,
        peak_probability,
        predicted_t0: model.t0,
        relative_timing_error: (peak_step as f64 - model.t0 as f64).abs() / model.t0 as f64,
    });
    record.crossing = Some(model);
    Ok(record)
}

fn sender_of(config: &ScenarioConfig) -> Result<usize> {
    match config.initial {
        InitialState::LocalizedAt(i) => Ok(i),
        _ => Err(Error::InvalidConfig("transfer starts localized at a mark".into())),
    }
}

/// Pulsed transfer: start in the perturber state of the sender mark and run
/// for `steps`, or `T_s` if unset.
pub fn run_transfer(config: &ScenarioConfig) -> Result<RunRecord> {
    config.validate()?;
    let sender = sender_of(config)?;
    let target = &config.marks.get(sender).ok_or(Error::MarkIndex { index: sender, len: config.marks.len() })?.vertex;
    let reference = reference_perturber(&config.spec, target, config.perturber, config.dense_cap)?;
    let model = model_for(config)?;
    run_transfer_with(config, &reference, &model)
}

/// As [`run_transfer`] with a precomputed perturber state (translated onto
/// each mark) and crossing model.
pub fn run_transfer_with(config: &ScenarioConfig, reference: &PerturberState, model: &CrossingModel) -> Result<RunRecord> {
    config.validate()?;
    let sender = sender_of(config)?;
    if config.marks.len() < 2 {
        return Err(Error::InvalidConfig("transfer needs a sender and at least one receiver".into()));
    }
    if config.damping != 0.0 || config.source.is_some() {
        return Err(Error::InvalidConfig("pulsed transfer is lossless and undriven".into()));
    }
    let spec = &config.spec;
    let references: Vec<WaveState> = config
        .marks
        .iter()
        .map(|m| reference.translated(spec, &m.vertex).vector)
        .collect();
    let start = initial_state(config, Some(reference))?;
    let steps = config.steps.unwrap_or(model.t_s);
    let mut record = Simulation {
        config,
        steps,
        references: Some(references),
    }
    .run(start)?;

    let m = config.marks.len();
    let first = &record.series[0];
    let last = record.series.last().expect("series has t = 0");
    let sender_initial_intensity = first.probes[sender];
    record.summary.transfer = Some(TransferSummary {
        sender,
        steps,
        fidelity: last.fidelity.clone(),
        intensity: last.probes[..m].to_vec(),
        relative_intensity: last.probes[..m].iter().map(|p| p / sender_initial_intensity).collect(),
        sender_initial_intensity,
    });
    record.crossing = Some(model.clone());
    Ok(record)
}

/// Continuous driving with loss. The source mark receives
/// `amplitude · |s⟩|v⟩` every step, then the walk step, then the damping
/// `1 − γ`. Without a source the state simply decays.
pub fn run_continuous(config: &ScenarioConfig) -> Result<RunRecord> {
    config.validate()?;
    if config.source.is_some() && config.damping == 0.0 {
        return Err(Error::InvalidConfig(
            "a driven run needs damping > 0, otherwise the norm grows without bound".into(),
        ));
    }
    require_marks_at_one(config)?;
    let model = model_for(config)?;
    let steps = config.steps.unwrap_or(model.t_s);
    let start = initial_state(config, None)?;
    let mut record = Simulation { config, steps, references: None }.run(start)?;
    record.crossing = Some(model);
    Ok(record)
}

/// One detuning of a switching probe.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchRow {
    pub lambda: f64,
    pub fidelity: f64,
    pub relative_intensity: f64,
    pub sender_fidelity: f64,
}

/// Pulsed transfer between two marks with both detuned to each `λ`. Timing
/// and perturber state are those of `λ = 1`.
pub fn run_switch_probe(config: &ScenarioConfig, lambdas: &[f64]) -> Result<Vec<SwitchRow>> {
    config.validate()?;
    if config.marks.len() != 2 {
        return Err(Error::InvalidConfig("switching probe needs exactly two marks".into()));
    }
    let sender = sender_of(config)?;
    let receiver = 1 - sender;
    let target = &config.marks.get(sender).expect("checked").vertex;
    let reference = reference_perturber(&config.spec, target, config.perturber, config.dense_cap)?;
    let model = model_for(&ScenarioConfig {
        marks: {
            let mut tuned = config.marks.clone();
            tuned.set_all_lambdas(1.0)?;
            tuned
        },
        ..config.clone()
    })?;
    lambdas
        .par_iter()
        .map(|&lambda| {
            let mut detuned = config.clone();
            detuned.marks.set_all_lambdas(lambda)?;
            let record = run_transfer_with(&detuned, &reference, &model)?;
            let t = record.summary.transfer.expect("transfer summary");
            Ok(SwitchRow {
                lambda,
                fidelity: t.fidelity[receiver],
                relative_intensity: t.relative_intensity[receiver],
                sender_fidelity: t.fidelity[sender],
            })
        })
        .collect()
}
