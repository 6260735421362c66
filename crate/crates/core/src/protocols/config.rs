use num_complex::Complex64;

use crate::dense::DEFAULT_DENSE_CAP;
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, VertexIndex};
use crate::marks::MarkedSet;
use crate::spectral::PerturberMethod;
use crate::state::{NormPolicy, WaveState};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// `|Φ0⟩`.
    Uniform,
    /// The perturber state of the mark with this index.
    LocalizedAt(usize),
    /// All amplitudes zero; used with a driving source.
    Vacuum,
    Custom(WaveState),
}

/// Drive added once per step, before the walk step, as
/// `amplitude · |s⟩ ⊗ |v⟩` on the vertex of mark `mark`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub mark: usize,
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventAction {
    /// The mark's vertex drops to `λ = 0` and `to` is marked with its old `λ`.
    Relocate { mark: usize, to: VertexIndex },
    SetLambda { mark: usize, lambda: f64 },
}

/// An action applied at `step`, before the state advances to `step + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub step: usize,
    pub action: EventAction,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Probes {
    /// Probed in addition to every marked vertex.
    pub extra: Vec<VertexIndex>,
    pub heatmap_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub spec: LatticeSpec,
    pub marks: MarkedSet,
    pub initial: InitialState,
    /// `None` runs for the transfer time `T_s` of the crossing model.
    pub steps: Option<usize>,
    /// Per-step amplitude loss `γ`; every amplitude is multiplied by `1 − γ`.
    pub damping: f64,
    pub source: Option<Source>,
    pub events: Vec<Event>,
    pub probes: Probes,
    pub perturber: PerturberMethod,
    pub dense_cap: usize,
    pub threads: usize,
}

impl ScenarioConfig {
    pub fn new(spec: LatticeSpec, marks: MarkedSet) -> Self {
        ScenarioConfig {
            spec,
            marks,
            initial: InitialState::Uniform,
            steps: None,
            damping: 0.0,
            source: None,
            events: Vec::new(),
            probes: Probes::default(),
            perturber: PerturberMethod::default(),
            dense_cap: DEFAULT_DENSE_CAP,
            threads: 1,
        }
    }

    pub fn with_initial(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn with_damping(mut self, damping: f64) -> Self {
        self.damping = damping;
        self
    }

    pub fn with_source(mut self, mark: usize, amplitude: Complex64) -> Self {
        self.source = Some(Source { mark, amplitude });
        self
    }

    pub fn with_event(mut self, step: usize, action: EventAction) -> Self {
        self.events.push(Event { step, action });
        self
    }

    pub fn with_probe(mut self, vertex: VertexIndex) -> Self {
        self.probes.extra.push(vertex);
        self
    }

    pub fn with_heatmap_every(mut self, every: usize) -> Self {
        self.probes.heatmap_every = Some(every);
        self
    }

    pub fn with_perturber(mut self, method: PerturberMethod) -> Self {
        self.perturber = method;
        self
    }

    pub fn with_dense_cap(mut self, cap: usize) -> Self {
        self.dense_cap = cap;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn norm_policy(&self) -> NormPolicy {
        if self.damping > 0.0 || self.source.is_some() {
            NormPolicy::Free
        } else {
            NormPolicy::Unit
        }
    }

    fn check_mark(&self, index: usize) -> Result<()> {
        if index >= self.marks.len() {
            return Err(Error::MarkIndex {
                index,
                len: self.marks.len(),
            });
        }
        Ok(())
    }

    /// Checks the cross-field invariants shared by every protocol.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::InvalidConfig(format!("damping {} outside [0, 1)", self.damping)));
        }
        if self.steps == Some(0) {
            return Err(Error::InvalidConfig("steps must be positive".into()));
        }
        if let InitialState::LocalizedAt(i) = self.initial {
            self.check_mark(i)?;
        }
        if let InitialState::Custom(state) = &self.initial {
            state.check_dim(&self.spec)?;
        }
        if let Some(src) = &self.source {
            self.check_mark(src.mark)?;
        }
        if self.probes.heatmap_every == Some(0) {
            return Err(Error::InvalidConfig("heatmap_every must be positive".into()));
        }
        for e in &self.events {
            match &e.action {
                EventAction::Relocate { mark, .. } => self.check_mark(*mark)?,
                EventAction::SetLambda { mark, lambda } => {
                    self.check_mark(*mark)?;
                    if !(0.0..=2.0).contains(lambda) {
                        return Err(Error::LambdaOutOfRange(*lambda));
                    }
                }
            }
        }
        Ok(())
    }
}
