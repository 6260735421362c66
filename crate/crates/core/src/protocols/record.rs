use crate::lattice::VertexIndex;
use crate::spectral::CrossingModel;

/// Probe values at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub step: usize,
    /// Vertex probabilities, in the order of [`RunRecord::probe_vertices`].
    pub probes: Vec<f64>,
    pub norm: f64,
    /// `|⟨ν^i|ψ(t)⟩|²` per mark; empty unless the run is a transfer.
    pub fidelity: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub step: usize,
    /// Flat vertex order (row-major, axis 0 slowest).
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSummary {
    /// Step maximizing the summed probability on the marks.
    pub peak_step: usize,
    pub peak_probability: f64,
    pub predicted_t0: usize,
    pub relative_timing_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferSummary {
    pub sender: usize,
    pub steps: usize,
    /// `|⟨ν^i|ψ(T)⟩|²` per mark.
    pub fidelity: Vec<f64>,
    /// `p(v_i, T)` per mark.
    pub intensity: Vec<f64>,
    /// `p(v_i, T) / p(v_sender, 0)` per mark.
    pub relative_intensity: Vec<f64>,
    pub sender_initial_intensity: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    /// Per probe.
    pub peak_values: Vec<f64>,
    pub peak_steps: Vec<usize>,
    pub search: Option<SearchSummary>,
    pub transfer: Option<TransferSummary>,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub probe_vertices: Vec<VertexIndex>,
    pub probe_labels: Vec<String>,
    /// One row per step including `t = 0`.
    pub series: Vec<SeriesRow>,
    pub events: Vec<(usize, String)>,
    pub heatmaps: Vec<Heatmap>,
    pub summary: Summary,
    pub crossing: Option<CrossingModel>,
}

impl RunRecord {
    pub fn steps(&self) -> usize {
        self.series.len().saturating_sub(1)
    }

    pub fn probe_index(&self, vertex: &VertexIndex) -> Option<usize> {
        self.probe_vertices.iter().position(|v| v == vertex)
    }

    /// Time series of one probe.
    pub fn probe_series(&self, index: usize) -> Vec<f64> {
        self.series.iter().map(|row| row.probes[index]).collect()
    }

    pub fn norm_series(&self) -> Vec<f64> {
        self.series.iter().map(|row| row.norm).collect()
    }

    pub fn fidelity_series(&self, mark: usize) -> Vec<f64> {
        self.series.iter().map(|row| row.fidelity[mark]).collect()
    }
}
