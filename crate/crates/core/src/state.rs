use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{ChannelIndex, LatticeSpec, VertexIndex};

/// Whether a state is expected to stay normalized.
///
/// `Free` is required for damped or driven runs, where the norm changes
/// from step to step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormPolicy {
    #[default]
    Unit,
    Free,
}

/// Complex amplitudes indexed by `(channel, vertex)` in the layout described
/// in [`crate::lattice`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    amplitudes: Vec<Complex64>,
    policy: NormPolicy,
}

impl WaveState {
    pub fn zeros(spec: &LatticeSpec, policy: NormPolicy) -> Self {
        WaveState {
            amplitudes: vec![Complex64::new(0.0, 0.0); spec.state_dim()],
            policy,
        }
    }

    pub fn from_amplitudes(
        spec: &LatticeSpec,
        amplitudes: Vec<Complex64>,
        policy: NormPolicy,
    ) -> Result<Self> {
        if amplitudes.len() != spec.state_dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.state_dim(),
                got: amplitudes.len(),
            });
        }
        Ok(WaveState { amplitudes, policy })
    }

    /// The fully symmetric state `|Φ0⟩`, equal weight on every channel of
    /// every vertex.
    pub fn uniform(spec: &LatticeSpec) -> Self {
        let a = 1.0 / (spec.state_dim() as f64).sqrt();
        WaveState {
            amplitudes: vec![Complex64::new(a, 0.0); spec.state_dim()],
            policy: NormPolicy::Unit,
        }
    }

    /// `|s⟩ ⊗ |v⟩`: the channel-symmetric state localized on one vertex.
    pub fn symmetric_at(spec: &LatticeSpec, vertex: &VertexIndex) -> Self {
        let mut state = WaveState::zeros(spec, NormPolicy::Unit);
        let a = Complex64::new(1.0 / (spec.channel_count() as f64).sqrt(), 0.0);
        state.vertex_block_mut(spec, vertex).fill(a);
        state
    }

    pub fn basis(spec: &LatticeSpec, channel: ChannelIndex, vertex: &VertexIndex) -> Self {
        let mut state = WaveState::zeros(spec, NormPolicy::Unit);
        state.amplitudes[spec.flat_index(channel, vertex)] = Complex64::new(1.0, 0.0);
        state
    }

    pub fn policy(&self) -> NormPolicy {
        self.policy
    }

    pub fn with_policy(mut self, policy: NormPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, spec: &LatticeSpec, channel: ChannelIndex, vertex: &VertexIndex) -> Complex64 {
        self.amplitudes[spec.flat_index(channel, vertex)]
    }

    pub fn vertex_block(&self, spec: &LatticeSpec, vertex: &VertexIndex) -> &[Complex64] {
        let d2 = spec.channel_count();
        &self.amplitudes[vertex.flat() * d2..(vertex.flat() + 1) * d2]
    }

    pub fn vertex_block_mut(&mut self, spec: &LatticeSpec, vertex: &VertexIndex) -> &mut [Complex64] {
        let d2 = spec.channel_count();
        &mut self.amplitudes[vertex.flat() * d2..(vertex.flat() + 1) * d2]
    }

    pub fn check_dim(&self, spec: &LatticeSpec) -> Result<()> {
        if self.amplitudes.len() != spec.state_dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.state_dim(),
                got: self.amplitudes.len(),
            });
        }
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            self.scale(1.0 / norm);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    pub fn scale_complex(&mut self, factor: Complex64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &WaveState) -> Complex64 {
        assert_eq!(self.len(), other.len(), "inner product of mismatched states");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap_sqr(&self, other: &WaveState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn max_abs_diff(&self, other: &WaveState) -> f64 {
        assert_eq!(self.len(), other.len());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn conj(&self) -> WaveState {
        WaveState {
            amplitudes: self.amplitudes.iter().map(|a| a.conj()).collect(),
            policy: self.policy,
        }
    }

    /// Probability (squared amplitude summed over channels) on one vertex.
    pub fn vertex_probability(&self, spec: &LatticeSpec, vertex: &VertexIndex) -> f64 {
        self.vertex_block(spec, vertex).iter().map(|a| a.norm_sqr()).sum()
    }

    /// The state moved rigidly by the lattice vector `shift`.
    pub fn translated(&self, spec: &LatticeSpec, shift: &[i64]) -> WaveState {
        let d2 = spec.channel_count();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for v in spec.vertices() {
            let w = spec.translate(&v, shift);
            out[w.flat() * d2..(w.flat() + 1) * d2]
                .copy_from_slice(&self.amplitudes[v.flat() * d2..(v.flat() + 1) * d2]);
        }
        WaveState {
            amplitudes: out,
            policy: self.policy,
        }
    }
}

/// Per-vertex probabilities `p(x) = Σ_c |ψ(c, x)|²`, in flat vertex order.
pub fn vertex_probabilities(state: &WaveState, spec: &LatticeSpec) -> Result<Vec<f64>> {
    state.check_dim(spec)?;
    Ok(state
        .amplitudes
        .chunks_exact(spec.channel_count())
        .map(|block| block.iter().map(|a| a.norm_sqr()).sum())
        .collect())
}
