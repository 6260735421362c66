//! Eigenphases of `U_λ` near phase 0 as the mark strength is swept.

use crate::dense::{dense_operator, eigen_decomposition};
use crate::error::Result;
use crate::lattice::{LatticeSpec, VertexIndex};
use crate::marks::MarkedSet;
use crate::spectral::crossing::{coupling_epsilon, phase_distance};
use crate::spectral::perturber::perturber_state;
use crate::state::WaveState;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    /// Eigenphases inside the window, ascending.
    pub phases: Vec<f64>,
    /// Phases of the two eigenvectors with the largest `|Φ0⟩` weight.
    pub crossing: [f64; 2],
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSweep {
    pub epsilon: f64,
    pub window: f64,
    pub rows: Vec<SweepRow>,
}

impl LambdaSweep {
    /// `λ` of the smallest crossing gap, refined by a parabola through the
    /// minimum row and its neighbours.
    pub fn min_gap_lambda(&self) -> Option<f64> {
        let (k, _) = self
            .rows
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.gap.total_cmp(&b.1.gap))?;
        if k == 0 || k + 1 == self.rows.len() {
            return Some(self.rows[k].lambda);
        }
        let (x0, x1, x2) = (self.rows[k - 1].lambda, self.rows[k].lambda, self.rows[k + 1].lambda);
        let (y0, y1, y2) = (self.rows[k - 1].gap, self.rows[k].gap, self.rows[k + 1].gap);
        let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
        let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
        let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
        if a <= 0.0 {
            return Some(x1);
        }
        Some(-b / (2.0 * a))
    }
}

/// Dense eigenphases of the single-mark walk for each `λ`. The default
/// window is `±4ε` with `ε` the coupling at `λ = 1`.
pub fn lambda_sweep(
    spec: &LatticeSpec,
    target: &VertexIndex,
    lambdas: &[f64],
    window: Option<f64>,
    cap: usize,
) -> Result<LambdaSweep> {
    let epsilon = coupling_epsilon(spec, &perturber_state(spec, target)?)?.matrix_element;
    let window = window.unwrap_or(4.0 * epsilon);
    let phi0 = WaveState::uniform(spec);
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let marks = MarkedSet::single(spec, target.clone(), lambda)?;
        let evd = eigen_decomposition(&dense_operator(spec, &marks, cap)?)?;
        let mut phases: Vec<f64> = (0..evd.values.len())
            .map(|k| evd.phase(k))
            .filter(|p| p.abs() <= window)
            .collect();
        phases.sort_by(f64::total_cmp);
        let weights = evd.weights(&phi0);
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
        let (pa, pb) = (evd.phase(order[0]), evd.phase(order[1]));
        rows.push(SweepRow {
            lambda,
            phases,
            crossing: [pa.max(pb), pa.min(pb)],
            gap: phase_distance(pa, pb),
        });
    }
    Ok(LambdaSweep { epsilon, window, rows })
}
