//! The localized perturber state of a single marked vertex.
//!
//! Near `λ = 1` the marked walk has an approximate eigenstate with phase 0
//! that is orthogonal to `|Φ0⟩` and concentrated on the marked vertex `v`.
//! Expanded in the band modes of `U0`,
//!
//! ```text
//! |ν⟩ = −⟨sv|ν⟩ √(2/n^d) Σ_{κ≠0} e^{−2πi κ·v/n}
//!         ( e^{iθ}/(1 − e^{iθ}) |Φ+_κ⟩ + e^{−iθ}/(1 − e^{−iθ}) |Φ−_κ⟩ )
//! ```
//!
//! with the polarizations gauge-fixed so `⟨s|p±_κ⟩ = 1/√2`. The prefactor is
//! fixed by normalization. Flat-band modes never enter: they are orthogonal
//! to `|s⟩`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::dense::{dense_operator, eigen_decomposition};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, VertexIndex};
use crate::marks::MarkedSet;
use crate::spectral::bloch::{bloch_polarization, kappa_labels, Branch, BlochMode};
use crate::state::{NormPolicy, WaveState};

const POLE_TOL: f64 = 1e-12;

/// How the perturber state was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerturberMethod {
    /// Band-mode expansion above.
    Formula,
    /// Component orthogonal to `|Φ0⟩` of the two exact eigenvectors of the
    /// single-mark operator that carry most of `|Φ0⟩`.
    #[default]
    DenseCrossing,
}

#[derive(Debug, Clone)]
pub struct PerturberState {
    pub vector: WaveState,
    pub target: VertexIndex,
    /// `⟨sv|ν⟩`, real and positive in the chosen gauge.
    pub overlap_sv: Complex64,
    /// `|⟨sv|ν⟩|` implied by the normalization of the expansion; equals
    /// `overlap_sv` up to `O(1/n^d)`. Zero for the dense method.
    pub normalization_overlap: f64,
    /// Nonzero momenta dropped because `1 − e^{iθ_κ}` vanishes.
    pub excluded_modes: Vec<Vec<usize>>,
    pub method: PerturberMethod,
}

impl PerturberState {
    /// The same state centred on another vertex (exact by translation
    /// symmetry of the unmarked lattice).
    pub fn translated(&self, spec: &LatticeSpec, to: &VertexIndex) -> PerturberState {
        let shift = spec.displacement(&self.target, to);
        PerturberState {
            vector: self.vector.translated(spec, &shift),
            target: to.clone(),
            ..self.clone()
        }
    }

    pub fn overlap_magnitude(&self) -> f64 {
        self.overlap_sv.norm()
    }
}

/// Builds `|ν⟩` for a mark at `target` from the band-mode expansion.
pub fn perturber_state(spec: &LatticeSpec, target: &VertexIndex) -> Result<PerturberState> {
    let d2 = spec.channel_count();
    let n = spec.side();
    let s = Complex64::new(1.0 / (d2 as f64).sqrt(), 0.0);

    let mut excluded = Vec::new();
    let mut labels = Vec::new();
    let mut weights: Vec<Vec<Complex64>> = Vec::new();
    for kappa in kappa_labels(spec) {
        if kappa.iter().all(|&k| k == 0) {
            continue;
        }
        let plus = BlochMode::new(spec, &kappa, Branch::Plus);
        let theta = plus.theta;
        if (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, theta)).norm() < POLE_TOL {
            excluded.push(kappa);
            continue;
        }
        let w = if theta.sin().abs() < POLE_TOL {
            // θ = π: the two branches collapse onto the single mode |κ⟩|s⟩,
            // whose coefficient is e^{iπ}/(1 − e^{iπ}) · √2 ⟨s|s⟩.
            vec![s * (-0.5 * 2f64.sqrt()); d2]
        } else {
            let mut w = vec![Complex64::new(0.0, 0.0); d2];
            for branch in [Branch::Plus, Branch::Minus] {
                let mode = BlochMode { branch, ..plus.clone() };
                let z = Complex64::from_polar(1.0, mode.phase());
                let coef = z / (1.0 - z);
                for (acc, p) in w.iter_mut().zip(bloch_polarization(spec, &mode)?) {
                    *acc += coef * p;
                }
            }
            w
        };
        labels.push(kappa);
        weights.push(w);
    }

    // ν_raw(x) = Σ_κ e^{2πi κ·(x − v)/n} w(κ): one inverse DFT per channel
    let mut grid = vec![vec![Complex64::new(0.0, 0.0); spec.vertex_count()]; d2];
    for (kappa, w) in labels.iter().zip(&weights) {
        let k = spec.vertex(kappa)?.flat();
        for (c, wc) in w.iter().enumerate() {
            grid[c][k] = *wc;
        }
    }
    for channel in &mut grid {
        inverse_dft(channel, n, spec.dim());
    }
    let v = target.coords();
    let mut raw = vec![Complex64::new(0.0, 0.0); spec.state_dim()];
    for x in spec.vertices() {
        let rel: Vec<usize> = x.coords().iter().zip(v).map(|(&a, &b)| (a + n - b) % n).collect();
        let r = spec.vertex(&rel)?.flat();
        for (c, channel) in grid.iter().enumerate() {
            raw[x.flat() * d2 + c] = channel[r];
        }
    }
    let raw_norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt() / (spec.vertex_count() as f64).sqrt();
    if raw_norm == 0.0 {
        return Err(Error::InvalidConfig("perturber expansion is empty".into()));
    }

    let mut vector = WaveState::from_amplitudes(spec, raw, NormPolicy::Unit)?;
    vector.normalize();
    vector.scale(-1.0);
    let sv = WaveState::symmetric_at(spec, target);
    let overlap_sv = sv.inner(&vector);
    let normalization_overlap = 1.0 / ((2.0 / spec.vertex_count() as f64).sqrt() * raw_norm);
    Ok(PerturberState {
        vector,
        target: target.clone(),
        overlap_sv,
        normalization_overlap,
        excluded_modes: excluded,
        method: PerturberMethod::Formula,
    })
}

/// Unnormalized `a[r] ← Σ_κ e^{2πi κ·r/n} a[κ]` on a row-major `n^d` grid.
fn inverse_dft(data: &mut [Complex64], n: usize, dim: usize) {
    let fft = FftPlanner::new().plan_fft_inverse(n);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        for start in 0..data.len() {
            // visit each line once, from its first element
            if (start / stride) % n != 0 {
                continue;
            }
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = data[start + j * stride];
            }
            fft.process(&mut line);
            for (j, value) in line.iter().enumerate() {
                data[start + j * stride] = *value;
            }
        }
    }
}

/// Builds `|ν⟩` from the exact eigenvectors of the single-mark operator at
/// `λ = 1`. Needs a dense eigendecomposition, so `N` must not exceed `cap`.
pub fn perturber_state_dense(spec: &LatticeSpec, target: &VertexIndex, cap: usize) -> Result<PerturberState> {
    let marks = MarkedSet::single(spec, target.clone(), 1.0)?;
    let op = dense_operator(spec, &marks, cap)?;
    let evd = eigen_decomposition(&op)?;
    let phi0 = WaveState::uniform(spec);
    let weights = evd.weights(&phi0);
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));

    let q1 = WaveState::from_amplitudes(spec, evd.vector(order[0]), NormPolicy::Unit)?;
    let mut q2 = WaveState::from_amplitudes(spec, evd.vector(order[1]), NormPolicy::Unit)?;
    let c = q1.inner(&q2);
    for (b, a) in q2.amplitudes_mut().iter_mut().zip(q1.amplitudes()) {
        *b -= c * a;
    }
    q2.normalize();

    let a = q1.inner(&phi0);
    let b = q2.inner(&phi0);
    let amps: Vec<Complex64> = q1
        .amplitudes()
        .iter()
        .zip(q2.amplitudes())
        .map(|(x, y)| b.conj() * x - a.conj() * y)
        .collect();
    let mut vector = WaveState::from_amplitudes(spec, amps, NormPolicy::Unit)?;
    vector.normalize();
    let sv = WaveState::symmetric_at(spec, target);
    let raw = sv.inner(&vector);
    vector.scale_complex(raw.conj() / raw.norm());
    let overlap_sv = sv.inner(&vector);
    Ok(PerturberState {
        vector,
        target: target.clone(),
        overlap_sv,
        normalization_overlap: 0.0,
        excluded_modes: Vec::new(),
        method: PerturberMethod::DenseCrossing,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::lattice::build_lattice;
    use crate::state::vertex_probabilities;
    use crate::walk::step_perturbed;

    #[test]
    fn normalized_orthogonal_to_carrier_and_gauge_fixed() {
        let spec = build_lattice(2, 11).unwrap();
        let v = spec.vertex(&[5, 5]).unwrap();
        let nu = perturber_state(&spec, &v).unwrap();
        assert!((nu.vector.norm() - 1.0).abs() < 1e-12);
        assert!(WaveState::uniform(&spec).inner(&nu.vector).norm() < 1e-10);
        assert!(nu.overlap_sv.re > 0.0 && nu.overlap_sv.re <= 1.0);
        assert!(nu.overlap_sv.im.abs() < 1e-12);
        assert!(nu.excluded_modes.is_empty());
        // prefactor and direct overlap differ by (n^d - 1)/n^d
        let ratio = nu.overlap_sv.re / nu.normalization_overlap;
        assert!((ratio - 120.0 / 121.0).abs() < 1e-10, "{ratio}");
    }

    #[test]
    fn localized_on_target() {
        for (d, n) in [(2, 8), (2, 13), (3, 8)] {
            let spec = build_lattice(d, n).unwrap();
            let v = spec.vertex_from_flat(spec.vertex_count() / 3);
            let nu = perturber_state(&spec, &v).unwrap();
            let mut p = vertex_probabilities(&nu.vector, &spec).unwrap();
            let at_target = p[v.flat()];
            p.sort_by(f64::total_cmp);
            let median = p[p.len() / 2];
            assert!(at_target >= 10.0 * median, "d={d} n={n}: {at_target} vs {median}");
            assert_eq!(p.last().copied(), Some(at_target));
        }
    }

    #[test]
    fn transform_matches_direct_sum() {
        for (dim, n) in [(1, 7), (2, 6), (3, 4)] {
            let spec = build_lattice(dim, n).unwrap();
            let input: Vec<Complex64> = (0..spec.vertex_count())
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
                .collect();
            let mut fast = input.clone();
            inverse_dft(&mut fast, n, dim);
            for r in spec.vertices() {
                let direct: Complex64 = spec
                    .vertices()
                    .map(|k| {
                        let dot: usize = k.coords().iter().zip(r.coords()).map(|(a, b)| a * b).sum();
                        input[k.flat()] * Complex64::from_polar(1.0, 2.0 * PI * dot as f64 / n as f64)
                    })
                    .sum();
                assert!((fast[r.flat()] - direct).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn even_side_keeps_zone_corner() {
        let spec = build_lattice(2, 8).unwrap();
        let v = spec.vertex(&[0, 0]).unwrap();
        let nu = perturber_state(&spec, &v).unwrap();
        assert!(nu.excluded_modes.is_empty());
        assert!((nu.vector.norm() - 1.0).abs() < 1e-12);
        assert!(WaveState::uniform(&spec).inner(&nu.vector).norm() < 1e-10);
    }

    #[test]
    fn translation_matches_direct_construction() {
        let spec = build_lattice(2, 9).unwrap();
        let a = spec.vertex(&[0, 0]).unwrap();
        let b = spec.vertex(&[4, 7]).unwrap();
        let moved = perturber_state(&spec, &a).unwrap().translated(&spec, &b);
        let direct = perturber_state(&spec, &b).unwrap();
        assert!(moved.vector.max_abs_diff(&direct.vector) < 1e-12);
    }

    #[test]
    fn dense_and_formula_states_agree() {
        let spec = build_lattice(2, 11).unwrap();
        let v = spec.vertex(&[3, 8]).unwrap();
        let f = perturber_state(&spec, &v).unwrap();
        let e = perturber_state_dense(&spec, &v, 8192).unwrap();
        assert!((e.vector.norm() - 1.0).abs() < 1e-10);
        assert!(WaveState::uniform(&spec).inner(&e.vector).norm() < 1e-10);
        assert!(f.vector.overlap_sqr(&e.vector) > 0.99);
    }

    #[test]
    fn nearly_invariant_under_search_walk() {
        let spec = build_lattice(2, 11).unwrap();
        let v = spec.vertex(&[2, 2]).unwrap();
        let nu = perturber_state(&spec, &v).unwrap();
        let marks = MarkedSet::single(&spec, v, 1.0).unwrap();
        let stepped = step_perturbed(&nu.vector, &spec, &marks).unwrap();
        // the only large leak is the coupling to Φ0
        assert!(stepped.overlap_sqr(&nu.vector) > 0.98);
    }
}
