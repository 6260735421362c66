//! Avoided crossing between `|Φ0⟩` and the perturber states at `λ = 1`.
//!
//! In the basis `{|Φ0⟩, |ν¹⟩, …, |ν^m⟩}` the walk acts like `e^{−iH}` with
//!
//! ```text
//!     ⎛ 0    −iε  −iε  …  −iε ⎞
//! H = ⎜ iε    0    0   …   0  ⎟
//!     ⎜ ⋮               ⋱     ⎟
//!     ⎝ iε    0    0   …   0  ⎠
//! ```
//!
//! (the diagonal `k_l a` is a multiple of `2π` and drops out). Its spectrum is
//! `±√m ε` plus an `(m − 1)`-fold zero, so the gap is `Δ = 2√m ε`, the search
//! time `T0 = π / (2√m ε)` and the transfer time `T_s = 2 T0`.

use std::f64::consts::PI;

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::dense::{dense_operator, eigen_decomposition};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::marks::MarkedSet;
use crate::spectral::bloch::Branch;
use crate::spectral::perturber::{perturber_state, PerturberState};
use crate::state::WaveState;
use crate::walk::Walker;

/// The two estimates of the coupling `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    /// `|⟨ν|U_1|Φ0⟩|`, the primary value.
    pub matrix_element: f64,
    /// `2 |⟨sv|ν⟩| / √(n^d)`.
    pub closed_form: f64,
    pub relative_difference: f64,
}

pub fn coupling_epsilon(spec: &LatticeSpec, perturber: &PerturberState) -> Result<Coupling> {
    let marks = MarkedSet::single(spec, perturber.target.clone(), 1.0)?;
    let mut moved = WaveState::uniform(spec);
    Walker::new(*spec).step(&mut moved, &marks)?;
    let matrix_element = perturber.vector.inner(&moved).norm();
    let closed_form = 2.0 * perturber.overlap_magnitude() / (spec.vertex_count() as f64).sqrt();
    Ok(Coupling {
        matrix_element,
        closed_form,
        relative_difference: (matrix_element - closed_form).abs() / matrix_element,
    })
}

#[derive(Debug, Clone)]
pub struct ModelEigenpair {
    pub value: f64,
    pub vector: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct CrossingModel {
    pub epsilon: f64,
    pub closed_form_epsilon: f64,
    pub delta: f64,
    pub t0: usize,
    pub t_s: usize,
    pub m_targets: usize,
    /// Band index `l` of `k_l = 2πl`; the phase `e^{i k_l a}` is 1.
    pub k_level: i64,
    pub overlap_sv: f64,
    pub hamiltonian: Mat<Complex64>,
    /// Sorted by ascending eigenvalue.
    pub eigenpairs: Vec<ModelEigenpair>,
}

impl CrossingModel {
    pub fn from_epsilon(epsilon: f64, m_targets: usize) -> Result<Self> {
        if m_targets == 0 {
            return Err(Error::InvalidConfig("crossing model needs at least one mark".into()));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("coupling must be positive, got {epsilon}")));
        }
        let root_m = (m_targets as f64).sqrt();
        let t0 = (PI / (2.0 * epsilon * root_m)).round() as usize;
        let hamiltonian = effective_hamiltonian(epsilon, m_targets);
        let eigenpairs = hermitian_eigenpairs(&hamiltonian)?;
        Ok(CrossingModel {
            epsilon,
            closed_form_epsilon: epsilon,
            delta: 2.0 * root_m * epsilon,
            t0,
            t_s: 2 * t0,
            m_targets,
            k_level: 0,
            overlap_sv: 0.0,
            hamiltonian,
            eigenpairs,
        })
    }

    /// Same coupling, different number of marks.
    pub fn with_targets(&self, m_targets: usize) -> Result<Self> {
        let mut model = CrossingModel::from_epsilon(self.epsilon, m_targets)?;
        model.closed_form_epsilon = self.closed_form_epsilon;
        model.overlap_sv = self.overlap_sv;
        Ok(model)
    }
}

/// Crossing model for `marks`, all at `λ = 1`. The coupling comes from the
/// perturber state of the first mark; every mark is equivalent by
/// translation.
pub fn crossing_model(spec: &LatticeSpec, marks: &MarkedSet) -> Result<CrossingModel> {
    let first = marks
        .get(0)
        .ok_or_else(|| Error::InvalidConfig("crossing model needs at least one mark".into()))?;
    if !marks.all_lambdas_equal(1.0) {
        return Err(Error::InvalidConfig("crossing model requires every mark at lambda = 1".into()));
    }
    let perturber = perturber_state(spec, &first.vertex)?;
    crossing_model_from(spec, &perturber, marks.len())
}

pub fn crossing_model_from(spec: &LatticeSpec, perturber: &PerturberState, m_targets: usize) -> Result<CrossingModel> {
    let coupling = coupling_epsilon(spec, perturber)?;
    let mut model = CrossingModel::from_epsilon(coupling.matrix_element, m_targets)?;
    model.closed_form_epsilon = coupling.closed_form;
    model.overlap_sv = perturber.overlap_magnitude();
    Ok(model)
}

/// The `(m + 1) × (m + 1)` effective Hamiltonian.
pub fn effective_hamiltonian(epsilon: f64, m_targets: usize) -> Mat<Complex64> {
    Mat::from_fn(m_targets + 1, m_targets + 1, |i, j| match (i, j) {
        (0, j) if j > 0 => Complex64::new(0.0, -epsilon),
        (i, 0) if i > 0 => Complex64::new(0.0, epsilon),
        _ => Complex64::new(0.0, 0.0),
    })
}

fn hermitian_eigenpairs(h: &Mat<Complex64>) -> Result<Vec<ModelEigenpair>> {
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let values: Vec<Complex64> = evd.S().column_vector().iter().copied().collect();
    Ok(values
        .iter()
        .enumerate()
        .map(|(k, v)| ModelEigenpair {
            value: v.re,
            vector: evd.U().col(k).iter().copied().collect(),
        })
        .collect())
}

/// `|ω±⟩ = i/√(2m) (∓i√m, 1, …, 1)`, eigenvalue `±√m ε`.
pub fn model_eigenvector(m_targets: usize, branch: Branch) -> Vec<Complex64> {
    let m = m_targets as f64;
    let pre = Complex64::new(0.0, 1.0 / (2.0 * m).sqrt());
    let mut v = vec![pre; m_targets + 1];
    v[0] = pre * Complex64::new(0.0, -branch.sign() * m.sqrt());
    v
}

/// `|ω0⟩ = (m(m − 1))^{−1/2} (0, 1, …, 1, 1 − m)`, in the degenerate
/// zero-eigenvalue subspace.
pub fn model_degenerate_vector(m_targets: usize) -> Vec<Complex64> {
    let m = m_targets as f64;
    let pre = 1.0 / (m * (m - 1.0)).sqrt();
    let mut v = vec![Complex64::new(pre, 0.0); m_targets + 1];
    v[0] = Complex64::new(0.0, 0.0);
    v[m_targets] = Complex64::new(pre * (1.0 - m), 0.0);
    v
}

/// Exact gap at the crossing, taken from the two eigenvectors of `U_λ`
/// carrying the largest weight of `|Φ0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapMeasurement {
    pub gap: f64,
    /// Eigenphases of the pair, upper first.
    pub phases: [f64; 2],
    pub carrier_weights: [f64; 2],
}

pub fn measure_gap(spec: &LatticeSpec, marks: &MarkedSet, cap: usize) -> Result<GapMeasurement> {
    let op = dense_operator(spec, marks, cap)?;
    let evd = eigen_decomposition(&op)?;
    let weights = evd.weights(&WaveState::uniform(spec));
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    let (a, b) = (order[0], order[1]);
    let (pa, pb) = (evd.phase(a), evd.phase(b));
    let (hi, lo) = if pa >= pb { (a, b) } else { (b, a) };
    Ok(GapMeasurement {
        gap: phase_distance(pa, pb),
        phases: [evd.phase(hi), evd.phase(lo)],
        carrier_weights: [weights[hi], weights[lo]],
    })
}

/// Distance between two phases on the circle.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;

    #[test]
    fn hamiltonian_spectrum_single_target() {
        let model = CrossingModel::from_epsilon(0.05, 1).unwrap();
        let vals: Vec<f64> = model.eigenpairs.iter().map(|p| p.value).collect();
        assert!((vals[0] + 0.05).abs() < 1e-14 && (vals[1] - 0.05).abs() < 1e-14);
        assert_eq!(model.t0, (PI / 0.1).round() as usize);
        assert_eq!(model.t_s, 2 * model.t0);
        assert!((model.delta - 0.1).abs() < 1e-15);
    }

    #[test]
    fn four_targets() {
        let eps = 0.03;
        let model = CrossingModel::from_epsilon(eps, 4).unwrap();
        assert!((model.delta - 4.0 * eps).abs() < 1e-12);
        let vals: Vec<f64> = model.eigenpairs.iter().map(|p| p.value).collect();
        assert!((vals[0] + 2.0 * eps).abs() < 1e-12);
        assert!((vals[4] - 2.0 * eps).abs() < 1e-12);
        for v in &vals[1..4] {
            assert!(v.abs() < 1e-12);
        }
        let plus = model_eigenvector(4, Branch::Plus);
        assert!((plus[0].norm() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn quoted_eigenvectors_solve_the_model() {
        for m in 2..=6 {
            let eps = 0.07;
            let h = effective_hamiltonian(eps, m);
            let check = |v: &[Complex64], value: f64| {
                let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-14);
                for i in 0..=m {
                    let hv: Complex64 = (0..=m).map(|j| h[(i, j)] * v[j]).sum();
                    assert!((hv - v[i] * value).norm() < 1e-14, "m={m}");
                }
            };
            let root = (m as f64).sqrt() * eps;
            check(&model_eigenvector(m, Branch::Plus), root);
            check(&model_eigenvector(m, Branch::Minus), -root);
            check(&model_degenerate_vector(m), 0.0);
        }
    }

    #[test]
    fn sender_state_decomposes_over_model_basis() {
        // ν^m = −i/√(2m) (ω+ + ω− − i√(2(m−1)) ω0)
        for m in 2..=5 {
            let mf = m as f64;
            let plus = model_eigenvector(m, Branch::Plus);
            let minus = model_eigenvector(m, Branch::Minus);
            let zero = model_degenerate_vector(m);
            let pre = Complex64::new(0.0, -1.0 / (2.0 * mf).sqrt());
            let c0 = Complex64::new(0.0, -(2.0 * (mf - 1.0)).sqrt());
            for i in 0..=m {
                let got = pre * (plus[i] + minus[i] + c0 * zero[i]);
                let expected = if i == m { 1.0 } else { 0.0 };
                assert!((got - expected).norm() < 1e-14, "m={m} i={i}: {got}");
            }
            // after T_s the ω± components have picked up e^{∓iπ} = −1
            for i in 0..=m {
                let got = pre * (-plus[i] - minus[i] + c0 * zero[i]);
                let expected = match i {
                    0 => 0.0,
                    i if i == m => 1.0 - 2.0 / mf,
                    _ => -2.0 / mf,
                };
                assert!((got - expected).norm() < 1e-14, "m={m} i={i}: {got}");
            }
        }
    }

    #[test]
    fn rejects_detuned_marks() {
        let spec = build_lattice(2, 7).unwrap();
        let v = spec.vertex(&[1, 1]).unwrap();
        let marks = MarkedSet::single(&spec, v, 0.9).unwrap();
        assert!(crossing_model(&spec, &marks).is_err());
        assert!(crossing_model(&spec, &MarkedSet::empty()).is_err());
    }

    #[test]
    fn coupling_estimates_agree_and_are_positive() {
        let mut previous = f64::INFINITY;
        for n in [11, 15, 21] {
            let spec = build_lattice(2, n).unwrap();
            let v = spec.vertex(&[0, 0]).unwrap();
            let nu = perturber_state(&spec, &v).unwrap();
            let c = coupling_epsilon(&spec, &nu).unwrap();
            assert!(c.matrix_element > 0.0);
            assert!(c.relative_difference < 0.3);
            assert!(c.relative_difference <= previous + 1e-12);
            previous = c.relative_difference;
        }
    }

    #[test]
    fn single_mark_gap_is_twice_the_coupling() {
        let spec = build_lattice(2, 11).unwrap();
        let v = spec.vertex(&[5, 5]).unwrap();
        let marks = MarkedSet::single(&spec, v, 1.0).unwrap();
        let model = crossing_model(&spec, &marks).unwrap();
        let measured = measure_gap(&spec, &marks, 8192).unwrap();
        assert!((measured.gap / (2.0 * model.epsilon) - 1.0).abs() < 0.1);
        assert!((measured.phases[0] + measured.phases[1]).abs() < 1e-8);
    }

    #[test]
    fn two_marks_on_21_gap_law() {
        let spec = build_lattice(2, 21).unwrap();
        let vs = [spec.vertex(&[0, 0]).unwrap(), spec.vertex(&[10, 10]).unwrap()];
        let marks = MarkedSet::uniform(&spec, &vs, 1.0).unwrap();
        let model = crossing_model(&spec, &marks).unwrap();
        let measured = measure_gap(&spec, &marks, 8192).unwrap();
        let expected = 2.0 * 2f64.sqrt() * model.epsilon;
        assert!((measured.gap / expected - 1.0).abs() < 0.15);
    }

    #[test]
    fn phase_distance_wraps() {
        assert!((phase_distance(3.1, -3.1) - (2.0 * PI - 6.2)).abs() < 1e-12);
        assert!((phase_distance(0.2, -0.1) - 0.3).abs() < 1e-12);
    }
}
