//! Bloch spectrum of the unperturbed walk.
//!
//! A plane wave `e^{2πi κ·x/n}` with channel polarization `p` is mapped by
//! `U0` to the same plane wave with polarization `M_κ p`, where
//! `M_κ = S_κ σ` and `S_κ` is the flip-flop shift in momentum space:
//! `(S_κ q)_{i+} = e^{ik_i} q_{i−}`, `(S_κ q)_{i−} = e^{−ik_i} q_{i+}`.
//! `S_κ` is an involution, so `span{s, S_κ s}` is invariant under `M_κ`; on it
//! `M_κ` has trace `2 cos θ_κ` and unit determinant, giving the two band
//! eigenvalues `e^{±iθ_κ}` with `cos θ_κ = (1/d) Σ cos(2π κ_i / n)`. On the
//! orthogonal complement `M_κ = −S_κ`, which contributes the flat bands at
//! phases `0` and `π`, `d − 1` of each per `κ`.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::state::{NormPolicy, WaveState};
use crate::walk::coin_matrix;

const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// A band eigenmode of `U0` labelled by its quasi-momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochMode {
    pub kappa: Vec<usize>,
    /// In `[0, π]`.
    pub theta: f64,
    pub branch: Branch,
}

impl BlochMode {
    pub fn new(spec: &LatticeSpec, kappa: &[usize], branch: Branch) -> Self {
        BlochMode {
            kappa: kappa.to_vec(),
            theta: band_phase(spec, kappa),
            branch,
        }
    }

    /// Signed eigenphase `±θ_κ`.
    pub fn phase(&self) -> f64 {
        self.branch.sign() * self.theta
    }

    pub fn is_zero_momentum(&self) -> bool {
        self.kappa.iter().all(|&k| k == 0)
    }
}

/// `(1/d) Σ cos(2π κ_i / n)`.
pub fn band_cosine(spec: &LatticeSpec, kappa: &[usize]) -> f64 {
    let n = spec.side() as f64;
    kappa.iter().map(|&k| (2.0 * PI * k as f64 / n).cos()).sum::<f64>() / spec.dim() as f64
}

/// `θ_κ ∈ [0, π]`.
pub fn band_phase(spec: &LatticeSpec, kappa: &[usize]) -> f64 {
    band_cosine(spec, kappa).clamp(-1.0, 1.0).acos()
}

/// All quasi-momentum labels in row-major order.
pub fn kappa_labels(spec: &LatticeSpec) -> impl Iterator<Item = Vec<usize>> + '_ {
    spec.vertices().map(|v| v.coords().to_vec())
}

/// Both band branches for every `κ`, sorted by `(κ, branch)`.
pub fn bloch_eigenphases(spec: &LatticeSpec) -> Vec<BlochMode> {
    kappa_labels(spec)
        .flat_map(|kappa| {
            [Branch::Plus, Branch::Minus].map(|b| BlochMode::new(spec, &kappa, b))
        })
        .collect()
}

/// Flat-band phases: `d − 1` copies each of `0` and `π` per `κ`.
pub fn flat_band_phases(spec: &LatticeSpec) -> Vec<f64> {
    let per = spec.dim() - 1;
    let mut out = Vec::with_capacity(2 * per * spec.vertex_count());
    for _ in 0..spec.vertex_count() {
        out.extend(std::iter::repeat_n(0.0, per));
        out.extend(std::iter::repeat_n(PI, per));
    }
    out
}

/// Number of `κ` whose two band branches coincide (`θ_κ ∈ {0, π}`), where
/// one of the pair is really a flat-band state.
pub fn branch_deficit(spec: &LatticeSpec) -> usize {
    kappa_labels(spec)
        .filter(|k| band_phase(spec, k).sin().abs() < 1e-9)
        .count()
}

fn momentum_phases(spec: &LatticeSpec, kappa: &[usize]) -> Vec<Complex64> {
    let n = spec.side() as f64;
    kappa
        .iter()
        .map(|&k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n))
        .collect()
}

/// `S_κ q`.
fn momentum_shift(phases: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); q.len()];
    for (axis, e) in phases.iter().enumerate() {
        out[2 * axis] = e * q[2 * axis + 1];
        out[2 * axis + 1] = e.conj() * q[2 * axis];
    }
    out
}

/// The `2d × 2d` matrix `M_κ = S_κ σ` acting on channel polarizations.
pub fn reduced_operator(spec: &LatticeSpec, kappa: &[usize]) -> Mat<Complex64> {
    let d2 = spec.channel_count();
    let sigma = coin_matrix(spec.dim());
    let phases = momentum_phases(spec, kappa);
    let mut m = Mat::<Complex64>::zeros(d2, d2);
    for j in 0..d2 {
        let col: Vec<Complex64> = (0..d2).map(|i| sigma[(i, j)]).collect();
        for (i, v) in momentum_shift(&phases, &col).into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

/// Eigenphases of [`reduced_operator`] computed numerically.
pub fn reduced_phases(spec: &LatticeSpec, kappa: &[usize]) -> Result<Vec<f64>> {
    let vals = reduced_operator(spec, kappa)
        .eigenvalues()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(vals.into_iter().map(|z| z.arg()).collect())
}

/// Unit channel polarization of a band mode, gauge-fixed so that `⟨s|p⟩`
/// is real and positive.
pub fn bloch_polarization(spec: &LatticeSpec, mode: &BlochMode) -> Result<Vec<Complex64>> {
    let d2 = spec.channel_count();
    let s = vec![Complex64::new(1.0 / (d2 as f64).sqrt(), 0.0); d2];
    if mode.is_zero_momentum() {
        return Ok(s);
    }
    if mode.theta.sin().abs() < DEGENERACY_TOL {
        return Err(Error::DegenerateMode {
            kappa: mode.kappa.clone(),
        });
    }
    // M_κ (s − e^{iφ} S_κ s) = e^{iφ} (s − e^{iφ} S_κ s)
    let phase = Complex64::from_polar(1.0, mode.phase());
    let shifted = momentum_shift(&momentum_phases(spec, &mode.kappa), &s);
    let mut p: Vec<Complex64> = s.iter().zip(&shifted).map(|(a, b)| a - phase * b).collect();
    let overlap: Complex64 = s.iter().zip(&p).map(|(a, b)| a.conj() * b).sum();
    let gauge = overlap.conj() / overlap.norm();
    let norm = p.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut p {
        *a *= gauge / norm;
    }
    Ok(p)
}

/// The Bloch eigenvector `|Φ±_κ⟩ = |κ⟩ ⊗ |p±_κ⟩` of `U0`.
pub fn bloch_eigenvector(spec: &LatticeSpec, mode: &BlochMode) -> Result<WaveState> {
    if mode.kappa.len() != spec.dim() {
        return Err(Error::WrongArity {
            expected: spec.dim(),
            got: mode.kappa.len(),
        });
    }
    if mode.kappa.iter().any(|&k| k >= spec.side()) {
        return Err(Error::InvalidConfig(format!(
            "quasi-momentum {:?} outside [0, {})",
            mode.kappa,
            spec.side()
        )));
    }
    let p = bloch_polarization(spec, mode)?;
    let n = spec.side();
    let roots: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0 / (spec.vertex_count() as f64).sqrt(), 2.0 * PI * j as f64 / n as f64))
        .collect();
    let mut amps = Vec::with_capacity(spec.state_dim());
    for x in spec.vertices() {
        let dot: usize = x.coords().iter().zip(&mode.kappa).map(|(a, b)| a * b).sum();
        let w = roots[dot % n];
        amps.extend(p.iter().map(|c| w * c));
    }
    WaveState::from_amplitudes(spec, amps, NormPolicy::Unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;
    use crate::walk::step_unperturbed;

    #[test]
    fn corner_of_brillouin_zone() {
        let spec = build_lattice(2, 2).unwrap();
        let m = BlochMode::new(&spec, &[1, 1], Branch::Plus);
        assert!((band_cosine(&spec, &[1, 1]) + 1.0).abs() < 1e-15);
        assert!((m.theta - PI).abs() < 1e-7);
        assert_eq!(BlochMode::new(&spec, &[0, 0], Branch::Plus).theta, 0.0);
    }

    #[test]
    fn modes_are_sorted_and_complete() {
        let spec = build_lattice(2, 4).unwrap();
        let modes = bloch_eigenphases(&spec);
        assert_eq!(modes.len(), 32);
        for pair in modes.windows(2) {
            assert!((pair[0].kappa.clone(), pair[0].branch) < (pair[1].kappa.clone(), pair[1].branch));
        }
        for m in &modes {
            assert!((m.theta.cos() - band_cosine(&spec, &m.kappa)).abs() < 1e-14);
        }
    }

    #[test]
    fn reduced_operator_spectrum_is_band_plus_flat() {
        let spec = build_lattice(3, 5).unwrap();
        for kappa in [[1, 2, 0], [4, 4, 3], [0, 0, 1]] {
            let mut got = reduced_phases(&spec, &kappa).unwrap();
            let theta = band_phase(&spec, &kappa);
            let mut expected = vec![theta, -theta, 0.0, 0.0, PI, PI];
            let canon = |x: f64| if x < -PI + 1e-9 { x + 2.0 * PI } else { x };
            got = got.into_iter().map(canon).collect();
            got.sort_by(f64::total_cmp);
            expected.sort_by(f64::total_cmp);
            for (g, e) in got.iter().zip(&expected) {
                assert!((g - e).abs() < 1e-10, "{kappa:?}: {got:?} vs {expected:?}");
            }
        }
    }

    #[test]
    fn zero_momentum_is_uniform_state() {
        let spec = build_lattice(2, 5).unwrap();
        let v = bloch_eigenvector(&spec, &BlochMode::new(&spec, &[0, 0], Branch::Plus)).unwrap();
        assert!(v.max_abs_diff(&WaveState::uniform(&spec)) < 1e-15);
    }

    #[test]
    fn eigenvectors_have_small_residual() {
        let spec = build_lattice(2, 8).unwrap();
        for kappa in [[1, 0], [3, 5], [7, 7], [2, 6]] {
            for b in [Branch::Plus, Branch::Minus] {
                let mode = BlochMode::new(&spec, &kappa, b);
                let v = bloch_eigenvector(&spec, &mode).unwrap();
                assert!((v.norm() - 1.0).abs() < 1e-12);
                let mut expected = v.clone();
                expected.scale_complex(Complex64::from_polar(1.0, mode.phase()));
                let got = step_unperturbed(&v, &spec).unwrap();
                let resid = got.amplitudes().iter().zip(expected.amplitudes())
                    .map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                assert!(resid < 1e-10, "{kappa:?} {b:?}: {resid}");
            }
        }
    }

    #[test]
    fn polarization_overlap_with_s_is_half() {
        let spec = build_lattice(3, 6).unwrap();
        let s = 1.0 / 6f64.sqrt();
        let p = bloch_polarization(&spec, &BlochMode::new(&spec, &[1, 2, 5], Branch::Minus)).unwrap();
        let overlap: Complex64 = p.iter().map(|a| a * s).sum();
        assert!((overlap.re - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(overlap.im.abs() < 1e-15);
    }

    #[test]
    fn conjugation_reverses_momentum_and_branch() {
        // U0 is real, so conj(Φ+_κ) is the − branch at −κ.
        let spec = build_lattice(2, 8).unwrap();
        let kappa = [3, 1];
        let minus_kappa = [5, 7];
        let plus = bloch_eigenvector(&spec, &BlochMode::new(&spec, &kappa, Branch::Plus)).unwrap();
        let minus = bloch_eigenvector(&spec, &BlochMode::new(&spec, &minus_kappa, Branch::Minus)).unwrap();
        assert!((minus.overlap_sqr(&plus.conj()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_mode_is_reported() {
        let spec = build_lattice(2, 4).unwrap();
        let err = bloch_eigenvector(&spec, &BlochMode::new(&spec, &[2, 2], Branch::Plus)).unwrap_err();
        assert!(matches!(err, Error::DegenerateMode { .. }));
        assert_eq!(branch_deficit(&spec), 2);
        assert_eq!(branch_deficit(&build_lattice(2, 11).unwrap()), 1);
    }

    #[test]
    fn flat_band_count_completes_spectrum() {
        for (d, n) in [(1, 5), (2, 4), (3, 3)] {
            let spec = build_lattice(d, n).unwrap();
            assert_eq!(
                bloch_eigenphases(&spec).len() + flat_band_phases(&spec).len(),
                spec.state_dim()
            );
        }
    }
}
