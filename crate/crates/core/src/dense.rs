//! Explicit matrices of the walk operator for small lattices, and the
//! unitary eigendecomposition used for exact spectra.
//!
//! The matrix is assembled from its factors (block-diagonal coin, then the
//! shift permutation) using coordinate arithmetic only, so it serves as an
//! independent check of [`Walker`](crate::Walker).

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{ChannelIndex, LatticeSpec};
use crate::marks::MarkedSet;
use crate::state::WaveState;
use crate::walk::coin_matrix;

pub const DEFAULT_DENSE_CAP: usize = 8192;

/// The `N × N` matrix of `U_λ = S · C'`.
pub fn dense_operator(spec: &LatticeSpec, marks: &MarkedSet, cap: usize) -> Result<Mat<Complex64>> {
    let size = spec.state_dim();
    if size > cap {
        return Err(Error::DenseCapExceeded { size, cap });
    }
    let d2 = spec.channel_count();
    let sigma = coin_matrix(spec.dim());
    let mut coins: Vec<Option<Mat<Complex64>>> = vec![None; spec.vertex_count()];
    for m in marks {
        // σ + (e^{iπλ} − 1)|s⟩⟨s|, with ⟨c|s⟩⟨s|c'⟩ = 1/2d
        let shift = m.phase_shift() / d2 as f64;
        coins[m.vertex.flat()] = Some(Mat::from_fn(d2, d2, |i, j| sigma[(i, j)] + shift));
    }

    let mut u = Mat::<Complex64>::zeros(size, size);
    for x in spec.vertices() {
        let coin = coins[x.flat()].as_ref().unwrap_or(&sigma);
        for out_c in 0..d2 {
            let ch = ChannelIndex::from_flat(out_c);
            // leaving along (i, ±) arrives at x ± e_i in (i, ∓)
            let dest = spec.neighbor(&x, ch.axis, ch.sign);
            let row = spec.flat_index(ChannelIndex::new(ch.axis, ch.sign.flip()), &dest);
            for in_c in 0..d2 {
                let col = spec.flat_index(ChannelIndex::from_flat(in_c), &x);
                u[(row, col)] = coin[(out_c, in_c)];
            }
        }
    }
    Ok(u)
}

pub fn apply(op: &Mat<Complex64>, state: &WaveState) -> WaveState {
    assert_eq!(op.ncols(), state.len());
    let amps = state.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); op.nrows()];
    for (j, a) in amps.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += op[(i, j)] * a;
        }
    }
    let mut res = state.clone();
    res.amplitudes_mut().copy_from_slice(&out);
    res
}

/// `max |(U†U − 1)_ij|`.
pub fn unitarity_defect(op: &Mat<Complex64>) -> f64 {
    let prod = op.adjoint() * op;
    let mut worst: f64 = 0.0;
    for j in 0..prod.ncols() {
        for i in 0..prod.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

fn imag_free(op: &Mat<Complex64>) -> bool {
    (0..op.ncols()).all(|j| (0..op.nrows()).all(|i| op[(i, j)].im == 0.0))
}

fn real_part(op: &Mat<Complex64>) -> Mat<f64> {
    Mat::from_fn(op.nrows(), op.ncols(), |i, j| op[(i, j)].re)
}

/// Eigenvalues of a unitary matrix; real matrices take the cheaper real path.
pub fn eigenvalues(op: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    let vals = if imag_free(op) {
        real_part(op).eigenvalues()
    } else {
        op.eigenvalues()
    };
    vals.map_err(|e| Error::Eigen(format!("{e:?}")))
}

/// Eigenphases in `(−π, π]`.
pub fn eigenphases(op: &Mat<Complex64>) -> Result<Vec<f64>> {
    Ok(eigenvalues(op)?.into_iter().map(|z| z.arg()).collect())
}

/// Eigenvalues and unit-norm eigenvectors (columns of `vectors`).
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    pub values: Vec<Complex64>,
    pub vectors: Mat<Complex64>,
}

impl UnitaryEigen {
    pub fn phase(&self, k: usize) -> f64 {
        self.values[k].arg()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.col(k).iter().copied().collect()
    }

    /// `|⟨v_k|ψ⟩|²` for every eigenvector.
    pub fn weights(&self, state: &WaveState) -> Vec<f64> {
        let amps = state.amplitudes();
        (0..self.vectors.ncols())
            .map(|k| {
                self.vectors
                    .col(k)
                    .iter()
                    .zip(amps)
                    .map(|(v, a)| v.conj() * a)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .collect()
    }
}

pub fn eigen_decomposition(op: &Mat<Complex64>) -> Result<UnitaryEigen> {
    let (values, mut vectors) = if imag_free(op) {
        let evd = real_part(op).eigen().map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let values: Vec<Complex64> = evd.S().column_vector().iter().copied().collect();
        (values, evd.U().to_owned())
    } else {
        let evd = op.eigen().map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let values: Vec<Complex64> = evd.S().column_vector().iter().copied().collect();
        (values, evd.U().to_owned())
    };
    for k in 0..vectors.ncols() {
        let norm = vectors.col(k).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..vectors.nrows() {
                vectors[(i, k)] /= norm;
            }
        }
    }
    Ok(UnitaryEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;
    use crate::walk::step_unperturbed;

    #[test]
    fn smallest_lattice_matches_stepping() {
        let spec = build_lattice(1, 2).unwrap();
        let u = dense_operator(&spec, &MarkedSet::empty(), DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(u.nrows(), 4);
        for x in spec.vertices() {
            for c in spec.channels() {
                let e = WaveState::basis(&spec, c, &x);
                let col = spec.flat_index(c, &x);
                let stepped = step_unperturbed(&e, &spec).unwrap();
                for (i, a) in stepped.amplitudes().iter().enumerate() {
                    assert!((u[(i, col)] - a).norm() < 1e-15);
                }
            }
        }
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let spec = build_lattice(2, 10).unwrap();
        assert!(matches!(
            dense_operator(&spec, &MarkedSet::empty(), 100),
            Err(Error::DenseCapExceeded { size: 400, cap: 100 })
        ));
    }

    #[test]
    fn marked_operator_is_unitary_with_unit_eigenvalues() {
        let spec = build_lattice(2, 4).unwrap();
        let v = spec.vertex(&[1, 2]).unwrap();
        let marks = MarkedSet::single(&spec, v, 1.0).unwrap();
        let u = dense_operator(&spec, &marks, DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(u.nrows(), 64);
        assert!(unitarity_defect(&u) < 1e-12);
        for z in eigenvalues(&u).unwrap() {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        let spec = build_lattice(2, 3).unwrap();
        let v = spec.vertex(&[0, 2]).unwrap();
        let marks = MarkedSet::single(&spec, v, 0.5).unwrap();
        let u = dense_operator(&spec, &marks, DEFAULT_DENSE_CAP).unwrap();
        let evd = eigen_decomposition(&u).unwrap();
        for k in 0..u.ncols() {
            let vk = WaveState::from_amplitudes(&spec, evd.vector(k), Default::default()).unwrap();
            let mut expected = vk.clone();
            expected.scale_complex(evd.values[k]);
            assert!(apply(&u, &vk).max_abs_diff(&expected) < 1e-10);
        }
    }
}
