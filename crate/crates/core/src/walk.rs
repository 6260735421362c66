//! O(N) application of the walk operator.
//!
//! One step is the coin (Grover/Kirchhoff `σ = 2|s⟩⟨s| − 1` on every vertex,
//! plus the rank-one phase correction on marked vertices) followed by the
//! flip-flop shift: the amplitude leaving `x` along `i+` arrives at
//! `x + e_i` in channel `i−`, and the one leaving along `i−` arrives at
//! `x − e_i` in channel `i+`.

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::marks::MarkedSet;
use crate::state::WaveState;

/// Dense `2d × 2d` Grover coin `2|s⟩⟨s| − 1`.
pub fn coin_matrix(dim: usize) -> Mat<Complex64> {
    let d2 = 2 * dim;
    let off = 1.0 / dim as f64;
    Mat::from_fn(d2, d2, |i, j| {
        if i == j {
            Complex64::new(off - 1.0, 0.0)
        } else {
            Complex64::new(off, 0.0)
        }
    })
}

/// Stepping engine bound to one lattice. Holds the neighbor tables and a
/// scratch buffer so repeated steps do not allocate.
pub struct Walker {
    spec: LatticeSpec,
    // forward[v * d + axis] = v + e_axis, backward[v * d + axis] = v - e_axis
    forward: Vec<usize>,
    backward: Vec<usize>,
    scratch: Vec<Complex64>,
    pool: Option<rayon::ThreadPool>,
}

impl Walker {
    pub fn new(spec: LatticeSpec) -> Self {
        let d = spec.dim();
        let n = spec.side();
        let mut forward = vec![0; spec.vertex_count() * d];
        let mut backward = vec![0; spec.vertex_count() * d];
        for v in 0..spec.vertex_count() {
            for axis in 0..d {
                let stride = spec.stride(axis);
                let c = (v / stride) % n;
                forward[v * d + axis] = if c + 1 == n { v - (n - 1) * stride } else { v + stride };
                backward[v * d + axis] = if c == 0 { v + (n - 1) * stride } else { v - stride };
            }
        }
        Walker {
            spec,
            forward,
            backward,
            scratch: vec![Complex64::new(0.0, 0.0); spec.state_dim()],
            pool: None,
        }
    }

    /// A walker that splits each step over `threads` workers. One thread
    /// runs the serial path. Results are identical for any thread count,
    /// since every output amplitude is computed by the same arithmetic.
    pub fn with_threads(spec: LatticeSpec, threads: usize) -> Result<Self> {
        let mut walker = Walker::new(spec);
        if threads > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            walker.pool = Some(pool);
        }
        Ok(walker)
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    /// In place: `state ← U_λ state`.
    pub fn step(&mut self, state: &mut WaveState, marks: &MarkedSet) -> Result<()> {
        state.check_dim(&self.spec)?;
        let d2 = self.spec.channel_count();
        let inv = 1.0 / d2 as f64;
        let amps = state.amplitudes_mut();

        // ⟨s|ψ_v⟩|s⟩ per channel, before the coin
        let corrections: Vec<(usize, Complex64)> = marks
            .iter()
            .filter(|m| m.lambda != 0.0 && m.lambda != 2.0)
            .map(|m| {
                let base = m.vertex.flat() * d2;
                let mean: Complex64 = amps[base..base + d2].iter().sum::<Complex64>() * inv;
                (base, m.phase_shift() * mean)
            })
            .collect();

        let coin = |block: &mut [Complex64]| {
            let twice_mean = block.iter().sum::<Complex64>() * (2.0 * inv);
            for a in block.iter_mut() {
                *a = twice_mean - *a;
            }
        };
        match &self.pool {
            Some(pool) => pool.install(|| amps.par_chunks_mut(d2).for_each(coin)),
            None => amps.chunks_mut(d2).for_each(coin),
        }
        for (base, delta) in corrections {
            for a in &mut amps[base..base + d2] {
                *a += delta;
            }
        }

        let d = self.spec.dim();
        let (forward, backward) = (&self.forward, &self.backward);
        let src: &[Complex64] = amps;
        let shift = |(v, dst): (usize, &mut [Complex64])| {
            for axis in 0..d {
                // arrives in i- from the i+ channel of v - e_i
                dst[2 * axis + 1] = src[backward[v * d + axis] * d2 + 2 * axis];
                // arrives in i+ from the i- channel of v + e_i
                dst[2 * axis] = src[forward[v * d + axis] * d2 + 2 * axis + 1];
            }
        };
        match &self.pool {
            Some(pool) => pool.install(|| {
                self.scratch.par_chunks_mut(d2).enumerate().for_each(shift)
            }),
            None => self.scratch.chunks_mut(d2).enumerate().for_each(shift),
        }
        amps.copy_from_slice(&self.scratch);
        Ok(())
    }

    pub fn step_unperturbed(&mut self, state: &mut WaveState) -> Result<()> {
        self.step(state, &MarkedSet::empty())
    }

    pub fn run(&mut self, state: &mut WaveState, marks: &MarkedSet, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step(state, marks)?;
        }
        Ok(())
    }
}

/// `U0 · state` on a fresh walker.
pub fn step_unperturbed(state: &WaveState, spec: &LatticeSpec) -> Result<WaveState> {
    step_perturbed(state, spec, &MarkedSet::empty())
}

/// `U_λ · state` for the marks given.
pub fn step_perturbed(state: &WaveState, spec: &LatticeSpec, marks: &MarkedSet) -> Result<WaveState> {
    let mut out = state.clone();
    Walker::new(*spec).step(&mut out, marks)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, ChannelIndex, Sign};

    fn max_abs(m: &Mat<Complex64>) -> f64 {
        let mut best: f64 = 0.0;
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                best = best.max(m[(i, j)].norm());
            }
        }
        best
    }

    #[test]
    fn coin_entries() {
        let c1 = coin_matrix(1);
        assert_eq!(c1[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(c1[(0, 1)], Complex64::new(1.0, 0.0));
        let c2 = coin_matrix(2);
        assert_eq!(c2[(1, 1)], Complex64::new(-0.5, 0.0));
        assert_eq!(c2[(2, 1)], Complex64::new(0.5, 0.0));
    }

    #[test]
    fn coin_is_an_involution_fixing_s() {
        for d in 1..=5 {
            let c = coin_matrix(d);
            let sq = &c * &c;
            let id = Mat::<Complex64>::identity(2 * d, 2 * d);
            assert!(max_abs(&(&sq - &id)) < 1e-14, "d={d}");
            let s = Mat::<Complex64>::from_fn(2 * d, 1, |_, _| Complex64::new(1.0, 0.0));
            assert!(max_abs(&(&(&c * &s) - &s)) < 1e-14);
        }
    }

    #[test]
    fn uniform_state_is_fixed() {
        let spec = build_lattice(2, 7).unwrap();
        let phi0 = WaveState::uniform(&spec);
        let out = step_unperturbed(&phi0, &spec).unwrap();
        assert!(out.max_abs_diff(&phi0) < 1e-12);
    }

    #[test]
    fn flip_flop_shift_on_1d() {
        // d = 1: coin swaps the two channels, then the shift moves the
        // amplitude to the neighbour and flips its label.
        let spec = build_lattice(1, 5).unwrap();
        let x = spec.vertex(&[2]).unwrap();
        let state = WaveState::basis(&spec, ChannelIndex::new(0, Sign::Minus), &x);
        let out = step_unperturbed(&state, &spec).unwrap();
        // after the coin the amplitude sits in (0,+) at x; it arrives at x+1 in (0,-)
        let y = spec.vertex(&[3]).unwrap();
        assert_eq!(out.amplitude(&spec, ChannelIndex::new(0, Sign::Minus), &y), Complex64::new(1.0, 0.0));
        assert!((out.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_zero_and_two_are_unperturbed() {
        let spec = build_lattice(2, 6).unwrap();
        let v = spec.vertex(&[1, 4]).unwrap();
        let state = WaveState::symmetric_at(&spec, &v);
        let free = step_unperturbed(&state, &spec).unwrap();
        for lambda in [0.0, 2.0] {
            let marks = MarkedSet::single(&spec, v.clone(), lambda).unwrap();
            let out = step_perturbed(&state, &spec, &marks).unwrap();
            assert!(out.max_abs_diff(&free) < 1e-15);
        }
    }

    #[test]
    fn search_coin_flips_symmetric_component() {
        // U' = U0 (1 - 2|sv><sv|): on |sv> itself this is -U0|sv>.
        let spec = build_lattice(2, 6).unwrap();
        let v = spec.vertex(&[3, 3]).unwrap();
        let sv = WaveState::symmetric_at(&spec, &v);
        let marks = MarkedSet::single(&spec, v, 1.0).unwrap();
        let out = step_perturbed(&sv, &spec, &marks).unwrap();
        let mut expected = step_unperturbed(&sv, &spec).unwrap();
        expected.scale(-1.0);
        assert!(out.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let spec = build_lattice(2, 6).unwrap();
        let other = build_lattice(2, 5).unwrap();
        let state = WaveState::uniform(&other);
        assert!(matches!(
            step_unperturbed(&state, &spec),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn threaded_steps_match_serial_bitwise() {
        let spec = build_lattice(2, 9).unwrap();
        let v = spec.vertex(&[2, 5]).unwrap();
        let marks = MarkedSet::single(&spec, v.clone(), 0.7).unwrap();
        let mut a = WaveState::symmetric_at(&spec, &v);
        let mut b = a.clone();
        let mut serial = Walker::new(spec);
        let mut threaded = Walker::with_threads(spec, 3).unwrap();
        serial.run(&mut a, &marks, 25).unwrap();
        threaded.run(&mut b, &marks, 25).unwrap();
        assert_eq!(a, b);
    }
}
