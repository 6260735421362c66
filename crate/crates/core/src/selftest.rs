//! Quick invariant checks at tiny lattice sizes.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{apply, dense_operator, eigenphases, unitarity_defect};
use crate::error::Result;
use crate::lattice::{build_lattice, LatticeSpec};
use crate::marks::MarkedSet;
use crate::spectral::{bloch_eigenphases, flat_band_phases};
use crate::state::{NormPolicy, WaveState};
use crate::walk::{coin_matrix, Walker};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub fn random_state(spec: &LatticeSpec, rng: &mut impl Rng) -> WaveState {
    let amps: Vec<Complex64> = (0..spec.state_dim())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut s = WaveState::from_amplitudes(spec, amps, NormPolicy::Unit).expect("sized to spec");
    s.normalize();
    s
}

/// Up to `count` distinct marks with `λ` drawn from `{0, 0.5, 1, 2}`.
pub fn random_marks(spec: &LatticeSpec, count: usize, rng: &mut impl Rng) -> MarkedSet {
    const LAMBDAS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
    let mut marks = MarkedSet::empty();
    for _ in 0..count.min(spec.max_marks()) {
        let v = spec.vertex_from_flat(rng.random_range(0..spec.vertex_count()));
        let lambda = LAMBDAS[rng.random_range(0..LAMBDAS.len())];
        let _ = marks.push(spec, v, lambda);
    }
    marks
}

// phases at ±π may land on either side of the branch cut
fn unwrap_cut(phase: f64) -> f64 {
    if phase < -std::f64::consts::PI + 1e-9 {
        phase + 2.0 * std::f64::consts::PI
    } else {
        phase
    }
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        name,
        passed: worst < tol,
        detail: format!("max deviation {worst:.3e} (tolerance {tol:.0e})"),
    }
}

pub fn run_selftest(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lattices: Vec<LatticeSpec> = [(1, 5), (1, 8), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3)]
        .into_iter()
        .map(|(d, n)| build_lattice(d, n))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();

    let mut oracle: f64 = 0.0;
    let mut defect: f64 = 0.0;
    for spec in &lattices {
        let mut walker = Walker::new(*spec);
        for _ in 0..5 {
            let marks = random_marks(spec, 3, &mut rng);
            let op = dense_operator(spec, &marks, 4096)?;
            defect = defect.max(unitarity_defect(&op));
            let state = random_state(spec, &mut rng);
            let mut fast = state.clone();
            walker.step(&mut fast, &marks)?;
            oracle = oracle.max(fast.max_abs_diff(&apply(&op, &state)));
        }
    }
    out.push(check("oracle equivalence (fast step vs dense matrix)", oracle, 1e-12));
    out.push(check("dense operator unitarity", defect, 1e-12));

    let mut drift: f64 = 0.0;
    for spec in &lattices {
        let marks = random_marks(spec, 2, &mut rng);
        let mut state = random_state(spec, &mut rng);
        let mut walker = Walker::new(*spec);
        walker.run(&mut state, &marks, 1000)?;
        drift = drift.max((state.norm() - 1.0).abs());
    }
    out.push(check("norm drift over 1000 steps", drift, 1e-10));

    let mut inv: f64 = 0.0;
    for d in 1..=4 {
        let c = coin_matrix(d);
        let sq = &c * &c;
        for i in 0..2 * d {
            for j in 0..2 * d {
                let id = if i == j { 1.0 } else { 0.0 };
                inv = inv.max((sq[(i, j)] - id).norm());
            }
        }
    }
    out.push(check("coin involution", inv, 1e-14));

    let mut fixed: f64 = 0.0;
    for spec in &lattices {
        let phi0 = WaveState::uniform(spec);
        let mut s = phi0.clone();
        Walker::new(*spec).run(&mut s, &MarkedSet::empty(), 10)?;
        fixed = fixed.max(s.max_abs_diff(&phi0));
    }
    out.push(check("uniform state fixed by the unmarked walk", fixed, 1e-12));

    let mut cov: f64 = 0.0;
    for spec in &lattices {
        let marks = random_marks(spec, 2, &mut rng);
        let shift: Vec<i64> = (0..spec.dim()).map(|_| rng.random_range(0..spec.side() as i64)).collect();
        let moved = MarkedSet::new(spec, marks.iter().map(|m| (spec.translate(&m.vertex, &shift), m.lambda)))?;
        let state = random_state(spec, &mut rng);
        let mut a = state.clone();
        let mut walker = Walker::new(*spec);
        walker.run(&mut a, &marks, 7)?;
        let mut b = state.translated(spec, &shift);
        walker.run(&mut b, &moved, 7)?;
        cov = cov.max(a.translated(spec, &shift).max_abs_diff(&b));
    }
    out.push(check("translation covariance", cov, 1e-12));

    let mut damp: f64 = 0.0;
    for spec in &lattices {
        let gamma = 0.05;
        let marks = random_marks(spec, 2, &mut rng);
        let mut s = random_state(spec, &mut rng).with_policy(NormPolicy::Free);
        let mut walker = Walker::new(*spec);
        for t in 1..=50 {
            walker.step(&mut s, &marks)?;
            s.scale(1.0 - gamma);
            let expected = (1.0 - gamma).powi(t);
            damp = damp.max((s.norm() / expected - 1.0).abs());
        }
    }
    out.push(check("damping exactness (1 - gamma)^t", damp, 1e-12));

    let mut bloch: f64 = 0.0;
    for spec in &lattices {
        let mut dense: Vec<f64> = eigenphases(&dense_operator(spec, &MarkedSet::empty(), 4096)?)?
            .into_iter()
            .map(unwrap_cut)
            .collect();
        let mut formula: Vec<f64> = bloch_eigenphases(spec)
            .iter()
            .map(|m| m.phase())
            .chain(flat_band_phases(spec))
            .map(unwrap_cut)
            .collect();
        dense.sort_by(f64::total_cmp);
        formula.sort_by(f64::total_cmp);
        for (a, b) in dense.iter().zip(&formula) {
            bloch = bloch.max((a - b).abs());
        }
        if dense.len() != formula.len() {
            bloch = f64::INFINITY;
        }
    }
    out.push(check("Bloch eigenphases vs dense spectrum", bloch, 1e-10));

    Ok(out)
}
