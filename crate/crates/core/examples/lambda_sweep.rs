//! Eigenphases near zero as the mark strength passes through λ = 1; the
//! crossing gap is smallest there.
use latticewave::spectral::lambda_sweep;
use latticewave::*;

fn main() -> Result<()> {
    let spec = build_lattice(2, 11)?;
    let target = spec.vertex(&[0, 0])?;
    let lambdas: Vec<f64> = (0..=20).map(|k| 0.8 + 0.02 * k as f64).collect();
    let sweep = lambda_sweep(&spec, &target, &lambdas, None, 8192)?;
    println!("epsilon {:.6}, window ±{:.4}", sweep.epsilon, sweep.window);
    for row in &sweep.rows {
        println!("lambda {:.2}  gap {:.6}  crossing {:+.6} {:+.6}", row.lambda, row.gap, row.crossing[0], row.crossing[1]);
    }
    println!("minimum gap at lambda = {:.4}", sweep.min_gap_lambda().unwrap_or(f64::NAN));
    Ok(())
}
