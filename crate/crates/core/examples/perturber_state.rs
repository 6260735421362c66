//! The localized perturber state of a mark: its overlap with the mark's
//! symmetric state and the coupling ε as the lattice grows.
use latticewave::spectral::{coupling_epsilon, perturber_state, perturber_state_dense};
use latticewave::*;

fn main() -> Result<()> {
    println!("{:>4} {:>10} {:>12} {:>12} {:>12}", "n", "|<sv|nu>|", "eps", "eps closed", "eps n sqrt(ln n)");
    for n in [11, 21, 41, 81, 161] {
        let spec = build_lattice(2, n)?;
        let v = spec.vertex(&[0, 0])?;
        let nu = perturber_state(&spec, &v)?;
        let c = coupling_epsilon(&spec, &nu)?;
        let scaled = c.matrix_element * n as f64 * (n as f64).ln().sqrt();
        println!(
            "{n:>4} {:>10.5} {:>12.6} {:>12.6} {:>12.5}",
            nu.overlap_magnitude(),
            c.matrix_element,
            c.closed_form,
            scaled
        );
    }
    let spec = build_lattice(2, 11)?;
    let v = spec.vertex(&[3, 4])?;
    let formula = perturber_state(&spec, &v)?;
    let dense = perturber_state_dense(&spec, &v, 8192)?;
    println!("n = 11: |<formula|dense>|^2 = {:.5}", formula.vector.overlap_sqr(&dense.vector));
    Ok(())
}
