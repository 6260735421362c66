//! Bloch eigenphases of the unmarked walk, checked against a numerical
//! diagonalization of each momentum block.
use latticewave::spectral::{bloch_eigenphases, branch_deficit, flat_band_phases, kappa_labels, reduced_phases};
use latticewave::*;

fn main() -> Result<()> {
    let spec = build_lattice(2, 7)?;
    let modes = bloch_eigenphases(&spec);
    println!("{} dispersive phases, {} flat, deficit {}", modes.len(), flat_band_phases(&spec).len(), branch_deficit(&spec));
    for kappa in kappa_labels(&spec).take(6) {
        let numeric = reduced_phases(&spec, &kappa)?;
        let closed: Vec<String> = modes
            .iter()
            .filter(|m| m.kappa == kappa)
            .map(|m| format!("{:+.6}", m.phase()))
            .collect();
        let numeric: Vec<String> = numeric.iter().map(|p| format!("{p:+.6}")).collect();
        println!("kappa {kappa:?}: closed form [{}], block [{}]", closed.join(" "), numeric.join(" "));
    }
    Ok(())
}
