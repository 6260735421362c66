//! Spectral analysis of the walk: Bloch bands, perturber states and the
//! avoided crossing they form with the uniform state.

pub mod bloch;
pub mod crossing;
pub mod perturber;
pub mod sweep;

pub use bloch::{
    band_cosine, band_phase, bloch_eigenphases, bloch_eigenvector, bloch_polarization, branch_deficit,
    flat_band_phases, kappa_labels, reduced_operator, reduced_phases, BlochMode, Branch,
};
pub use crossing::{
    coupling_epsilon, crossing_model, crossing_model_from, effective_hamiltonian, measure_gap,
    model_degenerate_vector, model_eigenvector, phase_distance, Coupling, CrossingModel, GapMeasurement,
    ModelEigenpair,
};
pub use perturber::{perturber_state, perturber_state_dense, PerturberMethod, PerturberState};
pub use sweep::{lambda_sweep, LambdaSweep, SweepRow};
