//! Coined quantum walks on `d`-dimensional periodic lattices.
//!
//! The walk acts on `2d` direction channels per vertex with the Grover coin
//! and a flip-flop shift. Marking a vertex multiplies the symmetric channel
//! combination there by `e^{iπλ}`; `λ = 1` is the search coin. On top of
//! the stepping engine the crate provides exact Bloch spectra, the localized
//! perturber state of a mark, the avoided-crossing model of search and
//! transfer, and time-domain protocols with JSON scenarios and CSV output.
//!
//! ```
//! use latticewave::{build_lattice, MarkedSet, WaveState, Walker};
//!
//! let spec = build_lattice(2, 11)?;
//! let target = spec.vertex(&[5, 5])?;
//! let marks = MarkedSet::single(&spec, target.clone(), 1.0)?;
//! let mut state = WaveState::uniform(&spec);
//! Walker::new(spec).run(&mut state, &marks, 10)?;
//! assert!(state.vertex_probability(&spec, &target) > 1.0 / 121.0);
//! # Ok::<(), latticewave::Error>(())
//! ```

pub mod cli;
pub mod dense;
pub mod error;
pub mod io;
pub mod lattice;
pub mod marks;
pub mod protocols;
pub mod selftest;
pub mod spectral;
pub mod state;
pub mod walk;

pub use error::{Error, Result};
pub use lattice::{build_lattice, ChannelIndex, LatticeSpec, Sign, VertexIndex};
pub use marks::{Mark, MarkedSet};
pub use state::{vertex_probabilities, NormPolicy, WaveState};
pub use walk::{coin_matrix, step_perturbed, step_unperturbed, Walker};

pub use num_complex::Complex64;
