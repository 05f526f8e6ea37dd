//! Feedback-based quantum optimization for MaxCut on a dense statevector
//! simulator.
//!
//! The control coefficient of each circuit layer is set from a measurement
//! of the previous layer's state, `beta_{k+1} = -<i[H_d, H_p]>_k`, which makes
//! `<H_p>` nonincreasing in depth whenever the time step is small enough.
//!
//! Modules, bottom up: [`graphs`] (instances, exact oracle, generation),
//! [`hamiltonians`], [`simulator`], [`falqon`] (the feedback loop and its
//! variants) and [`experiments`] (corpus studies).

pub mod error;
pub mod experiments;
pub mod falqon;
pub mod graphs;
pub mod hamiltonians;
pub mod simulator;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use falqon::{FeedbackRun, Instance, RunConfig};
pub use graphs::{Graph, GroundStateSet};
pub use hamiltonians::{CommutatorObservable, ProblemHamiltonian};
pub use simulator::StateVector;
