//! Deterministic reference solutions.

pub mod benchmark;
pub mod io;
pub mod quadrature;
pub mod sn;

pub use benchmark::{benchmark_reference, project, PulseTreatment, ReferenceSettings, ReferenceSolution};
pub use io::{load_reference, save_reference};
pub use quadrature::{gauss_legendre, Quadrature};
pub use sn::{moments, sn_solve, SnConfig, SnMoments, SnProblem, SnTrajectory};
