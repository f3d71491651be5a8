//! Time-dependent slab Monte Carlo transport with automatic weight windows
//! built from a hybrid low-order second-moment solve.
//!
//! The numerical core is generic over the scalar type through [`Real`]; the
//! aliases at the crate root fix it to `f64`, which is what the Monte Carlo
//! driver uses.

pub mod banded;
pub mod check;
pub mod config;
pub mod driver;
pub mod error;
pub mod filters;
pub mod losm;
pub mod material;
pub mod mesh;
pub mod metrics;
pub mod output;
pub mod popctrl;
pub mod real;
pub mod reference;
pub mod rng;
pub mod tally;
pub mod transport;
pub mod ww;

pub use config::{CombKind, Mode, RunConfig};
pub use driver::{run, RunRecord, Simulation, StepRecord};
pub use error::{Error, Result};
pub use filters::FilterSpec;
pub use losm::ClosureInput;
pub use real::Real;
pub use rng::{spawn_stream, stream_id, RngStream, StreamKind};

pub type Mesh = mesh::Mesh1D<f64>;
pub type Grid = mesh::TimeGrid<f64>;
pub type Material = material::Material<f64>;
pub type GridFunction = mesh::GridFunction<f64>;
pub type LosmState = losm::LosmState<f64>;
