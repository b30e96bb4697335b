//! Core algorithms for soft random geometric graphs (the random connection
//! model on the unit box `[0,1]^d`).
//!
//! Everything in this crate is `no_std` + `alloc`: connection functions and
//! their shape descriptors, point samplers, the soft-graph sampler with the
//! coupled increasing-radius edge process, component statistics, boundary
//! aware quadrature for the expected number of isolated vertices, and the
//! regime equations for critical radii. IO, file formats, the parallel
//! experiment harness and the CLI live in the `softrgg` crate.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod connection;
mod error;
pub mod points;
pub mod quadrature;
pub mod regimes;
pub mod rng;
pub mod softgraph;
pub mod stats;
mod unionfind;

pub use analysis::{component_summary, small_component_counts, thresholds, ComponentSummary, ThresholdPair};
pub use connection::{ConnectionFunction, ConnectionKind, ShapeDescriptor};
pub use error::Error;
pub use points::{PointOrigin, PointSet};
pub use rng::SeedSpec;
pub use softgraph::{CoupledEdgeProcess, SamplerMode, SoftGraph};
pub use unionfind::UnionFind;


pub type Result<T> = core::result::Result<T, Error>;
