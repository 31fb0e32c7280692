//! Frugal truthful mechanisms for set-system auctions.
//!
//! The crate implements the pruning-lifting scheme (prune to a monopoly-free
//! subsystem, lift bids by the Perron vector of the dependency graph, select
//! the cheapest feasible set under scaled bids, pay threshold bids) together
//! with its k-path, vertex-cover, r-out-of-k and single-path instantiations,
//! the VCG baseline, and exact small-instance oracles for the equilibrium
//! payment benchmarks used to measure frugality.

pub mod benchmarks;
pub mod dependency;
pub mod error;
pub mod flows;
pub mod graph;
pub mod lp;
pub mod mechanisms;
pub mod spectral;
pub mod system;

pub use error::{Error, Result};
pub use graph::{DiGraph, EdgeId, UGraph, VertexId};
pub use system::{AgentId, SetSystem, Subsystem, SystemKind, DEFAULT_ENUMERATION_CAP};

/// Absolute tolerance for comparing costs and bids.
pub const EPS: f64 = 1e-9;
