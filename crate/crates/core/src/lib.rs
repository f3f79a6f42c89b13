//! Grid-based macro placement.
//!
//! The pipeline parses a netlist, groups standard cells into square soft
//! clusters, spreads the clusters with force-directed placement, and places
//! hard macros on grid-cell centers with simulated annealing against a proxy
//! cost of wirelength, density and congestion.

pub mod cluster;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod netlist;
pub mod placement;
pub mod proxy;
pub mod sa;
pub mod study;

pub use cluster::{apply_vacuous_placement, cluster_by_grid, ClusteredNetlist, VacuousMode};
pub use error::{Error, Result};
pub use fd::{fd_place, fd_repulsive_only, FdParams, FdStart};
pub use grid::{build_grid, is_legal_macro_location, Grid};
pub use netlist::{Canvas, Net, Netlist, NetlistBuilder, Node, NodeKind, Pin, PinSpec};
pub use placement::{transform_pin_offset, Location, Orientation, Placement};
pub use proxy::{proxy_cost, ProxyBreakdown, ProxyConfig, ProxyWeights};
pub use sa::{anneal, run_parallel, shuffle_same_size, SaConfig, SaResult};
pub use study::{kendall_tau, stability_study, weight_sweep, RunManifest, StabilityReport};
