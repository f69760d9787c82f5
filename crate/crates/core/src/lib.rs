//! Critical first-passage percolation on the triangular lattice.
//!
//! Sites carry independent Bernoulli(1/2) times: `0` for open, `1` for
//! closed. The crate samples reproducible configurations, computes passage
//! times and geodesics, traces percolation loops, counts disjoint closed
//! circuits, and runs Monte Carlo sweeps over scale schedules.

pub mod circuits;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fpp;
pub mod lattice;
pub mod loops;
pub mod tiles;
pub mod uf;

pub use config::{Configuration, Provenance};
pub use error::{Error, Result};
pub use fpp::{geodesic_of, PassageResult};
pub use lattice::{Radius, Region, SiteCoord};
