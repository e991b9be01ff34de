//! Largest angular gaps between base-station bearings, and what they say about
//! positioning geometry on random cellular networks.
//!
//! ```
//! use psimax::geometry::{gdop_toa_matrix, gdop_bound, AngleSet};
//!
//! let a = AngleSet::from_positions(&[[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]).unwrap();
//! let g = gdop_toa_matrix(&a).unwrap();
//! assert!(g <= gdop_bound(a.len(), a.psi_max()));
//! ```
//!
//! The guide in `book/` walks through each module.

pub mod analytic;
pub mod distribution;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod network;
pub mod stats;

pub use distribution::DistributionTable;
pub use error::{Error, Result};
pub use geometry::{AngleSet, GeometryRecord, HullMembership};

// The book's snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/network.md")]
    mod network {}
    #[doc = include_str!("../../../book/src/max_gap.md")]
    mod max_gap {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
