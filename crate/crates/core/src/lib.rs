//! Nearest-neighbor radii of dependent samples.
//!
//! Point-set geometry and exact k-NN queries, dependent sequence generators,
//! radius and entropy estimators, Monte Carlo checks of tail, moment and
//! almost-sure behaviour, experiment drivers, and a windowed k-NN forecaster.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod csvfmt;
pub mod error;
pub mod estimators;
pub mod forecast;
pub mod generators;
pub mod geometry;
pub mod harness;
pub mod kdtree;
pub mod rng;
pub mod special;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
pub use geometry::{Metric, PointSet};
