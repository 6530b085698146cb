//! Spectral geometry toolkit: pointwise Weyl counting functions on model
//! geometries and graphs, their heat and wave transforms, and solvers that
//! recover a point up to isometry from its spectral signature.

// NaN-rejecting `!(x > 0.0)` guards and index loops over dense matrices are
// deliberate throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bessel;
pub mod counting;
pub mod error;
pub mod graphs;
pub mod inversion;
pub mod io;
pub mod models;
pub mod optim;
pub mod transforms;

pub use counting::{CountingFunction, Jump, Timbre};
pub use error::{Error, Result};
pub use graphs::{Graph, GraphSpectrum, Operator};
pub use inversion::{LocationReport, LocationStatus};
pub use models::{Aspect, EigenspaceBlock, ModelGeometry, Orbit, Point};
