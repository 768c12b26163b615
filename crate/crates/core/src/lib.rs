//! Connectivity-preserving segmentation of curvilinear structures.
//!
//! The crate bundles four layers:
//!
//! - [`grid`]: 2D/3D containers and the differential, morphological and
//!   distance operators everything else builds on.
//! - [`synthgen`]: paired connected/disconnected binary structures for
//!   training and evaluating reconnecting operators.
//! - [`solver`]: a forward-backward primal-dual segmentation scheme
//!   (two-means data term, total variation, box constraint) into which a
//!   [`reconnect::Reconnector`] is plugged after a fixed number of iterations.
//! - [`metrics`]: volumetric, geometric and topological evaluation.
//!
//! [`cli`] wires these into the `curvseg` command-line tool, and [`io`]
//! handles PNG / NIfTI-1 images and the key-value config files.

pub mod cli;
pub mod error;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod reconnect;
pub mod solver;
pub mod synthgen;

pub use error::{Error, Result};
pub use grid::{BinaryMask, Connectivity, LabelField, ScalarField, Shape, VectorField};
