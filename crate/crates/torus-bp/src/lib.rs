//! Bootstrap-percolation-style dynamics on the d-dimensional torus.
//!
//! The crate covers the whole pipeline at desk scale:
//!
//! * [`lattice`]: torus geometry: coordinates, neighbors, distances,
//!   hyper-rectangles, hyper-squares and their even/odd parts, the tiling.
//! * [`dynamics`]: the `(r, r')` threshold family (bootstrap, two-way,
//!   recovery), modified bootstrap, and majority; synchronous stepping
//!   with a bit-parallel kernel checked against a naive reference; cycle
//!   detection with period and consensus time.
//! * [`structures`]: robust/eternal set certificates, exhaustive minimal
//!   eternal-set and extinction-time searches, the rectangle-merging
//!   clustering certificate, and constructive white-robust witness
//!   families.
//! * [`scaling`]: the tiling viewed as a coarse lattice: inner/outer
//!   square adjacency, occupation, and constant-rounds occupation
//!   experiments.
//! * [`experiments`]: reproducible Monte Carlo: seeded sweeps, coupled
//!   threshold bisection, and finite-size scaling fits.
//! * [`io`]: the sparse/dense JSON configuration formats.
//!
//! With the default `parallel` feature, trials and exhaustive searches fan
//! out over rayon; disabling it gives a sequential build with bit-identical
//! results.

pub mod bits;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod lattice;
pub mod rng;
pub mod scaling;
pub mod structures;
pub mod util;

pub use error::{Error, Result};
pub use lattice::{Configuration, Coord, Phase, TorusShape};
