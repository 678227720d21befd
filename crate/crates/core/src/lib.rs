//! Exact decision and Monte Carlo estimation of stably unactivated neurons in
//! the second hidden layer of fully-connected ReLU networks.
//!
//! The crate is layered bottom-up:
//!
//! * [`linear`]: dense solves and a two-phase simplex, generic over the scalar.
//! * [`arrangement`]: cooriented hyperplane arrangements, region enumeration and
//!   the closed-form region and facet counts.
//! * [`intercept`]: intercept tuples and the `{P, S_1, ..., S_n}` partition of
//!   hyperplanes with prescribed intercept signs.
//! * [`network`]: parameters, seeded sampling, layer maps and the configuration
//!   index of the first-layer arrangement.
//! * [`stability`]: the exact per-region LP decision, a fast vertex-based exact
//!   decision, the all-negative test and a sampling detector.
//! * [`experiments`]: estimators, the configuration decomposition, sweeps and
//!   report writers.
//!
//! Indexing conventions: layers are numbered from 1 (layer 1 is the first hidden
//! layer), while neurons within a layer, hyperplanes and coordinates are
//! 0-based.

pub mod arrangement;
pub mod experiments;
pub mod intercept;
pub mod linear;
pub mod network;
pub mod rng;
pub mod stability;
