//! Exact probabilities, enumeration oracles and Monte Carlo simulation for
//! greatest-increase grid (GIG) digraphs.
//!
//! Label the cells of an `m x n` lattice with a random permutation of
//! `1..=mn` and point every cell at its largest strictly-greater lattice
//! neighbor. The result is the trajectory graph of steepest-ascent hill
//! climbing: a forest whose roots (sinks) are the local maxima. This crate
//! computes closed-form statistics of that forest over exact rationals,
//! checks them against brute-force enumeration, and estimates the same
//! quantities by simulation on grids too large to enumerate.

pub mod cli;
pub mod digraph;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod montecarlo;
pub mod oracle;
pub mod scalar;

pub use digraph::{build_gig, Component, GigDigraph, Labeling, OutEdges};
pub use error::{GigError, Result};
pub use lattice::{Coord, GridDims, KSequence, LatticePath};
pub use scalar::Scalar;

/// Exact reduced fraction used for every probability and moment.
pub type Rational = num_rational::BigRational;

pub type ExactConnectivityBound = exact::ConnectivityBound<Rational>;
pub type ExactSeriesBound = exact::SeriesBoundResult<Rational>;
pub type SimulationStats64 = montecarlo::SimulationStats<f64>;
