//! Sparse random-matrix laboratory: seed-indexed ensembles, spectral
//! estimators, sphere-geometry diagnostics, and reproducible Monte-Carlo
//! campaigns.
//!
//! The crate is organized around four subsystems:
//!
//! - [`ensemble`]: deterministic sampling of sparse random-matrix laws
//!   (Bernoulli-masked entry distributions, directed Erdős–Rényi adjacency),
//!   plus structural transforms (folding) and combinatorial row-pattern
//!   counts.
//! - [`spectral`]: extreme singular values, condition numbers, and the
//!   auxiliary norm statistics, with a dense one-sided Jacobi SVD as the
//!   reference path and faster power/inverse iterations on top.
//! - [`geometry`]: non-increasing rearrangements, compressible/dominated
//!   vector classification, least common denominator (LCD) search, and Lévy
//!   concentration estimation.
//! - [`montecarlo`]: declarative trial campaigns with per-trial reproducible
//!   PRNG streams, Wilson confidence intervals, and CSV/JSON artifacts.
//!
//! All sampling is a pure function of `(spec, master_seed, trial_index)`:
//! campaigns produce identical results whether trials run serially or on the
//! rayon pool (the `parallel` feature, on by default).

// `!(x > 0.0)` guards reject NaN as well; index loops mirror the matrix
// algebra they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod ensemble;
pub mod error;
pub mod geometry;
pub mod matrix;
pub mod montecarlo;
pub mod rng;
pub mod spectral;

pub use error::Error;
pub use matrix::Matrix;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;
