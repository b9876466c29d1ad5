//! Partitioning class-count vectors into groups of minimum total weighted
//! Gini impurity, and the machinery that connects that problem to weighted
//! Euclidean k-means.
//!
//! The library is organised around one pipeline:
//!
//! 1. [`impurity`] defines [`CountVector`], the two impurity measures
//!    (Gini and entropy), and the two partition objectives — the raw
//!    impurity cost of a grouping and its gap above the per-vector
//!    baseline.
//! 2. [`reduction`] maps count vectors to weighted points on the
//!    probability simplex and exposes the identities that make the gap
//!    objective equal to a weighted k-means cost.
//! 3. [`solvers`] provides three interchangeable solvers: exhaustive
//!    search over set partitions ([`solvers::brute`]), seeded Lloyd
//!    iteration with weighted D² initialisation ([`solvers::lloyd`]), and
//!    a sampling-based approximation scheme with a tunable accuracy knob
//!    ([`solvers::ptas`]).
//! 4. [`hardness`] builds worst-case instances from triangle-free graphs
//!    and cross-checks the vertex-cover bound that makes them hard.
//! 5. [`corpus`] generates seeded random instances for tests and benches.
//!
//! All randomised code takes explicit 64-bit seeds and uses a fixed
//! counter-based stream (ChaCha8), so every result in this crate is
//! reproducible bit-for-bit across runs and thread counts.

pub mod corpus;
pub mod error;
pub mod hardness;
pub mod impurity;
pub mod reduction;
pub mod solvers;

mod enumerate;

pub use error::{Error, Result};
pub use impurity::{CountVector, GiniInstance, Partition};
pub use reduction::{KMeansInstance, WeightedPoint};
pub use solvers::SolveResult;
