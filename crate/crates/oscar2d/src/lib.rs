//! Group-sparse matrix recovery with the 2OSCAR regularizer.
//!
//! The crate solves penalized least-squares problems of the form
//! `min_X 0.5 * ||A X - Y||_F^2 + Phi(X)`, where `Phi` combines an
//! entrywise l1 norm with a pairwise l-infinity penalty over all entries
//! of `X`. The penalty promotes estimates that are simultaneously sparse
//! and clustered in magnitude, which suits signals made of constant-valued
//! groups scattered over a matrix grid.
//!
//! Provided building blocks:
//!
//! - dense column-major matrix and vector kernels ([`linalg`]),
//! - the regularizer value and its exact proximity operator ([`prox`]),
//! - four proximal splitting solvers ([`solvers`]),
//! - support-restricted least-squares debiasing ([`debias`]),
//! - recovery metrics ([`metrics`]),
//! - seeded synthetic benchmark generation ([`datagen`]).

pub mod datagen;
pub mod debias;
pub mod linalg;
pub mod metrics;
pub mod prox;
pub mod solvers;

pub use linalg::{DenseMatrix, DenseVector};
pub use prox::OscarParams;
pub use solvers::{Algorithm, Problem, SolverConfig, SolverResult};
