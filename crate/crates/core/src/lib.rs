//! Sparse nonnegative integer solutions of `Ax = b`.
//!
//! Given a full-row-rank integer matrix `A`, this crate builds certificates
//! with small support for feasible `b`, decides infeasibility through the
//! column lattice, computes exact minimum supports for small systems, and
//! measures how the support bound behaves as `b` grows.

pub mod asymptotics;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod matrix;
pub mod oracle;
pub mod residue;
pub mod solver;

pub use error::{Error, Result};
pub use matrix::IntegerMatrix;
