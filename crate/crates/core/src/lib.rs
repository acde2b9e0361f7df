//! Cluster dynamics on braids and boundary-parabolic PSL(2,C) representations.
//!
//! Pipeline: a braid word is closed into a diagram ([`braid`]), a Wirtinger
//! representation is checked or solved for ([`representation`]), a decoration
//! turns it into a solution of the cluster dynamics ([`decoration`],
//! [`cluster`]), which is then extended to a Ptolemy assignment on the
//! octahedral decomposition ([`ptolemy`]) and to shapes and volume
//! ([`geometry`]).

pub mod braid;
pub mod cli;
pub mod cluster;
pub mod decoration;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod linalg;
pub mod ptolemy;
pub mod report;
pub mod representation;

pub use error::{Error, Result};
pub use linalg::{Mat2, Vec2, C};

/// Absolute tolerance for identity checks, scaled by operand magnitude.
pub const TOL: f64 = 1e-9;
/// Threshold below which a denominator counts as zero.
pub const DEGEN_TOL: f64 = 1e-12;
