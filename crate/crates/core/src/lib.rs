//! Cyclic groups of automorphisms of the disc, the ball, the Siegel domain and
//! the bidisc: classification, closed-form powers, Poincare-type series,
//! invariant potentials and cluster sets of orbits.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod automorphism;
pub mod domain;
pub mod error;
pub mod job;
pub mod numerics;
pub mod orbit;
pub mod potential;
pub mod render;
pub mod samplers;
pub mod serde_ext;
pub mod series;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
