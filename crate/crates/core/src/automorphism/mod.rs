//! Automorphisms of the disc, ball, Siegel domain and bidisc.

pub mod ball;
pub mod bidisc;
pub mod class;
pub mod disc;
pub mod generator;
pub mod siegel;

pub use ball::{phi, BallMoebius};
pub use bidisc::{BidiscAuto, BidiscPowers};
pub use class::{AutClass, AutKind, DiscEigen, FixedPoint};
pub use disc::{DiscMoebius, DiscPowers};
pub use generator::{Generator, PowerPlan, Stepper, Tracked};
pub use siegel::{SiegelAffine, SiegelPowers, Spectral};
