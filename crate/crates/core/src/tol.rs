//! Numerical thresholds shared across modules.
//!
//! Values that appear in several places live here so that the checks in the
//! library and the ones in the test suites stay in step.

/// Unitarity check `max |U U* - I|` at construction.
pub const UNITARY: f64 = 1e-12;

/// Unitarity tolerated during normal-form recovery before re-orthonormalising.
pub const NORMAL_FORM_RECOVERY: f64 = 1e-9;

/// Normalisation check `| |p|^2 - |q|^2 - 1 |` for disc automorphisms,
/// relative to `max(1, |p|^2)`.
pub const DISC_NORMALISATION: f64 = 1e-12;

/// Band around `(p + conj p)^2 = 4` treated as parabolic.
pub const PARABOLIC_BAND: f64 = 1e-10;

/// Eigenvalues of `U'` within this distance of 1 belong to the fixed block.
pub const EIGENVALUE_ONE: f64 = 1e-10;

/// Slack allowed when a point is expected on the closure of a domain.
pub const CLOSURE: f64 = 1e-12;

/// Boundary defect accepted for [`crate::domain::BoundaryPoint`].
pub const BOUNDARY_POINT: f64 = 1e-9;

/// Residual for an interior fixed point in the ball classifier.
pub const FIXED_POINT_RESIDUAL: f64 = 1e-10;

/// Interior fixed points must satisfy `|z| <= 1 - INTERIOR_MARGIN`.
pub const INTERIOR_MARGIN: f64 = 1e-8;

/// Deduplication tolerance for boundary fixed points and their residual.
pub const BOUNDARY_FIXED_POINT: f64 = 1e-6;

/// Half-width of the inconclusive band in the tail-slope test.
pub const TAIL_BAND: f64 = 0.15;

/// Largest consecutive-term ratio accepted as geometric decay.
pub const GEOMETRIC_RATIO: f64 = 0.99;

/// Minimum number of tail terms needed for a numeric verdict.
pub const MIN_TAIL_TERMS: usize = 8;

/// Default symmetric truncation for series.
pub const DEFAULT_SERIES_K: usize = 2000;

/// Default truncation for orbit and cluster computations.
pub const DEFAULT_ORBIT_K: usize = 5000;

/// Default cluster deduplication tolerance.
pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Default boundary band: samples with defect below this are projected.
pub const DEFAULT_DELTA: f64 = 1e-6;

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;
