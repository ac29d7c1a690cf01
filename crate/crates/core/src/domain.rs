//! Points of `C^n`, unitary matrices, the supported domains and the Cayley
//! transforms between the bounded and unbounded models.
//!
//! Conventions:
//!
//! * `<z, w> = sum z_j conj(w_j)` (linear in the first slot).
//! * The bounded models are the unit disc, the unit ball, the bidisc and the
//!   weighted ball `|z1|^2 + psi(z') < 1`. The unbounded models are the Siegel
//!   domain `Im z1 > |z'|^2` and its weighted analogue `Im z1 > psi(z')`.
//! * `psi(z') = sum_{j>=2} |z_j|^(2 m_j)` with `m_j = tau_1 / (2 tau_j)`, the
//!   only family for which the weighted Cayley map is shipped.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{one_minus_sum_of_squares, CompensatedSum};
use crate::tol;

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

/// A point of `C^n` with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexVector(DVector<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter(
                "vector must have dimension >= 1".into(),
            ));
        }
        if entries
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "vector entries must be finite".into(),
            ));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    /// Builds a vector without the finiteness check. Used on hot paths whose
    /// inputs were already validated.
    pub(crate) fn from_dvector(v: DVector<C64>) -> Self {
        Self(v)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::from_element(n, ZERO))
    }

    pub fn basis(n: usize, j: usize) -> Self {
        let mut v = DVector::from_element(n, ZERO);
        v[j] = ONE;
        Self(v)
    }

    pub fn from_slice(entries: &[C64]) -> Result<Self> {
        Self::new(entries.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn get(&self, j: usize) -> C64 {
        self.0[j]
    }

    pub fn as_dvector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn into_dvector(self) -> DVector<C64> {
        self.0
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    /// `z' = (z_2, .., z_n)`; empty when `n = 1`.
    pub fn tail(&self) -> Vec<C64> {
        self.0.iter().skip(1).copied().collect()
    }

    /// Reassembles `(first, tail)`.
    pub fn from_parts(first: C64, tail: &[C64]) -> Self {
        let mut v = Vec::with_capacity(tail.len() + 1);
        v.push(first);
        v.extend_from_slice(tail);
        Self(DVector::from_vec(v))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Euclidean distance.
    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl Serialize for ComplexVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.0.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        ComplexVector::new(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// `<z, w> = sum z_j conj(w_j)`.
pub fn hermitian_inner(z: &ComplexVector, w: &ComplexVector) -> Result<C64> {
    if z.dim() != w.dim() {
        return Err(Error::Dimension {
            expected: z.dim(),
            got: w.dim(),
        });
    }
    Ok(inner_unchecked(z, w))
}

#[inline]
pub(crate) fn inner_unchecked(z: &ComplexVector, w: &ComplexVector) -> C64 {
    z.0.iter().zip(w.0.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// `1 - |z|^2`, with each square split exactly and the sum compensated.
pub fn one_minus_sq_norm(z: &ComplexVector) -> f64 {
    one_minus_sum_of_squares(z.0.iter().flat_map(|c| [c.re, c.im]))
}

/// Unitary `n x n` matrix.
#[derive(Clone, PartialEq)]
pub struct UnitaryMatrix(DMatrix<C64>);

impl UnitaryMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidParameter(
                "unitary matrix must be square and non-empty".into(),
            ));
        }
        let dev = unitarity_defect(&m);
        if !(dev <= tol::UNITARY) {
            return Err(Error::InvalidParameter(format!(
                "matrix is not unitary (defect {dev:e})"
            )));
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    /// Diagonal unitary `diag(e^{i theta_j})`.
    pub fn diagonal_phases(thetas: &[f64]) -> Self {
        let n = thetas.len();
        let mut m = DMatrix::from_element(n, n, ZERO);
        for (j, t) in thetas.iter().enumerate() {
            m[(j, j)] = C64::from_polar(1.0, *t);
        }
        Self(m)
    }

    /// Nearest unitary matrix in the polar sense, accepted only when the input
    /// is already within `tolerance` of unitary.
    pub fn reunitarize(m: DMatrix<C64>, tolerance: f64) -> Result<Self> {
        let dev = unitarity_defect(&m);
        if !(dev <= tolerance) {
            return Err(Error::NormalForm(dev));
        }
        let svd = m.svd(true, true);
        let (u, vt) = match (svd.u, svd.v_t) {
            (Some(u), Some(vt)) => (u, vt),
            _ => return Err(Error::NormalForm(dev)),
        };
        Ok(Self(u * vt))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    /// Column convention: `U z`.
    pub fn apply(&self, z: &ComplexVector) -> ComplexVector {
        ComplexVector(&self.0 * &z.0)
    }

    /// Row convention: `z U`, as in the Siegel-domain formulas.
    pub fn apply_row(&self, z: &[C64]) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).map(|i| z[i] * self.0[(i, j)]).sum())
            .collect()
    }

    pub fn is_identity(&self, tolerance: f64) -> bool {
        let n = self.dim();
        (&self.0 - DMatrix::<C64>::identity(n, n))
            .iter()
            .all(|c| c.norm() <= tolerance)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for UnitaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<C64>> = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect();
        f.debug_tuple("UnitaryMatrix").field(&rows).finish()
    }
}

impl Serialize for UnitaryMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| [self.0[(i, j)].re, self.0[(i, j)].im])
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitaryMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("unitary matrix must be square"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1]));
        UnitaryMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// `max |M M* - I|`.
pub fn unitarity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let g = m * m.adjoint() - DMatrix::<C64>::identity(n, n);
    g.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Weights `tau_1, .., tau_n` of a weighted homogeneous `psi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    tau: Vec<u32>,
}

impl Weights {
    pub fn new(tau: Vec<u32>) -> Result<Self> {
        if tau.len() < 2 {
            return Err(Error::InvalidParameter(
                "weights need n >= 2 entries".into(),
            ));
        }
        if tau.contains(&0) {
            return Err(Error::InvalidParameter(
                "weights must be positive integers".into(),
            ));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> &[u32] {
        &self.tau
    }

    pub fn dim(&self) -> usize {
        self.tau.len()
    }

    /// Exponent `2 tau_j / tau_1` of the weighted Cayley map, `j >= 2`.
    pub fn cayley_exponent(&self, j: usize) -> f64 {
        2.0 * self.tau[j] as f64 / self.tau[0] as f64
    }

    /// `m_j` in `psi = sum |z_j|^(2 m_j)`, `j >= 2`.
    pub fn psi_exponent(&self, j: usize) -> f64 {
        self.tau[0] as f64 / (2.0 * self.tau[j] as f64)
    }

    /// `psi(z')` for `z' = tail` (entries `z_2..z_n`).
    pub fn psi(&self, tail: &[C64]) -> f64 {
        tail.iter()
            .enumerate()
            .map(|(i, c)| c.norm_sqr().powf(self.psi_exponent(i + 1)))
            .sum()
    }
}

/// The domains handled by the library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainTag {
    Disc,
    Ball {
        n: usize,
    },
    Bidisc,
    Siegel {
        n: usize,
    },
    /// Unbounded `Im z1 > psi(z')`.
    WeightedSiegel {
        weights: Weights,
    },
    /// Bounded `|z1|^2 + psi(z') < 1`.
    WeightedBall {
        weights: Weights,
    },
}

impl DomainTag {
    pub fn dim(&self) -> usize {
        match self {
            DomainTag::Disc => 1,
            DomainTag::Ball { n } | DomainTag::Siegel { n } => *n,
            DomainTag::Bidisc => 2,
            DomainTag::WeightedSiegel { weights } | DomainTag::WeightedBall { weights } => {
                weights.dim()
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(
            self,
            DomainTag::Siegel { .. } | DomainTag::WeightedSiegel { .. }
        )
    }

    /// Ball-type domains: the disc and the unit ball.
    pub fn is_ball_like(&self) -> bool {
        matches!(self, DomainTag::Disc | DomainTag::Ball { .. })
    }

    /// Upper bound on the Euclidean diameter of a bounded domain.
    pub fn diameter_bound(&self) -> f64 {
        match self {
            DomainTag::Disc | DomainTag::Ball { .. } | DomainTag::WeightedBall { .. } => 2.0,
            DomainTag::Bidisc => 2.0 * std::f64::consts::SQRT_2,
            _ => f64::INFINITY,
        }
    }

    fn check_dim(&self, z: &ComplexVector) -> Result<()> {
        match self {
            DomainTag::Ball { n } | DomainTag::Siegel { n } if *n == 0 => {
                return Err(Error::InvalidParameter("dimension must be >= 1".into()))
            }
            _ => {}
        }
        if z.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: z.dim(),
            });
        }
        Ok(())
    }
}

/// Positive inside the domain, zero on the boundary. For the disc and ball this
/// is `1 - |z|^2`; for the bidisc the smaller coordinate defect; for the
/// Siegel models `Im z1 - psi(z')`; for the weighted ball `1 - |z1|^2 - psi(z')`.
pub fn boundary_defect(d: &DomainTag, z: &ComplexVector) -> Result<f64> {
    d.check_dim(z)?;
    Ok(defect_unchecked(d, z))
}

pub(crate) fn defect_unchecked(d: &DomainTag, z: &ComplexVector) -> f64 {
    match d {
        DomainTag::Disc | DomainTag::Ball { .. } => one_minus_sq_norm(z),
        DomainTag::Bidisc => z
            .entries()
            .iter()
            .map(|c| one_minus_sum_of_squares([c.re, c.im]))
            .fold(f64::INFINITY, f64::min),
        DomainTag::Siegel { .. } => {
            let mut acc = CompensatedSum::new();
            acc.add(z.get(0).im);
            for c in z.entries().iter().skip(1) {
                acc.add(-c.norm_sqr());
            }
            acc.value()
        }
        DomainTag::WeightedSiegel { weights } => z.get(0).im - weights.psi(&z.tail()),
        DomainTag::WeightedBall { weights } => {
            let z1 = z.get(0);
            let mut acc = CompensatedSum::new();
            acc.add(one_minus_sum_of_squares([z1.re, z1.im]));
            acc.add(-weights.psi(&z.tail()));
            acc.value()
        }
    }
}

pub fn contains(d: &DomainTag, z: &ComplexVector) -> bool {
    boundary_defect(d, z).map(|v| v > 0.0).unwrap_or(false)
}

/// Boundary distance: Euclidean for the disc, ball and bidisc; the defect
/// `Im z1 - psi(z')` for the Siegel models (not a Euclidean distance) and
/// `1 - |z1|^2 - psi(z')` for the weighted ball.
pub fn boundary_distance(d: &DomainTag, z: &ComplexVector) -> Result<f64> {
    let defect = boundary_defect(d, z)?;
    if defect < -tol::CLOSURE {
        return Err(Error::OutsideDomain(format!("{z:?} (defect {defect:e})")));
    }
    Ok(match d {
        DomainTag::Disc | DomainTag::Ball { .. } => crate::numerics::radial_gap_from_defect(defect),
        DomainTag::Bidisc => z
            .entries()
            .iter()
            .map(|c| {
                crate::numerics::radial_gap_from_defect(one_minus_sum_of_squares([c.re, c.im]))
            })
            .fold(f64::INFINITY, f64::min),
        _ => defect,
    })
}

/// Projects a point near the boundary onto it. Disc and ball: radially.
/// Bidisc: every coordinate whose defect is below `band`. Weighted ball: along
/// the curve `(s z1, s^(1/m_j) z_j)`. Siegel models: `Im z1` set to `psi(z')`.
pub fn project_to_boundary(d: &DomainTag, z: &ComplexVector, band: f64) -> ComplexVector {
    match d {
        DomainTag::Disc | DomainTag::Ball { .. } => {
            let r = z.norm();
            if r == 0.0 {
                z.clone()
            } else {
                z.scale(C64::new(1.0 / r, 0.0))
            }
        }
        DomainTag::Bidisc => ComplexVector(z.0.map(|c| {
            let dd = one_minus_sum_of_squares([c.re, c.im]);
            if dd < band && c.norm() > 0.0 {
                c / c.norm()
            } else {
                c
            }
        })),
        DomainTag::WeightedBall { weights } => {
            let tail = z.tail();
            let total = z.get(0).norm_sqr() + weights.psi(&tail);
            if total == 0.0 {
                return z.clone();
            }
            let s = 1.0 / total.sqrt();
            let new_tail: Vec<C64> = tail
                .iter()
                .enumerate()
                .map(|(i, c)| c * s.powf(1.0 / weights.psi_exponent(i + 1)))
                .collect();
            ComplexVector::from_parts(z.get(0) * s, &new_tail)
        }
        DomainTag::Siegel { .. } => {
            let psi: f64 = z.tail().iter().map(|c| c.norm_sqr()).sum();
            ComplexVector::from_parts(C64::new(z.get(0).re, psi), &z.tail())
        }
        DomainTag::WeightedSiegel { weights } => {
            let psi = weights.psi(&z.tail());
            ComplexVector::from_parts(C64::new(z.get(0).re, psi), &z.tail())
        }
    }
}

/// A point on the boundary of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub point: ComplexVector,
    pub domain: DomainTag,
}

impl BoundaryPoint {
    pub fn new(point: ComplexVector, domain: DomainTag) -> Result<Self> {
        let defect = boundary_defect(&domain, &point)?;
        if defect.abs() > tol::BOUNDARY_POINT {
            return Err(Error::InvalidParameter(format!(
                "point is not on the boundary (defect {defect:e})"
            )));
        }
        Ok(Self { point, domain })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

/// Cayley transform between the unit ball of `C^n` and the Siegel domain
/// `Im z1 > |z'|^2`:
/// `Forward: z -> (i (1 + z1) / (1 - z1), i z' / (1 - z1))`,
/// `Inverse: w -> ((w1 - i) / (w1 + i), 2 w' / (w1 + i))`.
pub fn cayley(n: usize, direction: Direction, z: &ComplexVector) -> Result<ComplexVector> {
    if z.dim() != n || n == 0 {
        return Err(Error::Dimension {
            expected: n,
            got: z.dim(),
        });
    }
    match direction {
        Direction::Forward => {
            let defect = one_minus_sq_norm(z);
            if defect < -tol::CLOSURE {
                return Err(Error::OutsideDomain(format!("{z:?} is outside the ball")));
            }
            let den = ONE - z.get(0);
            if den == ZERO {
                return Err(Error::SingularInput("Cayley pole z1 = 1".into()));
            }
            let w = cayley_forward_unchecked(z);
            let image_defect = defect_unchecked(&DomainTag::Siegel { n }, &w);
            // The Siegel defect equals (1 - |z|^2) / |1 - z1|^2.
            let scale = 1.0 / den.norm_sqr();
            if image_defect < -tol::CLOSURE * scale.max(1.0) {
                return Err(Error::NumericalDomain(format!(
                    "Siegel defect {image_defect:e}"
                )));
            }
            Ok(w)
        }
        Direction::Inverse => {
            let den = z.get(0) + I;
            if den == ZERO {
                return Err(Error::SingularInput("Cayley pole w1 = -i".into()));
            }
            let defect = defect_unchecked(&DomainTag::Siegel { n }, z);
            if defect < -tol::CLOSURE * z.norm_sq().max(1.0) {
                return Err(Error::OutsideDomain(format!(
                    "{z:?} is outside the Siegel domain"
                )));
            }
            let b = cayley_inverse_unchecked(z);
            if one_minus_sq_norm(&b) < -tol::CLOSURE {
                return Err(Error::NumericalDomain(format!(
                    "ball defect {:e}",
                    one_minus_sq_norm(&b)
                )));
            }
            Ok(b)
        }
    }
}

#[inline]
pub(crate) fn cayley_forward_unchecked(z: &ComplexVector) -> ComplexVector {
    let den = ONE - z.get(0);
    let first = I * (ONE + z.get(0)) / den;
    let f = I / den;
    let tail: Vec<C64> = z.entries().iter().skip(1).map(|c| c * f).collect();
    ComplexVector::from_parts(first, &tail)
}

#[inline]
pub(crate) fn cayley_inverse_unchecked(w: &ComplexVector) -> ComplexVector {
    let den = w.get(0) + I;
    let first = (w.get(0) - I) / den;
    let f = C64::new(2.0, 0.0) / den;
    let tail: Vec<C64> = w.entries().iter().skip(1).map(|c| c * f).collect();
    ComplexVector::from_parts(first, &tail)
}

/// Ball defect of `cayley^{-1}(w)` computed from the Siegel defect without
/// cancellation: `1 - |Phi^{-1}(w)|^2 = 4 (Im w1 - |w'|^2) / |w1 + i|^2`.
pub fn ball_defect_from_siegel(w: &ComplexVector) -> f64 {
    let d = defect_unchecked(&DomainTag::Siegel { n: w.dim() }, w);
    4.0 * d / (w.get(0) + I).norm_sqr()
}

/// Principal power with argument in `(-pi, pi]`; exact for integral exponents.
pub fn principal_pow(base: C64, e: f64) -> C64 {
    if e.fract() == 0.0 && e.abs() < 64.0 {
        base.powi(e as i32)
    } else if base == ZERO {
        if e > 0.0 {
            ZERO
        } else {
            C64::new(f64::INFINITY, 0.0)
        }
    } else {
        let r = base.norm().powf(e);
        let theta = base.im.atan2(base.re);
        C64::from_polar(r, e * theta)
    }
}

fn on_negative_axis(c: C64) -> bool {
    c.im == 0.0 && c.re <= 0.0
}

/// Weighted Cayley transform between `|z1|^2 + psi(z') < 1` and
/// `Im w1 > psi(w')`:
/// `Forward: z -> (i (1 + z1) / (1 - z1), i z_j / (1 - z1)^(2 tau_j / tau_1))`,
/// `Inverse: w -> ((w1 - i)/(w1 + i), 2^e i^(e-1) w_j / (w1 + i)^e)`, `e = 2 tau_j / tau_1`,
/// all fractional powers on the principal branch.
pub fn weighted_cayley(
    weights: &Weights,
    direction: Direction,
    z: &ComplexVector,
) -> Result<ComplexVector> {
    let n = weights.dim();
    if z.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: z.dim(),
        });
    }
    match direction {
        Direction::Forward => {
            let base = ONE - z.get(0);
            if base == ZERO {
                return Err(Error::SingularInput("weighted Cayley pole z1 = 1".into()));
            }
            if on_negative_axis(base) {
                return Err(Error::BranchCut(format!(
                    "1 - z1 = {base} lies on the negative real axis"
                )));
            }
            let bounded = DomainTag::WeightedBall {
                weights: weights.clone(),
            };
            let defect = defect_unchecked(&bounded, z);
            if defect < -tol::CLOSURE {
                return Err(Error::OutsideDomain(format!("{z:?} (defect {defect:e})")));
            }
            Ok(weighted_forward_unchecked(weights, z))
        }
        Direction::Inverse => {
            let base = z.get(0) + I;
            if base == ZERO {
                return Err(Error::SingularInput("weighted Cayley pole w1 = -i".into()));
            }
            if on_negative_axis(base) {
                return Err(Error::BranchCut(format!(
                    "w1 + i = {base} lies on the negative real axis"
                )));
            }
            let unbounded = DomainTag::WeightedSiegel {
                weights: weights.clone(),
            };
            let defect = defect_unchecked(&unbounded, z);
            if defect < -tol::CLOSURE * z.norm_sq().max(1.0) {
                return Err(Error::OutsideDomain(format!("{z:?} (defect {defect:e})")));
            }
            Ok(weighted_inverse_unchecked(weights, z))
        }
    }
}

pub(crate) fn weighted_forward_unchecked(weights: &Weights, z: &ComplexVector) -> ComplexVector {
    let base = ONE - z.get(0);
    let first = I * (ONE + z.get(0)) / base;
    let tail: Vec<C64> = z
        .entries()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| I * c / principal_pow(base, weights.cayley_exponent(j)))
        .collect();
    ComplexVector::from_parts(first, &tail)
}

pub(crate) fn weighted_inverse_unchecked(weights: &Weights, w: &ComplexVector) -> ComplexVector {
    let base = w.get(0) + I;
    let first = (w.get(0) - I) / base;
    let tail: Vec<C64> = w
        .entries()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| {
            let e = weights.cayley_exponent(j);
            let factor = C64::new(2f64.powf(e), 0.0) * principal_pow(I, e - 1.0);
            factor * c / principal_pow(base, e)
        })
        .collect();
    ComplexVector::from_parts(first, &tail)
}
