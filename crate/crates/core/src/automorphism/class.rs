use serde::{Deserialize, Serialize};

use crate::domain::{ComplexVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub point: ComplexVector,
    pub interior: bool,
}

/// Eigen data of the coefficient matrix `[[conj p, conj q], [q, p]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum DiscEigen {
    /// `mu = lambda1 / lambda2 > 1`. `rho2` is the eigenvector fixed point of
    /// `lambda1` and attracts forward orbits; `rho1` repels them, so
    /// `gamma^k(0) = rho1 rho2 (mu^k - 1) / (rho1 mu^k - rho2)`.
    Hyperbolic {
        lambda1: f64,
        lambda2: f64,
        mu: f64,
        rho1: C64,
        rho2: C64,
    },
    /// `lambda^{-1} A = T^{-1} [[1, nu], [0, 1]] T` with
    /// `T = [[a, b], [c, d]]`, `ad - bc = 1`.
    Parabolic {
        lambda: f64,
        nu: C64,
        conjugator: [[C64; 2]; 2],
    },
    Elliptic {
        lambda1: C64,
        lambda2: C64,
    },
}

impl DiscEigen {
    /// `c` and `d` of the parabolic conjugator.
    pub fn parabolic_cd(&self) -> Option<(C64, C64)> {
        match self {
            DiscEigen::Parabolic { conjugator, .. } => Some((conjugator[1][0], conjugator[1][1])),
            _ => None,
        }
    }
}

/// Class of an automorphism with its fixed points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutClass {
    pub kind: AutKind,
    pub fixed_points: Vec<FixedPoint>,
    pub disc_eigen: Option<DiscEigen>,
}

impl AutClass {
    pub fn boundary_fixed_points(&self) -> impl Iterator<Item = &ComplexVector> {
        self.fixed_points
            .iter()
            .filter(|f| !f.interior)
            .map(|f| &f.point)
    }

    pub fn interior_fixed_points(&self) -> impl Iterator<Item = &ComplexVector> {
        self.fixed_points
            .iter()
            .filter(|f| f.interior)
            .map(|f| &f.point)
    }
}
