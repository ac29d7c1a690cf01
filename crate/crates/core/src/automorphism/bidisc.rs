//! Automorphisms of the bidisc: `(gamma1(z1), gamma2(z2))` or, with the swap,
//! `(gamma2(z2), gamma1(z1))`.

use serde::{Deserialize, Serialize};

use crate::automorphism::disc::{DiscMoebius, DiscPowers};
use crate::domain::{ComplexVector, C64};
use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BidiscAuto {
    pub gamma1: DiscMoebius,
    pub gamma2: DiscMoebius,
    pub swap: bool,
}

impl BidiscAuto {
    pub fn new(gamma1: DiscMoebius, gamma2: DiscMoebius, swap: bool) -> Self {
        Self {
            gamma1,
            gamma2,
            swap,
        }
    }

    pub fn identity() -> Self {
        Self::new(DiscMoebius::identity(), DiscMoebius::identity(), false)
    }

    pub fn apply(&self, z: &ComplexVector) -> Result<ComplexVector> {
        if z.dim() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                got: z.dim(),
            });
        }
        if z.entries()
            .iter()
            .any(|c| c.norm_sqr() > 1.0 + tol::CLOSURE)
        {
            return Err(Error::OutsideDomain(format!(
                "{z:?} is outside the closed bidisc"
            )));
        }
        Ok(self.apply_unchecked(z))
    }

    pub fn apply_unchecked(&self, z: &ComplexVector) -> ComplexVector {
        let (w1, w2) = self.apply_pair(z.get(0), z.get(1));
        ComplexVector::from_parts(w1, &[w2])
    }

    #[inline]
    pub fn apply_pair(&self, z1: C64, z2: C64) -> (C64, C64) {
        if self.swap {
            (
                self.gamma2.apply_unchecked(z2),
                self.gamma1.apply_unchecked(z1),
            )
        } else {
            (
                self.gamma1.apply_unchecked(z1),
                self.gamma2.apply_unchecked(z2),
            )
        }
    }

    /// Image with the coordinate defects `1 - |w_j|^2` updated from those of `z`.
    pub fn apply_with_defects(&self, z: (C64, C64), d: (f64, f64)) -> ((C64, C64), (f64, f64)) {
        if self.swap {
            let (w1, e1) = self.gamma2.apply_with_defect(z.1, d.1);
            let (w2, e2) = self.gamma1.apply_with_defect(z.0, d.0);
            ((w1, w2), (e1, e2))
        } else {
            let (w1, e1) = self.gamma1.apply_with_defect(z.0, d.0);
            let (w2, e2) = self.gamma2.apply_with_defect(z.1, d.1);
            ((w1, w2), (e1, e2))
        }
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &BidiscAuto) -> BidiscAuto {
        let (f_outer, g_outer) = (self.gamma1, self.gamma2);
        let (f_inner, g_inner) = (inner.gamma1, inner.gamma2);
        match (self.swap, inner.swap) {
            (false, false) => {
                Self::new(f_outer.compose(&f_inner), g_outer.compose(&g_inner), false)
            }
            (false, true) => Self::new(g_outer.compose(&f_inner), f_outer.compose(&g_inner), true),
            (true, false) => Self::new(f_outer.compose(&f_inner), g_outer.compose(&g_inner), true),
            (true, true) => Self::new(g_outer.compose(&f_inner), f_outer.compose(&g_inner), false),
        }
    }

    pub fn inverse(&self) -> BidiscAuto {
        if self.swap {
            // (z1, z2) -> (g2(z2), g1(z1)) has inverse (w1, w2) -> (g1^{-1}(w2), g2^{-1}(w1)).
            Self::new(self.gamma2.inverse(), self.gamma1.inverse(), true)
        } else {
            Self::new(self.gamma1.inverse(), self.gamma2.inverse(), false)
        }
    }

    pub fn power(&self, k: i64) -> BidiscAuto {
        BidiscPowers::new(self).power(k)
    }

    pub fn map_distance(&self, other: &BidiscAuto) -> f64 {
        let samples = [(0.0, 0.0), (0.5, -0.3), (-0.2, 0.7), (0.1, 0.9)];
        samples
            .iter()
            .map(|&(x, y)| {
                let (a1, a2) = self.apply_pair(C64::new(x, y), C64::new(y, -x));
                let (b1, b2) = other.apply_pair(C64::new(x, y), C64::new(y, -x));
                (a1 - b1).norm().max((a2 - b2).norm())
            })
            .fold(0.0, f64::max)
    }
}

/// Closed-form powers: componentwise for the product case, through
/// `gamma^{2m} = ((gamma2 o gamma1)^m, (gamma1 o gamma2)^m)` with the swap.
#[derive(Debug, Clone, Copy)]
pub struct BidiscPowers {
    base: BidiscAuto,
    first: DiscPowers,
    second: DiscPowers,
}

impl BidiscPowers {
    pub fn new(b: &BidiscAuto) -> Self {
        if b.swap {
            Self {
                base: *b,
                first: DiscPowers::new(&b.gamma2.compose(&b.gamma1)),
                second: DiscPowers::new(&b.gamma1.compose(&b.gamma2)),
            }
        } else {
            Self {
                base: *b,
                first: DiscPowers::new(&b.gamma1),
                second: DiscPowers::new(&b.gamma2),
            }
        }
    }

    pub fn power(&self, k: i64) -> BidiscAuto {
        if !self.base.swap {
            return BidiscAuto::new(self.first.power(k), self.second.power(k), false);
        }
        let m = k.div_euclid(2);
        let even = BidiscAuto::new(self.first.power(m), self.second.power(m), false);
        if k.rem_euclid(2) == 0 {
            even
        } else {
            self.base.compose(&even)
        }
    }

    /// `gamma^k(z)` with coordinate defects.
    pub fn apply_power(&self, k: i64, z: (C64, C64), d: (f64, f64)) -> ((C64, C64), (f64, f64)) {
        if !self.base.swap {
            let (w1, e1) = self.first.apply_power(k, z.0, d.0);
            let (w2, e2) = self.second.apply_power(k, z.1, d.1);
            return ((w1, w2), (e1, e2));
        }
        let m = k.div_euclid(2);
        let (w1, e1) = self.first.apply_power(m, z.0, d.0);
        let (w2, e2) = self.second.apply_power(m, z.1, d.1);
        if k.rem_euclid(2) == 0 {
            ((w1, w2), (e1, e2))
        } else {
            self.base.apply_with_defects((w1, w2), (e1, e2))
        }
    }
}
