//! Automorphisms `z -> U phi_a(z)` of the unit ball in `C^n`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::automorphism::class::{AutClass, AutKind, FixedPoint};
use crate::domain::{
    inner_unchecked, one_minus_sq_norm, ComplexVector, UnitaryMatrix, C64, ONE, ZERO,
};
use crate::error::{Error, Result};
use crate::tol;

/// `phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)`.
///
/// The numerator is evaluated as `a - s_a z - <z, a> a / (1 + s_a)`, which is
/// the same expression without the division by `|a|^2`; `phi_0(z) = -z`.
pub fn phi(a: &ComplexVector, z: &ComplexVector) -> Result<ComplexVector> {
    if a.dim() != z.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            got: z.dim(),
        });
    }
    if a.norm_sq() >= 1.0 {
        return Err(Error::OutsideDomain(
            "centre of phi_a must lie in the ball".into(),
        ));
    }
    let den = ONE - inner_unchecked(z, a);
    if den.norm() == 0.0 {
        return Err(Error::SingularInput("<z, a> = 1".into()));
    }
    Ok(phi_unchecked(a, one_minus_sq_norm(a).sqrt(), z))
}

#[inline]
pub(crate) fn phi_unchecked(a: &ComplexVector, s: f64, z: &ComplexVector) -> ComplexVector {
    let za = inner_unchecked(z, a);
    let den = ONE - za;
    let k = za / (1.0 + s);
    let v = a
        .as_dvector()
        .zip_map(z.as_dvector(), |ai, zi| (ai - zi * s - ai * k) / den);
    ComplexVector::from_dvector(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMoebius {
    unitary: UnitaryMatrix,
    center: ComplexVector,
}

impl BallMoebius {
    pub fn new(unitary: UnitaryMatrix, center: ComplexVector) -> Result<Self> {
        if unitary.dim() != center.dim() {
            return Err(Error::Dimension {
                expected: unitary.dim(),
                got: center.dim(),
            });
        }
        if center.norm() > 1.0 - 1e-12 {
            return Err(Error::OutsideDomain("|a| must be below 1 - 1e-12".into()));
        }
        Ok(Self { unitary, center })
    }

    pub(crate) fn new_unchecked(unitary: UnitaryMatrix, center: ComplexVector) -> Self {
        Self { unitary, center }
    }

    /// The identity map, `U = -I` and `a = 0` since `phi_0(z) = -z`.
    pub fn identity(n: usize) -> Self {
        Self {
            unitary: UnitaryMatrix::from_matrix_unchecked(-DMatrix::<C64>::identity(n, n)),
            center: ComplexVector::zeros(n),
        }
    }

    /// The linear map `z -> V z`.
    pub fn linear(v: &UnitaryMatrix) -> Self {
        Self {
            unitary: v.mul(&Self::identity(v.dim()).unitary),
            center: ComplexVector::zeros(v.dim()),
        }
    }

    /// `phi_a` itself (`U = I`), an involution.
    pub fn involution(center: ComplexVector) -> Result<Self> {
        Self::new(UnitaryMatrix::identity(center.dim()), center)
    }

    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.unitary
    }

    pub fn center(&self) -> &ComplexVector {
        &self.center
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    fn s(&self) -> f64 {
        one_minus_sq_norm(&self.center).sqrt()
    }

    pub fn is_identity(&self, tolerance: f64) -> bool {
        // U phi_0 = -U, so the identity has a = 0 and U = -I.
        self.center.norm() <= tolerance && {
            let n = self.dim();
            let minus = UnitaryMatrix::from_matrix_unchecked(-DMatrix::<C64>::identity(n, n));
            self.unitary.max_abs_diff(&minus) <= tolerance
        }
    }

    pub fn apply(&self, z: &ComplexVector) -> Result<ComplexVector> {
        if z.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: z.dim(),
            });
        }
        if z.norm_sq() > 1.0 + tol::CLOSURE {
            return Err(Error::OutsideDomain(format!(
                "{z:?} is outside the closed ball"
            )));
        }
        if (ONE - inner_unchecked(z, &self.center)).norm() == 0.0 {
            return Err(Error::SingularInput("<z, a> = 1".into()));
        }
        Ok(self.apply_unchecked(z))
    }

    #[inline]
    pub fn apply_unchecked(&self, z: &ComplexVector) -> ComplexVector {
        self.unitary
            .apply(&phi_unchecked(&self.center, self.s(), z))
    }

    /// Image of `z` and the defect `1 - |gamma(z)|^2` computed from the defect of
    /// `z` by `(1 - |a|^2)(1 - |z|^2) / |1 - <z, a>|^2`.
    pub fn apply_with_defect(&self, z: &ComplexVector, defect: f64) -> (ComplexVector, f64) {
        let da = one_minus_sq_norm(&self.center);
        let den = ONE - inner_unchecked(z, &self.center);
        let w = self
            .unitary
            .apply(&phi_unchecked(&self.center, da.sqrt(), z));
        (w, da * defect / den.norm_sqr())
    }

    /// `(U phi_a)^{-1} = U* phi_{Ua}`.
    pub fn inverse(&self) -> BallMoebius {
        BallMoebius {
            unitary: self.unitary.adjoint(),
            center: self.unitary.apply(&self.center),
        }
    }

    /// Normal form of a map known to be a ball automorphism, given the map and
    /// the preimage of the origin.
    pub fn from_action<F>(n: usize, preimage_of_zero: ComplexVector, f: F) -> Result<Self>
    where
        F: Fn(&ComplexVector) -> ComplexVector,
    {
        let c = preimage_of_zero;
        if c.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                got: c.dim(),
            });
        }
        if c.norm() >= 1.0 {
            return Err(Error::NormalForm(c.norm()));
        }
        let s = one_minus_sq_norm(&c).sqrt();
        let t = 0.5;
        let mut v = DMatrix::from_element(n, n, ZERO);
        for j in 0..n {
            let e = ComplexVector::basis(n, j).scale(C64::new(t, 0.0));
            let col = f(&phi_unchecked(&c, s, &e));
            for i in 0..n {
                v[(i, j)] = col.get(i) / t;
            }
        }
        let u = UnitaryMatrix::reunitarize(v, tol::NORMAL_FORM_RECOVERY)?;
        Ok(Self {
            unitary: u,
            center: c,
        })
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &BallMoebius) -> Result<BallMoebius> {
        if self.dim() != inner.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: inner.dim(),
            });
        }
        let c = inner.inverse().apply_unchecked(&self.center);
        Self::from_action(self.dim(), c, |w| {
            self.apply_unchecked(&inner.apply_unchecked(w))
        })
    }

    /// `k`-th power by repeated squaring.
    pub fn power(&self, k: i64) -> Result<BallMoebius> {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = BallMoebius::identity(self.dim());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(acc)
    }

    /// Complex Jacobian matrix of `U phi_a` at `z`.
    pub fn jacobian_matrix(&self, z: &ComplexVector) -> DMatrix<C64> {
        let a = self.center.as_dvector();
        let s = self.s();
        let n = self.dim();
        let za = inner_unchecked(z, &self.center);
        let d = ONE - za;
        let numerator = a.zip_map(z.as_dvector(), |ai, zi| ai - zi * s - ai * za / (1.0 + s));
        let abar: DVector<C64> = a.map(|c| c.conj());
        let dn = DMatrix::<C64>::identity(n, n) * C64::new(-s, 0.0)
            - a * abar.transpose() / C64::new(1.0 + s, 0.0);
        let dphi = dn / d + &numerator * abar.transpose() / (d * d);
        self.unitary.matrix() * dphi
    }

    /// `|det J(z)| = (1 - |a|^2)^{(n+1)/2} / |1 - <z, a>|^{n+1}`.
    pub fn jacobian_abs(&self, z: &ComplexVector) -> f64 {
        let n1 = (self.dim() + 1) as f64;
        let da = one_minus_sq_norm(&self.center);
        let den = (ONE - inner_unchecked(z, &self.center)).norm();
        (da.sqrt() / den).powf(n1)
    }

    /// Largest pointwise difference on a fixed sample set.
    pub fn map_distance(&self, other: &BallMoebius) -> f64 {
        let n = self.dim();
        let mut samples = vec![ComplexVector::zeros(n)];
        for j in 0..n {
            samples.push(ComplexVector::basis(n, j).scale(C64::new(0.5, 0.2)));
            samples.push(ComplexVector::basis(n, j).scale(C64::new(-0.1, -0.7)));
        }
        samples
            .iter()
            .map(|z| self.apply_unchecked(z).distance(&other.apply_unchecked(z)))
            .fold(0.0, f64::max)
    }

    /// Elliptic when an interior fixed point is found; otherwise the forward and
    /// backward orbits of the origin are followed to the sphere and their
    /// limits polished into fixed points.
    pub fn classify(&self, budget: usize) -> Result<AutClass> {
        let n = self.dim();
        if self.is_identity(1e-12) {
            return Ok(AutClass {
                kind: AutKind::Identity,
                fixed_points: vec![],
                disc_eigen: None,
            });
        }
        let origin = ComplexVector::zeros(n);
        let mut starts = vec![
            origin.clone(),
            self.center.clone(),
            self.apply_unchecked(&origin),
        ];
        let mut z = origin.clone();
        let mut bary = DVector::from_element(n, ZERO);
        let m = 64.min(budget.max(1));
        for _ in 0..m {
            z = self.apply_unchecked(&z);
            bary += z.as_dvector();
        }
        starts.push(ComplexVector::from_dvector(bary / C64::new(m as f64, 0.0)));

        for s in &starts {
            if let Some(p) = self.newton(s, 60, true) {
                // Residual in units of the distance to the boundary: Newton
                // creeps toward the double boundary root of a parabolic map
                // with a residual quadratic in that distance.
                let res = self.apply_unchecked(&p).distance(&p) / one_minus_sq_norm(&p).max(0.0);
                if res <= tol::FIXED_POINT_RESIDUAL && p.norm() <= 1.0 - tol::INTERIOR_MARGIN {
                    return Ok(AutClass {
                        kind: AutKind::Elliptic,
                        fixed_points: vec![FixedPoint {
                            point: p,
                            interior: true,
                        }],
                        disc_eigen: None,
                    });
                }
            }
        }

        let mut limits: Vec<ComplexVector> = Vec::new();
        for g in [self.clone(), self.inverse()] {
            let mut z = origin.clone();
            let mut d = 1.0;
            let mut steps = 0;
            while d >= tol::DEFAULT_DELTA && steps < budget {
                let (w, dw) = g.apply_with_defect(&z, d);
                z = w;
                d = dw;
                steps += 1;
            }
            if d >= tol::DEFAULT_DELTA {
                return Err(Error::InconclusiveClassification(budget));
            }
            let polished = self.newton(&z, 80, false).unwrap_or(z);
            let r = polished.norm();
            let p = polished.scale(C64::new(1.0 / r, 0.0));
            if self.apply_unchecked(&p).distance(&p) > tol::BOUNDARY_FIXED_POINT {
                return Err(Error::InconclusiveClassification(budget));
            }
            if !limits
                .iter()
                .any(|q| q.distance(&p) <= tol::BOUNDARY_FIXED_POINT)
            {
                limits.push(p);
            }
        }
        let kind = if limits.len() == 2 {
            AutKind::Hyperbolic
        } else {
            AutKind::Parabolic
        };
        Ok(AutClass {
            kind,
            fixed_points: limits
                .into_iter()
                .map(|point| FixedPoint {
                    point,
                    interior: false,
                })
                .collect(),
            disc_eigen: None,
        })
    }

    /// Damped Newton iteration for `gamma(z) = z` with least-squares steps.
    fn newton(
        &self,
        start: &ComplexVector,
        iters: usize,
        stay_inside: bool,
    ) -> Option<ComplexVector> {
        let n = self.dim();
        let mut z = start.clone();
        let residual = |z: &ComplexVector| self.apply_unchecked(z).sub(z);
        let mut f = residual(&z);
        for _ in 0..iters {
            let fnorm = f.norm();
            if fnorm <= 1e-15 {
                break;
            }
            let jac = self.jacobian_matrix(&z) - DMatrix::<C64>::identity(n, n);
            let svd = jac.svd(true, true);
            let step = svd.solve(&(-f.as_dvector()), 1e-14).ok()?;
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let cand =
                    ComplexVector::from_dvector(z.as_dvector() + &step * C64::new(lambda, 0.0));
                let ok_domain = !stay_inside || cand.norm_sq() < 1.0;
                let den_ok = (ONE - inner_unchecked(&cand, &self.center)).norm() > 1e-12;
                if ok_domain && den_ok && cand.is_finite() {
                    let fc = residual(&cand);
                    if fc.norm() < fnorm {
                        z = cand;
                        f = fc;
                        improved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        z.is_finite().then_some(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> ComplexVector {
        loop {
            let v: Vec<C64> = (0..n)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let z = ComplexVector::new(v).unwrap();
            if z.norm() < radius {
                return z;
            }
        }
    }

    fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> UnitaryMatrix {
        let m = DMatrix::from_fn(n, n, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let qr = m.qr();
        UnitaryMatrix::new(qr.q()).unwrap()
    }

    #[test]
    fn phi_examples() {
        let a = ComplexVector::new(vec![c(0.3, 0.1), c(-0.2, 0.4)]).unwrap();
        let p = BallMoebius::involution(a.clone()).unwrap();
        assert!(p.apply(&ComplexVector::zeros(2)).unwrap().distance(&a) < 1e-15);
        assert!(p.apply(&a).unwrap().norm() < 1e-15);
        let half = ComplexVector::new(vec![c(0.5, 0.0)]).unwrap();
        let z = ComplexVector::new(vec![c(-0.5, 0.0)]).unwrap();
        assert!((phi(&half, &z).unwrap().get(0) - c(0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn phi_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            let a = random_point(&mut rng, n, 0.95);
            let z = random_point(&mut rng, n, 0.99);
            let w = phi(&a, &phi(&a, &z).unwrap()).unwrap();
            assert!(w.distance(&z) < 1e-13);
        }
    }

    #[test]
    fn identity_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=3 {
            for _ in 0..200 {
                let a = random_point(&mut rng, n, 1.0);
                let z = random_point(&mut rng, n, 1.0);
                let w = phi(&a, &z).unwrap();
                let lhs = one_minus_sq_norm(&w);
                let rhs = one_minus_sq_norm(&a) * one_minus_sq_norm(&z)
                    / (ONE - inner_unchecked(&z, &a)).norm_sqr();
                assert!((lhs - rhs).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn compose_matches_sequential() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3 {
            let g1 = BallMoebius::new(random_unitary(&mut rng, n), random_point(&mut rng, n, 0.9))
                .unwrap();
            let g2 = BallMoebius::new(random_unitary(&mut rng, n), random_point(&mut rng, n, 0.9))
                .unwrap();
            let g = g2.compose(&g1).unwrap();
            for _ in 0..100 {
                let z = random_point(&mut rng, n, 1.0);
                let seq = g2.apply_unchecked(&g1.apply_unchecked(&z));
                assert!(g.apply_unchecked(&z).distance(&seq) < 1e-11);
            }
            let id = g1.compose(&g1.inverse()).unwrap();
            assert!(id.center().norm() < 1e-11);
            assert!(id.is_identity(1e-11));
        }
    }

    #[test]
    fn compose_with_phi_zero() {
        let a1 = ComplexVector::new(vec![c(0.2, 0.0), c(0.0, -0.3)]).unwrap();
        let g1 = BallMoebius::involution(a1.clone()).unwrap();
        let g2 = BallMoebius::new(UnitaryMatrix::identity(2), ComplexVector::zeros(2)).unwrap();
        // U = I, a = 0 is -z; composing gives -phi_{a1} = (-I) phi_{a1}.
        let g = g2.compose(&g1).unwrap();
        assert!(g.center().distance(&a1) < 1e-12);
        let z = ComplexVector::new(vec![c(0.1, 0.1), c(0.3, 0.0)]).unwrap();
        assert!(
            g.apply_unchecked(&z)
                .distance(&g1.apply_unchecked(&z).scale(-ONE))
                < 1e-12
        );
    }

    #[test]
    fn jacobian_determinant_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=3 {
            let g = BallMoebius::new(random_unitary(&mut rng, n), random_point(&mut rng, n, 0.9))
                .unwrap();
            let z = random_point(&mut rng, n, 0.9);
            let det = g.jacobian_matrix(&z).determinant().norm();
            assert!((det - g.jacobian_abs(&z)).abs() < 1e-12 * det.max(1.0));
        }
    }

    #[test]
    fn defect_recursion_tracks_direct_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g =
            BallMoebius::new(random_unitary(&mut rng, 2), random_point(&mut rng, 2, 0.6)).unwrap();
        let mut z = random_point(&mut rng, 2, 0.5);
        let mut d = one_minus_sq_norm(&z);
        for _ in 0..40 {
            let (w, dw) = g.apply_with_defect(&z, d);
            z = w;
            d = dw;
            assert!((d - one_minus_sq_norm(&z)).abs() <= 1e-10);
        }
    }

    #[test]
    fn classify_elliptic_rotation() {
        let u = UnitaryMatrix::diagonal_phases(&[0.4, 1.3]);
        let g = BallMoebius::linear(&u);
        let cls = g.classify(1000).unwrap();
        assert_eq!(cls.kind, AutKind::Elliptic);
        assert!(cls.fixed_points[0].point.norm() < 1e-10);
    }

    #[test]
    fn classify_conjugated_elliptic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h =
            BallMoebius::new(random_unitary(&mut rng, 2), random_point(&mut rng, 2, 0.7)).unwrap();
        let rot = BallMoebius::new(
            UnitaryMatrix::diagonal_phases(&[2.0, 2.5]),
            ComplexVector::zeros(2),
        )
        .unwrap();
        let g = h.compose(&rot).unwrap().compose(&h.inverse()).unwrap();
        let cls = g.classify(1000).unwrap();
        assert_eq!(cls.kind, AutKind::Elliptic);
        let p = &cls.fixed_points[0].point;
        assert!(p.distance(&h.apply_unchecked(&ComplexVector::zeros(2))) < 1e-8);
    }

    #[test]
    fn classify_hyperbolic_translation() {
        let a = ComplexVector::new(vec![c(0.6, 0.0), ZERO]).unwrap();
        // -phi_a fixes the points (+-1, 0) of the sphere.
        let g = BallMoebius::new(
            UnitaryMatrix::from_matrix_unchecked(-DMatrix::identity(2, 2)),
            a,
        )
        .unwrap();
        let cls = g.classify(10_000).unwrap();
        assert_eq!(cls.kind, AutKind::Hyperbolic);
        for p in cls.boundary_fixed_points() {
            assert!((p.get(0).norm() - 1.0).abs() < 1e-6);
        }
    }
}
