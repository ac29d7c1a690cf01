//! Automorphisms of the unit disc, `z -> (conj(p) z + conj(q)) / (q z + p)`
//! with `|p|^2 - |q|^2 = 1`.

use serde::{Deserialize, Serialize};

use crate::automorphism::ball::BallMoebius;
use crate::automorphism::class::{AutClass, AutKind, DiscEigen, FixedPoint};
use crate::domain::{ComplexVector, UnitaryMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscMoebius {
    p: C64,
    q: C64,
}

impl DiscMoebius {
    pub fn new(p: C64, q: C64) -> Result<Self> {
        let scale = p.norm_sqr().max(1.0);
        let defect = p.norm_sqr() - q.norm_sqr() - 1.0;
        if !(defect.abs() <= tol::DISC_NORMALISATION * scale) {
            return Err(Error::InvalidParameter(format!(
                "|p|^2 - |q|^2 must equal 1 (off by {defect:e})"
            )));
        }
        Ok(Self { p, q })
    }

    pub(crate) fn new_unchecked(p: C64, q: C64) -> Self {
        Self { p, q }
    }

    pub fn identity() -> Self {
        Self { p: ONE, q: ZERO }
    }

    /// `z -> e^{i theta} z`.
    pub fn rotation(theta: f64) -> Self {
        Self {
            p: C64::from_polar(1.0, -theta / 2.0),
            q: ZERO,
        }
    }

    /// The automorphism with `gamma(0) = b` and `gamma'(0) > 0`.
    pub fn translation(b: C64) -> Result<Self> {
        if b.norm() >= 1.0 {
            return Err(Error::OutsideDomain(format!("{b} is not in the disc")));
        }
        let p = C64::new(1.0 / (1.0 - b.norm_sqr()).sqrt(), 0.0);
        Ok(Self {
            p,
            q: (b * p).conj(),
        })
    }

    pub fn p(&self) -> C64 {
        self.p
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    /// `(p + conj p)^2`: below 4 elliptic, 4 parabolic, above 4 hyperbolic.
    pub fn trace_test(&self) -> f64 {
        let t = 2.0 * self.p.re;
        t * t
    }

    /// Coefficient matrix `[[conj p, conj q], [q, p]]`.
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        [[self.p.conj(), self.q.conj()], [self.q, self.p]]
    }

    pub fn apply(&self, z: C64) -> Result<C64> {
        if z.norm_sqr() > 1.0 + tol::CLOSURE {
            return Err(Error::OutsideDomain(format!(
                "{z} is outside the closed disc"
            )));
        }
        let den = self.q * z + self.p;
        if den == ZERO {
            return Err(Error::SingularInput("q z + p = 0".into()));
        }
        Ok((self.p.conj() * z + self.q.conj()) / den)
    }

    #[inline]
    pub fn apply_unchecked(&self, z: C64) -> C64 {
        (self.p.conj() * z + self.q.conj()) / (self.q * z + self.p)
    }

    /// Image of `z` together with `1 - |gamma(z)|^2 = (1 - |z|^2) / |q z + p|^2`.
    #[inline]
    pub fn apply_with_defect(&self, z: C64, defect: f64) -> (C64, f64) {
        let den = self.q * z + self.p;
        (
            (self.p.conj() * z + self.q.conj()) / den,
            defect / den.norm_sqr(),
        )
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &DiscMoebius) -> DiscMoebius {
        let (p2, q2, p1, q1) = (self.p, self.q, inner.p, inner.q);
        DiscMoebius {
            p: q2 * q1.conj() + p2 * p1,
            q: q2 * p1.conj() + p2 * q1,
        }
    }

    pub fn inverse(&self) -> DiscMoebius {
        DiscMoebius {
            p: self.p.conj(),
            q: -self.q,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.q.norm() <= 1e-12 && self.p.im.abs() <= 1e-12
    }

    /// Distance between the maps on a fixed set of sample points.
    pub fn map_distance(&self, other: &DiscMoebius) -> f64 {
        let samples = [
            ZERO,
            C64::new(0.5, 0.0),
            C64::new(0.0, -0.5),
            C64::new(-0.3, 0.4),
            C64::new(0.9, 0.0),
        ];
        samples
            .iter()
            .map(|&z| (self.apply_unchecked(z) - other.apply_unchecked(z)).norm())
            .fold(0.0, f64::max)
    }

    pub fn classify(&self) -> AutClass {
        if self.is_identity() {
            return AutClass {
                kind: AutKind::Identity,
                fixed_points: vec![],
                disc_eigen: None,
            };
        }
        let test = self.trace_test();
        let t = self.p.re;
        let point = |z: C64, interior: bool| FixedPoint {
            point: ComplexVector::new(vec![z]).expect("finite fixed point"),
            interior,
        };
        if (test - 4.0).abs() <= tol::PARABOLIC_BAND {
            let (lambda, c, nu) = parabolic_data(self);
            let fixed = (C64::new(lambda, 0.0) - self.p) / self.q;
            AutClass {
                kind: AutKind::Parabolic,
                fixed_points: vec![point(fixed, false)],
                disc_eigen: Some(DiscEigen::Parabolic {
                    lambda,
                    nu,
                    conjugator: [[ONE, ZERO], [c, ONE]],
                }),
            }
        } else if test > 4.0 {
            let (lambda1, lambda2, rho1, rho2) = hyperbolic_data(self);
            AutClass {
                kind: AutKind::Hyperbolic,
                fixed_points: vec![point(rho1, false), point(rho2, false)],
                disc_eigen: Some(DiscEigen::Hyperbolic {
                    lambda1,
                    lambda2,
                    mu: lambda1 / lambda2,
                    rho1,
                    rho2,
                }),
            }
        } else {
            let s = (1.0 - t * t).max(0.0).sqrt();
            let l1 = C64::new(t, s);
            let l2 = C64::new(t, -s);
            let fixed = if self.q.norm() <= 1e-15 {
                ZERO
            } else {
                let z1 = fixed_point_for(self, l1);
                let z2 = fixed_point_for(self, l2);
                if z1.norm() < z2.norm() {
                    z1
                } else {
                    z2
                }
            };
            AutClass {
                kind: AutKind::Elliptic,
                fixed_points: vec![point(fixed, true)],
                disc_eigen: Some(DiscEigen::Elliptic {
                    lambda1: l1,
                    lambda2: l2,
                }),
            }
        }
    }

    /// Closed-form `k`-th power.
    pub fn power(&self, k: i64) -> DiscMoebius {
        DiscPowers::new(self).power(k)
    }

    /// `gamma^k(0)`.
    pub fn orbit0(&self, k: i64) -> C64 {
        DiscPowers::new(self).apply_power(k, ZERO, 1.0).0
    }

    /// Normal form `U phi_a` as a one-dimensional ball automorphism.
    pub fn to_ball(&self) -> BallMoebius {
        // gamma^{-1}(0) = -conj(q) / conj(p); the unitary factor is -conj(p) / p.
        let a = -self.q.conj() / self.p.conj();
        let u = -self.p.conj() / self.p;
        let u = u / u.norm();
        BallMoebius::new_unchecked(
            UnitaryMatrix::diagonal_phases(&[u.arg()]),
            ComplexVector::from_parts(a, &[]),
        )
    }
}

fn fixed_point_for(m: &DiscMoebius, lambda: C64) -> C64 {
    // Eigenvector (z, 1): q z + p = lambda, or conj(p) z + conj(q) = lambda z.
    let d1 = m.q;
    let d2 = lambda - m.p.conj();
    if d1.norm() >= d2.norm() {
        (lambda - m.p) / d1
    } else {
        m.q.conj() / d2
    }
}

fn hyperbolic_data(m: &DiscMoebius) -> (f64, f64, C64, C64) {
    let t = m.p.re;
    let s = (t * t - 1.0).max(0.0).sqrt();
    let lambda1 = t + t.signum() * s;
    let lambda2 = 1.0 / lambda1;
    let rho2 = fixed_point_for(m, C64::new(lambda1, 0.0));
    let rho1 = fixed_point_for(m, C64::new(lambda2, 0.0));
    (lambda1, lambda2, rho1, rho2)
}

fn parabolic_data(m: &DiscMoebius) -> (f64, C64, C64) {
    let lambda = m.p.re.signum();
    let nu = m.q.conj() / lambda;
    let c = (m.p.conj() - lambda) / m.q.conj();
    (lambda, c, nu)
}

#[derive(Debug, Clone, Copy)]
enum Plan {
    Identity,
    Hyperbolic { rho1: C64, rho2: C64, mu: f64 },
    Parabolic { lambda: f64, c: C64, nu: C64 },
    Elliptic,
}

/// Closed-form powers of a fixed disc automorphism.
#[derive(Debug, Clone, Copy)]
pub struct DiscPowers {
    base: DiscMoebius,
    plan: Plan,
}

impl DiscPowers {
    pub fn new(m: &DiscMoebius) -> Self {
        let plan = if m.is_identity() {
            Plan::Identity
        } else {
            let test = m.trace_test();
            if (test - 4.0).abs() <= tol::PARABOLIC_BAND {
                let (lambda, c, nu) = parabolic_data(m);
                Plan::Parabolic { lambda, c, nu }
            } else if test > 4.0 {
                let (l1, l2, rho1, rho2) = hyperbolic_data(m);
                Plan::Hyperbolic {
                    rho1,
                    rho2,
                    mu: l1 / l2,
                }
            } else {
                Plan::Elliptic
            }
        };
        Self { base: *m, plan }
    }

    /// Projective matrix of `gamma^k` and its determinant.
    fn matrix(&self, k: i64) -> ([[C64; 2]; 2], f64) {
        match self.plan {
            Plan::Identity => ([[ONE, ZERO], [ZERO, ONE]], 1.0),
            Plan::Hyperbolic { rho1, rho2, mu } => {
                let t = mu.powf(-(k.unsigned_abs() as f64));
                let inv = ONE / (rho1 - rho2);
                let m = if k >= 0 {
                    // B^{-1} diag(1, mu^{-k}) B
                    [
                        [(-rho2 + rho1 * t) * inv, rho1 * rho2 * (1.0 - t) * inv],
                        [C64::new(t - 1.0, 0.0) * inv, (rho1 - rho2 * t) * inv],
                    ]
                } else {
                    // B^{-1} diag(mu^k, 1) B
                    [
                        [(rho1 - rho2 * t) * inv, rho1 * rho2 * (t - 1.0) * inv],
                        [C64::new(1.0 - t, 0.0) * inv, (rho1 * t - rho2) * inv],
                    ]
                };
                (m, t)
            }
            Plan::Parabolic { c, nu, .. } => {
                let kn = nu * k as f64;
                ([[ONE + c * kn, kn], [-c * c * kn, ONE - c * kn]], 1.0)
            }
            Plan::Elliptic => (binary_power(&self.base, k).matrix(), 1.0),
        }
    }

    pub fn power(&self, k: i64) -> DiscMoebius {
        match self.plan {
            Plan::Identity => DiscMoebius::identity(),
            Plan::Elliptic => binary_power(&self.base, k),
            Plan::Parabolic { lambda, c, nu } => {
                let sign = if k.rem_euclid(2) == 0 { 1.0 } else { lambda };
                let kn = nu * k as f64;
                DiscMoebius::new_unchecked((ONE - c * kn) * sign, -c * c * kn * sign)
            }
            Plan::Hyperbolic { .. } => {
                let (m, det) = self.matrix(k);
                let s = det.sqrt();
                DiscMoebius::new_unchecked(m[1][1] / s, m[1][0] / s)
            }
        }
    }

    /// `gamma^k(z)` and its defect `1 - |gamma^k(z)|^2` from the defect of `z`.
    pub fn apply_power(&self, k: i64, z: C64, defect: f64) -> (C64, f64) {
        let (m, det) = self.matrix(k);
        let den = m[1][0] * z + m[1][1];
        ((m[0][0] * z + m[0][1]) / den, defect * det / den.norm_sqr())
    }
}

/// Power by repeated squaring, renormalised after every product.
pub fn binary_power(m: &DiscMoebius, k: i64) -> DiscMoebius {
    let mut base = if k < 0 { m.inverse() } else { *m };
    let mut e = k.unsigned_abs();
    let mut acc = DiscMoebius::identity();
    while e > 0 {
        if e & 1 == 1 {
            acc = renormalise(acc.compose(&base));
        }
        base = renormalise(base.compose(&base));
        e >>= 1;
    }
    acc
}

fn renormalise(m: DiscMoebius) -> DiscMoebius {
    let det = m.p.norm_sqr() - m.q.norm_sqr();
    if det > 0.0 {
        let s = det.sqrt();
        DiscMoebius {
            p: m.p / s,
            q: m.q / s,
        }
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn iterate(m: &DiscMoebius, k: i64, z: C64) -> C64 {
        let g = if k < 0 { m.inverse() } else { *m };
        (0..k.unsigned_abs()).fold(z, |acc, _| g.apply_unchecked(acc))
    }

    #[test]
    fn rejects_unnormalised() {
        assert!(DiscMoebius::new(c(1.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn apply_examples() {
        let id = DiscMoebius::identity();
        assert_eq!(id.apply(c(0.3, -0.2)).unwrap(), c(0.3, -0.2));
        let m = DiscMoebius::new(c(SQRT_2, 0.0), ONE).unwrap();
        assert!((m.apply(ZERO).unwrap() - c(1.0 / SQRT_2, 0.0)).norm() < 1e-15);
        assert!(m.apply(c(2.0, 0.0)).is_err());
    }

    #[test]
    fn boundary_is_preserved() {
        let m = DiscMoebius::new(c(1.3, 0.4), c(0.0, 0.0)).err();
        assert!(m.is_some());
        let p = c(1.2, -0.7);
        let q = C64::from_polar((p.norm_sqr() - 1.0).sqrt(), 0.4);
        let m = DiscMoebius::new(p, q).unwrap();
        for j in 0..100 {
            let z = C64::from_polar(1.0, j as f64 * 0.0628);
            assert!((m.apply(z).unwrap().norm() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn classify_hyperbolic_example() {
        let m = DiscMoebius::new(c(SQRT_2, 0.0), ONE).unwrap();
        let cls = m.classify();
        assert_eq!(cls.kind, AutKind::Hyperbolic);
        match cls.disc_eigen.unwrap() {
            DiscEigen::Hyperbolic { mu, rho1, rho2, .. } => {
                assert!((mu - (3.0 + 2.0 * SQRT_2)).abs() < 1e-12);
                assert!((rho2 - ONE).norm() < 1e-14);
                assert!((rho1 + ONE).norm() < 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn classify_parabolic_and_elliptic() {
        let m = DiscMoebius::new(c(1.0, 1.0), ONE).unwrap();
        let cls = m.classify();
        assert_eq!(cls.kind, AutKind::Parabolic);
        let p = cls.fixed_points[0].point.get(0);
        assert!((p.norm() - 1.0).abs() < 1e-12);
        assert!((m.apply_unchecked(p) - p).norm() < 1e-10);

        let r = DiscMoebius::new(C64::from_polar(1.0, PI / 3.0), ZERO).unwrap();
        let cls = r.classify();
        assert_eq!(cls.kind, AutKind::Elliptic);
        assert_eq!(cls.fixed_points[0].point.get(0), ZERO);
        assert!(cls.fixed_points[0].interior);
    }

    #[test]
    fn fixed_points_are_fixed() {
        for (p, q) in [(c(1.7, 0.3), 0.2), (c(-2.1, 0.5), 1.3), (c(0.4, 1.2), 2.0)] {
            let q = C64::from_polar((p.norm_sqr() - 1.0).sqrt(), q);
            let m = DiscMoebius::new(p, q).unwrap();
            let cls = m.classify();
            for f in &cls.fixed_points {
                let z = f.point.get(0);
                assert!((m.apply_unchecked(z) - z).norm() <= 1e-10, "{cls:?}");
                if cls.kind == AutKind::Hyperbolic {
                    assert!((z.norm() - 1.0).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn power_examples() {
        let m = DiscMoebius::new(c(SQRT_2, 0.0), ONE).unwrap();
        assert!(m.power(0).map_distance(&DiscMoebius::identity()) < 1e-15);
        assert!(m.power(1).map_distance(&m) < 1e-14);
        let mu = 3.0 + 2.0 * SQRT_2;
        for k in -10..=10 {
            let mk = mu.powi(k as i32);
            let expected = (mk - 1.0) / (mk + 1.0);
            assert!((m.orbit0(k) - c(expected, 0.0)).norm() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn parabolic_orbit_defect() {
        let m = DiscMoebius::new(c(1.0, 1.0), ONE).unwrap();
        let cls = m.classify();
        let eig = cls.disc_eigen.unwrap();
        let (_, d) = eig.parabolic_cd().unwrap();
        let nu = match eig {
            DiscEigen::Parabolic { nu, .. } => nu,
            _ => unreachable!(),
        };
        let plan = DiscPowers::new(&m);
        for k in -50i64..=50 {
            let (_, defect) = plan.apply_power(k, ZERO, 1.0);
            let expected = 1.0 / (1.0 + d.norm().powi(4) * nu.norm_sqr() * (k * k) as f64);
            assert!((defect - expected).abs() < 1e-14);
            let direct = 1.0 - m.orbit0(k).norm_sqr();
            assert!((direct - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn powers_match_iteration() {
        let cases = [
            DiscMoebius::new(c(SQRT_2, 0.0), ONE).unwrap(),
            DiscMoebius::new(c(1.0, 1.0), ONE).unwrap(),
            DiscMoebius::new(c(-1.0, 0.5), c(0.0, 0.5)).unwrap(),
            DiscMoebius::new(c(0.6, 0.9), C64::from_polar(0.17f64.sqrt(), 1.0)).unwrap(),
            DiscMoebius::rotation(0.7),
        ];
        for m in &cases {
            let plan = DiscPowers::new(m);
            for k in -40..=40 {
                for z in [ZERO, c(0.3, -0.4)] {
                    let a = plan.apply_power(k, z, 1.0 - z.norm_sqr()).0;
                    let b = iterate(m, k, z);
                    assert!((a - b).norm() < 1e-9, "{m:?} k={k}");
                    if k.abs() < 20 {
                        assert!((plan.power(k).apply_unchecked(z) - b).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn compose_and_inverse() {
        let a = DiscMoebius::new(
            c(1.5, 0.2),
            C64::from_polar((1.5f64.powi(2) + 0.04 - 1.0).sqrt(), 2.0),
        )
        .unwrap();
        let b = DiscMoebius::translation(c(0.3, 0.1)).unwrap();
        let z = c(0.1, 0.6);
        let ab = a.compose(&b);
        assert!((ab.apply_unchecked(z) - a.apply_unchecked(b.apply_unchecked(z))).norm() < 1e-14);
        assert!(
            a.compose(&a.inverse())
                .map_distance(&DiscMoebius::identity())
                < 1e-14
        );
    }

    #[test]
    fn to_ball_agrees() {
        let m = DiscMoebius::new(
            c(1.2, -0.4),
            C64::from_polar((1.44f64 + 0.16 - 1.0).sqrt(), 0.8),
        )
        .unwrap();
        let b = m.to_ball();
        for z in [ZERO, c(0.5, 0.2), c(-0.1, -0.8)] {
            let w = b.apply(&ComplexVector::new(vec![z]).unwrap()).unwrap();
            assert!((w.get(0) - m.apply_unchecked(z)).norm() < 1e-14);
        }
    }
}
