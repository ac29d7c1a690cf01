//! Heisenberg-affine automorphisms of the Siegel domain `Im z1 > |z'|^2`,
//! written in the row convention
//! `(z1, z') -> (r^2 z1 + c + 2i <r z' U', a'> + i |a'|^2, r z' U' + a')`.

use nalgebra::{DMatrix, Schur};
use serde::{Deserialize, Serialize};

use crate::automorphism::ball::BallMoebius;
use crate::domain::{
    cayley_forward_unchecked, cayley_inverse_unchecked, defect_unchecked, ComplexVector, DomainTag,
    UnitaryMatrix, C64, I, ONE, ZERO,
};
use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiegelAffine {
    r: f64,
    c: f64,
    aprime: ComplexVector,
    uprime: UnitaryMatrix,
}

fn row_inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

fn norm_sq(x: &[C64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum()
}

impl SiegelAffine {
    /// Requires `n = aprime.dim() + 1 >= 2`.
    pub fn new(r: f64, c: f64, aprime: ComplexVector, uprime: UnitaryMatrix) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dilation r = {r} must be positive"
            )));
        }
        if !c.is_finite() {
            return Err(Error::InvalidParameter(
                "translation c must be finite".into(),
            ));
        }
        if aprime.dim() != uprime.dim() {
            return Err(Error::Dimension {
                expected: uprime.dim(),
                got: aprime.dim(),
            });
        }
        Ok(Self {
            r,
            c,
            aprime,
            uprime,
        })
    }

    /// `(r, c, 0', I')` on the Siegel domain of dimension `n`.
    pub fn dilation(n: usize, r: f64, c: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "Siegel elements need n >= 2".into(),
            ));
        }
        Self::new(
            r,
            c,
            ComplexVector::zeros(n - 1),
            UnitaryMatrix::identity(n - 1),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::dilation(n, 1.0, 0.0).expect("n >= 2")
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn aprime(&self) -> &ComplexVector {
        &self.aprime
    }

    pub fn uprime(&self) -> &UnitaryMatrix {
        &self.uprime
    }

    /// Dimension `n` of the Siegel domain.
    pub fn dim(&self) -> usize {
        self.aprime.dim() + 1
    }

    pub fn domain(&self) -> DomainTag {
        DomainTag::Siegel { n: self.dim() }
    }

    pub fn apply(&self, z: &ComplexVector) -> Result<ComplexVector> {
        if z.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: z.dim(),
            });
        }
        let defect = defect_unchecked(&self.domain(), z);
        if defect < -tol::CLOSURE * z.norm_sq().max(1.0) {
            return Err(Error::OutsideDomain(format!(
                "{z:?} is outside the Siegel domain"
            )));
        }
        Ok(self.apply_unchecked(z))
    }

    pub fn apply_unchecked(&self, z: &ComplexVector) -> ComplexVector {
        let a = self.aprime.entries();
        let zu: Vec<C64> = self
            .uprime
            .apply_row(&z.tail())
            .into_iter()
            .map(|x| x * self.r)
            .collect();
        let first =
            z.get(0) * (self.r * self.r) + self.c + I * 2.0 * row_inner(&zu, a) + I * norm_sq(a);
        let tail: Vec<C64> = zu.iter().zip(a).map(|(x, y)| x + y).collect();
        ComplexVector::from_parts(first, &tail)
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &SiegelAffine) -> Result<SiegelAffine> {
        if self.dim() != inner.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: inner.dim(),
            });
        }
        let r2 = self.r;
        let shifted: Vec<C64> = self
            .uprime
            .apply_row(inner.aprime.entries())
            .into_iter()
            .map(|x| x * r2)
            .collect();
        let a2 = self.aprime.entries();
        let c = r2 * r2 * inner.c + self.c - 2.0 * row_inner(&shifted, a2).im;
        let a: Vec<C64> = shifted.iter().zip(a2).map(|(x, y)| x + y).collect();
        Ok(SiegelAffine {
            r: inner.r * r2,
            c,
            aprime: ComplexVector::from_parts(a[0], &a[1..]),
            uprime: inner.uprime.mul(&self.uprime),
        })
    }

    pub fn inverse(&self) -> SiegelAffine {
        let ustar = self.uprime.adjoint();
        let a: Vec<C64> = ustar
            .apply_row(self.aprime.entries())
            .into_iter()
            .map(|x| -x / self.r)
            .collect();
        SiegelAffine {
            r: 1.0 / self.r,
            c: -self.c / (self.r * self.r),
            aprime: ComplexVector::from_parts(a[0], &a[1..]),
            uprime: ustar,
        }
    }

    /// The same automorphism on the unit ball, `Phi^{-1} o self o Phi`.
    pub fn to_ball(&self) -> Result<BallMoebius> {
        let n = self.dim();
        let base = ComplexVector::from_parts(I, &vec![ZERO; n - 1]);
        let pre = cayley_inverse_unchecked(&self.inverse().apply_unchecked(&base));
        BallMoebius::from_action(n, pre, |z| {
            cayley_inverse_unchecked(&self.apply_unchecked(&cayley_forward_unchecked(z)))
        })
    }

    /// Eigen-decomposition `U' = V diag(lambda) V*` and `b = a' V`.
    pub fn spectral(&self) -> Spectral {
        Spectral::new(&self.uprime, self.aprime.entries())
    }

    /// Closed-form `k`-th power.
    pub fn power(&self, k: i64) -> Result<SiegelAffine> {
        SiegelPowers::new(self)?.power(k)
    }

    pub fn max_param_diff(&self, other: &SiegelAffine) -> f64 {
        let da = self
            .aprime
            .entries()
            .iter()
            .zip(other.aprime.entries())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        (self.r - other.r)
            .abs()
            .max((self.c - other.c).abs())
            .max(da)
            .max(self.uprime.max_abs_diff(&other.uprime))
    }
}

/// `U' = V diag(lambda) V*` with the coordinates `b = a' V` of `a'`.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub vectors: DMatrix<C64>,
    pub eigenvalues: Vec<C64>,
    pub coefficients: Vec<C64>,
}

impl Spectral {
    pub fn new(u: &UnitaryMatrix, a: &[C64]) -> Self {
        let m = u.dim();
        let (v, t) = Schur::new(u.matrix().clone()).unpack();
        let eigenvalues: Vec<C64> = (0..m).map(|j| t[(j, j)] / t[(j, j)].norm()).collect();
        let coefficients: Vec<C64> = (0..m)
            .map(|j| (0..m).map(|i| a[i] * v[(i, j)]).sum())
            .collect();
        Self {
            vectors: v,
            eigenvalues,
            coefficients,
        }
    }

    pub fn is_fixed(&self, j: usize) -> bool {
        (self.eigenvalues[j] - ONE).norm() <= tol::EIGENVALUE_ONE
    }

    /// `V diag(f(lambda_j)) V*`.
    pub fn function(&self, f: impl Fn(usize, C64) -> C64) -> DMatrix<C64> {
        let m = self.eigenvalues.len();
        let d = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                f(j, self.eigenvalues[j])
            } else {
                ZERO
            }
        });
        &self.vectors * d * self.vectors.adjoint()
    }

    /// Row vector `x diag(f(lambda_j)) V*` for `x` given in eigen-coordinates.
    pub fn row_back(&self, x: &[C64]) -> Vec<C64> {
        let m = x.len();
        (0..m)
            .map(|i| (0..m).map(|j| x[j] * self.vectors[(i, j)].conj()).sum())
            .collect()
    }

    pub fn unitary_power(&self, k: i64) -> UnitaryMatrix {
        UnitaryMatrix::from_matrix_unchecked(self.function(|_, l| lambda_pow(l, k)))
    }
}

fn lambda_pow(l: C64, k: i64) -> C64 {
    C64::from_polar(1.0, l.arg() * k as f64)
}

/// `s_k = 1 + lambda + .. + lambda^{k-1}` and `t_k = sum_{m<k} lambda s_m`, `k >= 0`.
fn geometric_sums(l: C64, k: u64, fixed: bool) -> (C64, C64) {
    let kf = k as f64;
    if fixed {
        return (C64::new(kf, 0.0), C64::new(kf * (kf - 1.0) / 2.0, 0.0));
    }
    if k <= 64 {
        let mut s = ZERO;
        let mut t = ZERO;
        for _ in 0..k {
            t += l * s;
            s = ONE + l * s;
        }
        return (s, t);
    }
    let s = (ONE - lambda_pow(l, k as i64)) / (ONE - l);
    let t = l * (kf - s) / (ONE - l);
    (s, t)
}

#[derive(Debug, Clone)]
struct TranslationPlan {
    c: f64,
    spectral: Spectral,
    n: usize,
}

impl TranslationPlan {
    fn power(&self, k: u64) -> SiegelAffine {
        let sp = &self.spectral;
        let m = sp.eigenvalues.len();
        let mut ck = self.c * k as f64;
        let scaled: Vec<C64> = (0..m)
            .map(|j| {
                let (s, t) = geometric_sums(sp.eigenvalues[j], k, sp.is_fixed(j));
                ck -= 2.0 * sp.coefficients[j].norm_sqr() * t.im;
                sp.coefficients[j] * s
            })
            .collect();
        let a = sp.row_back(&scaled);
        SiegelAffine {
            r: 1.0,
            c: ck,
            aprime: ComplexVector::from_parts(a[0], &a[1..]),
            uprime: sp.unitary_power(k as i64),
        }
        .with_dim(self.n)
    }
}

impl SiegelAffine {
    fn with_dim(self, n: usize) -> Self {
        debug_assert_eq!(self.dim(), n);
        self
    }
}

#[derive(Debug, Clone)]
enum Plan {
    Translation {
        forward: TranslationPlan,
        backward: TranslationPlan,
    },
    Dilation {
        h: SiegelAffine,
        h_inv: SiegelAffine,
        r: f64,
        spectral: Spectral,
    },
}

/// Closed-form powers of a fixed Siegel element.
#[derive(Debug, Clone)]
pub struct SiegelPowers {
    plan: Plan,
}

impl SiegelPowers {
    /// For `r != 1` the element is conjugated by the Heisenberg translation
    /// through its finite fixed point to a pure dilation-rotation.
    pub fn new(g: &SiegelAffine) -> Result<Self> {
        let n = g.dim();
        if (g.r - 1.0).abs() <= 1e-15 {
            let inv = g.inverse();
            let forward = TranslationPlan {
                c: g.c,
                spectral: g.spectral(),
                n,
            };
            let backward = TranslationPlan {
                c: inv.c,
                spectral: inv.spectral(),
                n,
            };
            return Ok(Self {
                plan: Plan::Translation { forward, backward },
            });
        }
        let m = n - 1;
        let r = g.r;
        let a = g.aprime.entries();
        let u = g.uprime.matrix();
        // b' (I - r U') = a'
        let lhs = DMatrix::<C64>::identity(m, m) - u * C64::new(r, 0.0);
        let rhs = nalgebra::DVector::from_column_slice(a);
        let sol = lhs
            .transpose()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::SingularInput("I - r U' is singular".into()))?;
        let b: Vec<C64> = sol.iter().copied().collect();
        let bu: Vec<C64> = g.uprime.apply_row(&b).into_iter().map(|x| x * r).collect();
        let ch = (g.c - 2.0 * row_inner(&bu, a).im) / (1.0 - r * r);
        let h = SiegelAffine {
            r: 1.0,
            c: ch,
            aprime: ComplexVector::from_parts(b[0], &b[1..]),
            uprime: UnitaryMatrix::identity(m),
        };
        let fixed = h.apply_unchecked(&ComplexVector::zeros(n));
        let defect = defect_unchecked(&g.domain(), &fixed);
        let residual = g.apply_unchecked(&fixed).distance(&fixed);
        let scale = fixed.norm_sq().max(1.0);
        if defect > tol::BOUNDARY_POINT * scale || residual > tol::FIXED_POINT_RESIDUAL * scale {
            return Err(Error::NotProperlyDiscontinuousCandidate(defect));
        }
        let h_inv = h.inverse();
        Ok(Self {
            plan: Plan::Dilation {
                h,
                h_inv,
                r,
                spectral: g.spectral(),
            },
        })
    }

    /// Finite fixed point on the boundary for `r != 1`.
    pub fn finite_fixed_point(&self) -> Option<ComplexVector> {
        match &self.plan {
            Plan::Dilation { h, .. } => Some(h.apply_unchecked(&ComplexVector::zeros(h.dim()))),
            Plan::Translation { .. } => None,
        }
    }

    pub fn power(&self, k: i64) -> Result<SiegelAffine> {
        match &self.plan {
            Plan::Translation { forward, backward } => Ok(if k >= 0 {
                forward.power(k as u64)
            } else {
                backward.power(k.unsigned_abs())
            }),
            Plan::Dilation {
                h,
                h_inv,
                r,
                spectral,
            } => {
                let rk = r.powi(k.clamp(i32::MIN as i64, i32::MAX as i64) as i32);
                if !(rk.is_finite() && rk > 0.0) {
                    return Err(Error::NumericalDomain(format!(
                        "r^{k} is not representable"
                    )));
                }
                let n = h.dim();
                let d = SiegelAffine {
                    r: rk,
                    c: 0.0,
                    aprime: ComplexVector::zeros(n - 1),
                    uprime: spectral.unitary_power(k),
                };
                h.compose(&d)?.compose(h_inv)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{cayley, Direction};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> UnitaryMatrix {
        let m = DMatrix::from_fn(n, n, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        UnitaryMatrix::new(m.qr().q()).unwrap()
    }

    fn random_element(rng: &mut ChaCha8Rng, n: usize, r: f64) -> SiegelAffine {
        let a: Vec<C64> = (0..n - 1)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        SiegelAffine::new(
            r,
            rng.gen_range(-2.0..2.0),
            ComplexVector::new(a).unwrap(),
            random_unitary(rng, n - 1),
        )
        .unwrap()
    }

    fn base(n: usize) -> ComplexVector {
        ComplexVector::from_parts(I, &vec![ZERO; n - 1])
    }

    fn iterate(g: &SiegelAffine, k: i64, z: &ComplexVector) -> ComplexVector {
        let step = if k < 0 { g.inverse() } else { g.clone() };
        (0..k.unsigned_abs()).fold(z.clone(), |acc, _| step.apply_unchecked(&acc))
    }

    #[test]
    fn preserves_siegel_defect_up_to_r_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_element(&mut rng, 3, 1.7);
        let z = ComplexVector::new(vec![c(0.3, 2.0), c(0.2, 0.1), c(-0.4, 0.3)]).unwrap();
        let d = SiegelAffine::domain(&g);
        let before = defect_unchecked(&d, &z);
        let after = defect_unchecked(&d, &g.apply_unchecked(&z));
        assert!((after - 2.89 * before).abs() < 1e-12);
    }

    #[test]
    fn compose_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g1 = random_element(&mut rng, 3, 0.8);
        let g2 = random_element(&mut rng, 3, 1.3);
        let z = ComplexVector::new(vec![c(0.1, 1.5), c(0.2, 0.3), c(0.0, -0.4)]).unwrap();
        let seq = g2.apply_unchecked(&g1.apply_unchecked(&z));
        assert!(g2.compose(&g1).unwrap().apply_unchecked(&z).distance(&seq) < 1e-12);
        let id = g1.compose(&g1.inverse()).unwrap();
        assert!(id.max_param_diff(&SiegelAffine::identity(3)) < 1e-13);
    }

    #[test]
    fn dilation_power_matches_closed_form() {
        let (r, cc) = (2.0, 5.0);
        let g = SiegelAffine::dilation(2, r, cc).unwrap();
        for k in -10..=10 {
            let w = g.power(k).unwrap().apply_unchecked(&base(2));
            let r2k = r.powi(2 * k as i32);
            let expected = c(cc * (1.0 - r2k) / (1.0 - r * r), r2k);
            assert!(
                (w.get(0) - expected).norm() <= 1e-12 * expected.norm().max(1.0),
                "k={k}"
            );
            assert_eq!(w.get(1), ZERO);
        }
        assert!(g.power(1).unwrap().max_param_diff(&g) < 1e-15);
    }

    #[test]
    fn unipotent_power_matches_sums() {
        let a = c(0.7, -0.2);
        let g = SiegelAffine::new(
            1.0,
            0.5,
            ComplexVector::new(vec![a]).unwrap(),
            UnitaryMatrix::identity(1),
        )
        .unwrap();
        for k in 0..20i64 {
            let kf = k as f64;
            let w = g.power(k).unwrap().apply_unchecked(&base(2));
            // S_k = k, T_k = k(k - 1)/2
            let first = I
                + (0.5 + I * a.norm_sqr()) * kf
                + I * 2.0 * (kf * (kf - 1.0) / 2.0) * a.norm_sqr();
            assert!((w.get(0) - first).norm() < 1e-10 * first.norm());
            assert!((w.get(1) - a * kf).norm() < 1e-12 * kf.max(1.0));
        }
    }

    #[test]
    fn powers_match_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &r in &[1.0, 1.0, 0.7, 1.6] {
            for n in 2..=3 {
                let g = random_element(&mut rng, n, r);
                let plan = SiegelPowers::new(&g).unwrap();
                for k in -40..=40 {
                    let p = plan.power(k).unwrap().apply_unchecked(&base(n));
                    let q = iterate(&g, k, &base(n));
                    assert!(p.distance(&q) <= 1e-9 * q.norm().max(1.0), "r={r} k={k}");
                }
            }
        }
    }

    #[test]
    fn r_not_one_fixed_point_is_on_the_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_element(&mut rng, 3, 0.6);
        let plan = SiegelPowers::new(&g).unwrap();
        let p = plan.finite_fixed_point().unwrap();
        assert!(defect_unchecked(&g.domain(), &p).abs() < 1e-12);
        assert!(g.apply_unchecked(&p).distance(&p) < 1e-12);
    }

    #[test]
    fn ball_model_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &r in &[1.0, 2.0] {
            let g = random_element(&mut rng, 2, r);
            let b = g.to_ball().unwrap();
            for _ in 0..100 {
                let z = ComplexVector::new(vec![
                    c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)),
                    c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
                ])
                .unwrap();
                let w = cayley(2, Direction::Forward, &z).unwrap();
                let direct = cayley(2, Direction::Inverse, &g.apply_unchecked(&w)).unwrap();
                assert!(b.apply_unchecked(&z).distance(&direct) < 1e-10);
            }
        }
    }

    #[test]
    fn rotated_translation_is_parabolic_in_the_ball() {
        let a = ComplexVector::new(vec![c(0.5, 0.2)]).unwrap();
        let g = SiegelAffine::new(1.0, 0.3, a, UnitaryMatrix::diagonal_phases(&[1.0])).unwrap();
        let class = g.to_ball().unwrap().classify(10_000).unwrap();
        assert_eq!(class.kind, crate::automorphism::AutKind::Parabolic);
        let p = &class.fixed_points[0].point;
        assert!((p.get(0) - c(1.0, 0.0)).norm() < 1e-6);
    }
}
