//! Seeded random draws of generators by case, for property checks and
//! examples.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::automorphism::{AutKind, BallMoebius, BidiscAuto, DiscMoebius, Generator, SiegelAffine};
use crate::domain::{ComplexVector, UnitaryMatrix, C64};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    DiscHyperbolic,
    DiscParabolic,
    SiegelI1,
    SiegelI21,
    SiegelI22,
    SiegelI23,
    SiegelI24,
    /// `(z1 + c + i|a|^2 + 2i e^{i theta} z2 conj(a), e^{i theta} z2 + a)`, `theta != pi`.
    SiegelExample,
    BidiscSwap,
    BidiscProduct,
    /// Random ball automorphism conditioned on not being elliptic.
    BallNonElliptic,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::DiscHyperbolic,
        Family::DiscParabolic,
        Family::SiegelI1,
        Family::SiegelI21,
        Family::SiegelI22,
        Family::SiegelI23,
        Family::SiegelI24,
        Family::SiegelExample,
        Family::BidiscSwap,
        Family::BidiscProduct,
        Family::BallNonElliptic,
    ];
}

fn complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize, norm: f64) -> ComplexVector {
    let v = ComplexVector::new((0..n).map(|_| complex(rng)).collect()).expect("finite");
    let s = v.norm();
    v.scale(C64::new(norm / s, 0.0))
}

/// Point of the ball with `|z| < max` (radius uniform in `[0, max)`).
pub fn random_ball_point<R: Rng>(rng: &mut R, n: usize, max: f64) -> ComplexVector {
    let norm = max * rng.gen::<f64>();
    random_vector(rng, n, norm)
}

/// Haar-distributed unitary from the QR factorisation of a Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> UnitaryMatrix {
    let m = DMatrix::from_fn(n, n, |_, _| complex(rng));
    let qr = m.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            r[(i, i)] / r[(i, i)].norm()
        } else {
            C64::new(0.0, 0.0)
        }
    });
    UnitaryMatrix::reunitarize(q * phases, 1e-9).expect("QR factor is unitary")
}

fn phases_avoiding_one<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    (0..m)
        .map(|_| rng.gen_range(0.3..(std::f64::consts::TAU - 0.3)))
        .collect()
}

pub fn random_disc_hyperbolic<R: Rng>(rng: &mut R) -> DiscMoebius {
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let p = C64::new(sign * rng.gen_range(1.05..3.0), rng.gen_range(-1.5..1.5));
    let q = C64::from_polar(
        (p.norm_sqr() - 1.0).sqrt(),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    DiscMoebius::new(p, q).expect("normalised")
}

pub fn random_disc_parabolic<R: Rng>(rng: &mut R) -> DiscMoebius {
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let t = rng.gen_range(0.2..2.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let p = C64::new(sign, t);
    let q = C64::from_polar(t.abs(), rng.gen_range(0.0..std::f64::consts::TAU));
    DiscMoebius::new(p, q).expect("normalised")
}

fn siegel<R: Rng>(rng: &mut R, family: Family) -> Result<SiegelAffine> {
    let n = rng.gen_range(2..=3);
    let m = n - 1;
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let c = sign * rng.gen_range(0.5..3.0);
    match family {
        Family::SiegelI1 => {
            let r = if rng.gen::<bool>() {
                rng.gen_range(0.5..0.9)
            } else {
                rng.gen_range(1.1..2.0)
            };
            let a = {
                let norm = rng.gen_range(0.0..1.5);
                random_vector(rng, m, norm)
            };
            SiegelAffine::new(r, c, a, random_unitary(rng, m))
        }
        Family::SiegelI21 => {
            SiegelAffine::new(1.0, c, ComplexVector::zeros(m), random_unitary(rng, m))
        }
        Family::SiegelI22 => {
            let a = {
                let norm = rng.gen_range(0.3..1.5);
                random_vector(rng, m, norm)
            };
            SiegelAffine::new(1.0, c, a, UnitaryMatrix::identity(m))
        }
        Family::SiegelI23 => {
            // A single rotated direction with theta away from pi keeps the
            // imaginary part of <a'(I - U')^{-1} U', a'> away from zero.
            let theta: f64 = if rng.gen::<bool>() {
                rng.gen_range(0.4..2.6)
            } else {
                rng.gen_range(3.7..5.9)
            };
            let mut thetas = phases_avoiding_one(rng, m);
            thetas[0] = theta;
            for t in thetas.iter_mut().skip(1) {
                *t = theta;
            }
            let a = {
                let norm = rng.gen_range(0.4..1.5);
                random_vector(rng, m, norm)
            };
            let w_im = 0.5 * a.norm_sq() / (theta / 2.0).tan();
            // keep c - 2 Im w clear of zero
            let c = if (c - 2.0 * w_im).abs() < 0.5 {
                2.0 * w_im + c.signum() * 1.0
            } else {
                c
            };
            SiegelAffine::new(1.0, c, a, UnitaryMatrix::diagonal_phases(&thetas))
        }
        Family::SiegelI24 => {
            if m == 1 {
                let a = {
                    let norm = rng.gen_range(0.3..1.5);
                    random_vector(rng, 1, norm)
                };
                SiegelAffine::new(
                    1.0,
                    c,
                    a,
                    UnitaryMatrix::diagonal_phases(&[std::f64::consts::PI]),
                )
            } else {
                // cot(t1/2) |a1|^2 + cot(t2/2) |a2|^2 = 0
                let t1: f64 = rng.gen_range(0.5..2.8);
                let t2: f64 = rng.gen_range(3.5..5.8);
                let (k1, k2) = ((t1 / 2.0).tan().recip(), (t2 / 2.0).tan().recip());
                let x1 = rng.gen_range(0.3..1.0);
                let x2 = (-k1 * x1 * x1 / k2).sqrt();
                let a = ComplexVector::new(vec![
                    C64::from_polar(x1, rng.gen_range(0.0..TAU)),
                    C64::from_polar(x2, rng.gen_range(0.0..TAU)),
                ])?;
                SiegelAffine::new(1.0, c, a, UnitaryMatrix::diagonal_phases(&[t1, t2]))
            }
        }
        Family::SiegelExample => {
            let theta: f64 = if rng.gen::<bool>() {
                rng.gen_range(0.4..2.6)
            } else {
                rng.gen_range(3.7..5.9)
            };
            let a = complex(rng) * rng.gen_range(0.3..1.0);
            let ceff = |c: f64| c - a.norm_sqr() / (theta / 2.0).tan();
            let c = if ceff(c).abs() < 0.5 {
                c + 2.0 * c.signum()
            } else {
                c
            };
            SiegelAffine::new(
                1.0,
                c,
                ComplexVector::new(vec![a])?,
                UnitaryMatrix::diagonal_phases(&[theta]),
            )
        }
        _ => unreachable!("not a Siegel family"),
    }
}

pub fn draw<R: Rng>(rng: &mut R, family: Family) -> Result<Generator> {
    Ok(match family {
        Family::DiscHyperbolic => Generator::Disc(random_disc_hyperbolic(rng)),
        Family::DiscParabolic => Generator::Disc(random_disc_parabolic(rng)),
        Family::BidiscProduct => Generator::Bidisc(BidiscAuto::new(
            random_disc_hyperbolic(rng),
            random_disc_hyperbolic(rng),
            false,
        )),
        Family::BidiscSwap => loop {
            let b = BidiscAuto::new(
                random_disc_hyperbolic(rng),
                random_disc_hyperbolic(rng),
                true,
            );
            if b.gamma2.compose(&b.gamma1).classify().kind == AutKind::Hyperbolic {
                break Generator::Bidisc(b);
            }
        },
        Family::BallNonElliptic => loop {
            let n = rng.gen_range(2..=3);
            let center = {
                let norm = rng.gen_range(0.3..0.95);
                random_vector(rng, n, norm)
            };
            let m = BallMoebius::new(random_unitary(rng, n), center)?;
            if let Ok(class) = m.classify(10_000) {
                if matches!(class.kind, AutKind::Hyperbolic | AutKind::Parabolic) {
                    break Generator::Ball(m);
                }
            }
        },
        f => Generator::Siegel(siegel(rng, f)?),
    })
}
