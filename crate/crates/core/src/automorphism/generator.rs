//! A single generator of a cyclic group, in any of the supported
//! representations, with orbit stepping and closed-form powers carried out in
//! the bounded model.

use serde::{Deserialize, Serialize};

use crate::automorphism::ball::BallMoebius;
use crate::automorphism::bidisc::{BidiscAuto, BidiscPowers};
use crate::automorphism::class::{AutClass, AutKind, FixedPoint};
use crate::automorphism::disc::{DiscMoebius, DiscPowers};
use crate::automorphism::siegel::{SiegelAffine, SiegelPowers};
use crate::domain::{
    cayley_forward_unchecked, cayley_inverse_unchecked, defect_unchecked, one_minus_sq_norm,
    principal_pow, ComplexVector, Direction, DomainTag, Weights, C64, I, ONE, ZERO,
};
use crate::error::{Error, Result};
use crate::numerics::one_minus_sum_of_squares;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Generator {
    Disc(DiscMoebius),
    Ball(BallMoebius),
    /// Acts on the Siegel domain; orbits are reported in the unit ball.
    Siegel(SiegelAffine),
    Bidisc(BidiscAuto),
    /// `(w1, w_j) -> (r^tau_1 w1, r^tau_j w_j)` on the weighted Siegel domain,
    /// reported on the weighted ball.
    WeightedDilation {
        weights: Weights,
        r: f64,
    },
}

/// A point of the bounded model with its boundary defect computed without
/// cancellation. For the bidisc both coordinate defects are carried.
#[derive(Debug, Clone, PartialEq)]
pub struct Tracked {
    pub point: ComplexVector,
    pub parts: [f64; 2],
}

impl Tracked {
    pub fn defect(&self) -> f64 {
        self.parts[0].min(self.parts[1])
    }
}

impl Generator {
    pub fn weighted_dilation(weights: Weights, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dilation r = {r} must be positive"
            )));
        }
        Ok(Generator::WeightedDilation { weights, r })
    }

    /// The bounded domain on which orbits are computed.
    pub fn bounded_domain(&self) -> DomainTag {
        match self {
            Generator::Disc(_) => DomainTag::Disc,
            Generator::Ball(b) => DomainTag::Ball { n: b.dim() },
            Generator::Siegel(s) => DomainTag::Ball { n: s.dim() },
            Generator::Bidisc(_) => DomainTag::Bidisc,
            Generator::WeightedDilation { weights, .. } => DomainTag::WeightedBall {
                weights: weights.clone(),
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.bounded_domain().dim()
    }

    pub fn is_identity(&self) -> bool {
        const TOL: f64 = 1e-12;
        match self {
            Generator::Disc(m) => m.is_identity(),
            Generator::Ball(m) => m.is_identity(TOL),
            Generator::Siegel(m) => {
                (m.r() - 1.0).abs() <= TOL
                    && m.c().abs() <= TOL
                    && m.aprime().norm() <= TOL
                    && m.uprime().is_identity(TOL)
            }
            Generator::Bidisc(m) => !m.swap && m.gamma1.is_identity() && m.gamma2.is_identity(),
            Generator::WeightedDilation { r, .. } => (r - 1.0).abs() <= TOL,
        }
    }

    pub fn inverse(&self) -> Generator {
        match self {
            Generator::Disc(m) => Generator::Disc(m.inverse()),
            Generator::Ball(m) => Generator::Ball(m.inverse()),
            Generator::Siegel(m) => Generator::Siegel(m.inverse()),
            Generator::Bidisc(m) => Generator::Bidisc(m.inverse()),
            Generator::WeightedDilation { weights, r } => Generator::WeightedDilation {
                weights: weights.clone(),
                r: 1.0 / r,
            },
        }
    }

    /// Ball-model normal form for the disc, ball and Siegel representations.
    pub fn ball_model(&self) -> Result<BallMoebius> {
        match self {
            Generator::Disc(m) => Ok(m.to_ball()),
            Generator::Ball(m) => Ok(m.clone()),
            Generator::Siegel(m) => m.to_ball(),
            _ => Err(Error::Unsupported(
                "generator does not act on the unit ball".into(),
            )),
        }
    }

    /// Starts tracking a point of the bounded model.
    pub fn track(&self, z: &ComplexVector) -> Result<Tracked> {
        let d = self.bounded_domain();
        if z.dim() != d.dim() {
            return Err(Error::Dimension {
                expected: d.dim(),
                got: z.dim(),
            });
        }
        let parts = match d {
            DomainTag::Bidisc => {
                let f = |c: C64| one_minus_sum_of_squares([c.re, c.im]);
                [f(z.get(0)), f(z.get(1))]
            }
            _ => [defect_unchecked(&d, z), f64::INFINITY],
        };
        if parts[0].min(parts[1]) <= 0.0 {
            return Err(Error::OutsideDomain(format!(
                "{z:?} is not an interior point"
            )));
        }
        Ok(Tracked {
            point: z.clone(),
            parts,
        })
    }

    /// One-step map used for sequential orbits.
    pub fn stepper(&self, direction: Direction) -> Result<Stepper> {
        let g = match direction {
            Direction::Forward => self.clone(),
            Direction::Inverse => self.inverse(),
        };
        Ok(match g {
            Generator::Disc(m) => Stepper::Disc(m),
            Generator::Ball(m) => Stepper::Ball(m),
            Generator::Siegel(m) => Stepper::Ball(m.to_ball()?),
            Generator::Bidisc(m) => Stepper::Bidisc(m),
            Generator::WeightedDilation { weights, r } => {
                Stepper::Weighted(WeightedStep::new(&weights, r, 1))
            }
        })
    }

    pub fn apply(&self, z: &ComplexVector) -> Result<ComplexVector> {
        Ok(self
            .stepper(Direction::Forward)?
            .step(&self.track(z)?)
            .point)
    }

    /// Closed-form powers.
    pub fn powers(&self) -> Result<PowerPlan> {
        Ok(match self {
            Generator::Disc(m) => PowerPlan::Disc(DiscPowers::new(m)),
            Generator::Ball(m) => PowerPlan::Ball(m.clone()),
            Generator::Siegel(m) => PowerPlan::Siegel(SiegelPowers::new(m)?),
            Generator::Bidisc(m) => PowerPlan::Bidisc(BidiscPowers::new(m)),
            Generator::WeightedDilation { weights, r } => PowerPlan::Weighted {
                weights: weights.clone(),
                r: *r,
            },
        })
    }

    pub fn power(&self, k: i64) -> Result<Generator> {
        self.powers()?.element(k)
    }

    /// Classification in the bounded model. The bidisc has no single class;
    /// its components are classified separately.
    pub fn classify(&self, budget: usize) -> Result<AutClass> {
        match self {
            Generator::Disc(m) => Ok(m.classify()),
            Generator::Ball(m) => m.classify(budget),
            Generator::Siegel(m) => m.to_ball()?.classify(budget),
            Generator::Bidisc(_) => Err(Error::Unsupported(
                "classify the bidisc components instead".into(),
            )),
            Generator::WeightedDilation { weights, r } => {
                let n = weights.dim();
                if (r - 1.0).abs() <= 1e-15 {
                    return Ok(AutClass {
                        kind: AutKind::Identity,
                        fixed_points: vec![],
                        disc_eigen: None,
                    });
                }
                let pt = |s: f64| FixedPoint {
                    point: ComplexVector::from_parts(C64::new(s, 0.0), &vec![ZERO; n - 1]),
                    interior: false,
                };
                Ok(AutClass {
                    kind: AutKind::Hyperbolic,
                    fixed_points: vec![pt(1.0), pt(-1.0)],
                    disc_eigen: None,
                })
            }
        }
    }
}

/// Single application in the bounded model with defect update.
#[derive(Debug, Clone)]
pub enum Stepper {
    Disc(DiscMoebius),
    Ball(BallMoebius),
    Bidisc(BidiscAuto),
    Weighted(WeightedStep),
}

impl Stepper {
    pub fn step(&self, t: &Tracked) -> Tracked {
        match self {
            Stepper::Disc(m) => {
                let (w, d) = m.apply_with_defect(t.point.get(0), t.parts[0]);
                Tracked {
                    point: ComplexVector::from_parts(w, &[]),
                    parts: [d, f64::INFINITY],
                }
            }
            Stepper::Ball(m) => {
                let (w, d) = m.apply_with_defect(&t.point, t.parts[0]);
                Tracked {
                    point: w,
                    parts: [d, f64::INFINITY],
                }
            }
            Stepper::Bidisc(m) => {
                let ((w1, w2), (d1, d2)) = m
                    .apply_with_defects((t.point.get(0), t.point.get(1)), (t.parts[0], t.parts[1]));
                Tracked {
                    point: ComplexVector::from_parts(w1, &[w2]),
                    parts: [d1, d2],
                }
            }
            Stepper::Weighted(w) => w.apply(t),
        }
    }
}

/// The weighted dilation by `rho = r^(k tau_1)` written on the weighted ball:
/// with `L = 2 sqrt(rho) / ((rho + 1) + (rho - 1) z1)`,
/// `z1 -> ((rho + 1) z1 + rho - 1) / ((rho - 1) z1 + rho + 1)`,
/// `z_j -> z_j L^(2 tau_j / tau_1)` and the defect scales by `|L|^2`.
#[derive(Debug, Clone)]
pub struct WeightedStep {
    exponents: Vec<f64>,
    /// `sigma = min(rho, 1/rho)` and whether `rho > 1`.
    sigma: f64,
    expanding: bool,
}

impl WeightedStep {
    pub fn new(weights: &Weights, r: f64, k: i64) -> Self {
        let log_rho = k as f64 * weights.tau()[0] as f64 * r.ln();
        let exponents = (1..weights.dim())
            .map(|j| weights.cayley_exponent(j))
            .collect();
        Self {
            exponents,
            sigma: (-log_rho.abs()).exp(),
            expanding: log_rho > 0.0,
        }
    }

    pub fn apply(&self, t: &Tracked) -> Tracked {
        let s = self.sigma;
        let z1 = t.point.get(0);
        // For rho > 1 divide through by rho; for rho < 1 use rho = sigma directly.
        let (a, b) = if self.expanding {
            (1.0 + s, 1.0 - s)
        } else {
            (s + 1.0, s - 1.0)
        };
        let den = z1 * b + a;
        let w1 = (z1 * a + b) / den;
        let l = C64::new(2.0 * s.sqrt(), 0.0) / den;
        let tail: Vec<C64> = t
            .point
            .tail()
            .iter()
            .zip(&self.exponents)
            .map(|(c, &e)| c * principal_pow(l, e))
            .collect();
        Tracked {
            point: ComplexVector::from_parts(w1, &tail),
            parts: [t.parts[0] * l.norm_sqr(), f64::INFINITY],
        }
    }
}

/// Random-access powers of a generator.
#[derive(Debug, Clone)]
pub enum PowerPlan {
    Disc(DiscPowers),
    /// Powers by repeated squaring of the normal form.
    Ball(BallMoebius),
    Siegel(SiegelPowers),
    Bidisc(BidiscPowers),
    Weighted {
        weights: Weights,
        r: f64,
    },
}

impl PowerPlan {
    pub fn element(&self, k: i64) -> Result<Generator> {
        Ok(match self {
            PowerPlan::Disc(p) => Generator::Disc(p.power(k)),
            PowerPlan::Ball(m) => Generator::Ball(m.power(k)?),
            PowerPlan::Siegel(p) => Generator::Siegel(p.power(k)?),
            PowerPlan::Bidisc(p) => Generator::Bidisc(p.power(k)),
            PowerPlan::Weighted { weights, r } => Generator::WeightedDilation {
                weights: weights.clone(),
                r: r.powi(k as i32),
            },
        })
    }

    /// `gamma^k` applied to a tracked point of the bounded model.
    /// Errors when the result is not finite, which happens once a point has
    /// lost all precision against the boundary.
    pub fn apply(&self, k: i64, t: &Tracked) -> Result<Tracked> {
        let out = match self {
            PowerPlan::Disc(p) => {
                let (w, d) = p.apply_power(k, t.point.get(0), t.parts[0]);
                Tracked {
                    point: ComplexVector::from_parts(w, &[]),
                    parts: [d, f64::INFINITY],
                }
            }
            PowerPlan::Ball(m) => {
                let (w, d) = m.power(k)?.apply_with_defect(&t.point, t.parts[0]);
                Tracked {
                    point: w,
                    parts: [d, f64::INFINITY],
                }
            }
            PowerPlan::Bidisc(p) => {
                let ((w1, w2), (d1, d2)) = p.apply_power(
                    k,
                    (t.point.get(0), t.point.get(1)),
                    (t.parts[0], t.parts[1]),
                );
                Tracked {
                    point: ComplexVector::from_parts(w1, &[w2]),
                    parts: [d1, d2],
                }
            }
            PowerPlan::Siegel(p) => {
                let g = p.power(k)?;
                let z = &t.point;
                let den = ONE - z.get(0);
                let w = cayley_forward_unchecked(z);
                let siegel_defect = t.parts[0] / den.norm_sqr();
                let wk = g.apply_unchecked(&w);
                let d = 4.0 * g.r() * g.r() * siegel_defect / (wk.get(0) + I).norm_sqr();
                Tracked {
                    point: cayley_inverse_unchecked(&wk),
                    parts: [d, f64::INFINITY],
                }
            }
            PowerPlan::Weighted { weights, r } => WeightedStep::new(weights, *r, k).apply(t),
        };
        if out.point.entries().iter().any(|c| !c.is_finite())
            || out.parts.iter().any(|d| d.is_nan())
        {
            return Err(Error::NumericalDomain(format!(
                "gamma^{k} of a point with defect {:e} is not finite",
                t.defect()
            )));
        }
        Ok(out)
    }
}

/// Ball defect of a point, `1 - |z|^2`, for points given in the ball model.
pub fn ball_tracked(z: &ComplexVector) -> Tracked {
    Tracked {
        point: z.clone(),
        parts: [one_minus_sq_norm(z), f64::INFINITY],
    }
}
