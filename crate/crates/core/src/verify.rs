//! Self-checks run by the `verify` command. Each suite measures quantities
//! against pinned thresholds on seeded random draws.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automorphism::ball::phi;
use crate::automorphism::{BallMoebius, DiscMoebius, Generator, SiegelAffine};
use crate::domain::{hermitian_inner, one_minus_sq_norm, ComplexVector, Direction, DomainTag, C64};
use crate::error::Result;
use crate::orbit::{theorem_checks, uniform_convergence_check, Check, TheoremKind, TheoremParams};
use crate::potential::{
    comparison_constant, comparison_residuals, invariant_u, jacobian_ball, jacobian_fd,
    patch_seam_residual, rule7_residual, PatchParams,
};
use crate::samplers::{draw, random_ball_point, random_unitary, random_vector, Family};
use crate::series::{basepoint_transfer, closed_form_verdict, poincare_series, TermForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Powers,
    Defect,
    Verdicts,
    Anchor,
    Bergman,
    Clusters,
    Potential,
    Basepoint,
    Uniformity,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Powers,
        Suite::Defect,
        Suite::Verdicts,
        Suite::Anchor,
        Suite::Bergman,
        Suite::Clusters,
        Suite::Potential,
        Suite::Basepoint,
        Suite::Uniformity,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

pub fn run(suite: Suite, seed: u64) -> Result<VerifyReport> {
    let list: Vec<Suite> = if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    };
    let mut suites = Vec::new();
    for (i, s) in list.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let checks = match s {
            Suite::Powers => powers(&mut rng)?,
            Suite::Defect => defect(&mut rng)?,
            Suite::Verdicts => verdicts(&mut rng)?,
            Suite::Anchor => anchor()?,
            Suite::Bergman => bergman(&mut rng)?,
            Suite::Clusters => clusters(&mut rng)?,
            Suite::Potential => potential(&mut rng)?,
            Suite::Basepoint => basepoint(&mut rng)?,
            Suite::Uniformity => uniformity()?,
            Suite::All => unreachable!(),
        };
        let passed = checks.iter().all(|c| c.passed);
        suites.push(SuiteReport {
            suite: s,
            checks,
            passed,
        });
    }
    let passed = suites.iter().all(|s| s.passed);
    Ok(VerifyReport {
        seed,
        suites,
        passed,
    })
}

/// A point with `|z| < 0.6`, inside every bounded model.
fn interior_point(rng: &mut ChaCha8Rng, gen: &Generator) -> ComplexVector {
    random_ball_point(rng, gen.dim(), 0.6)
}

/// Closed-form powers against iterated application, `|k| <= 40`.
fn powers(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let families = [
        Family::DiscHyperbolic,
        Family::DiscParabolic,
        Family::SiegelI1,
        Family::SiegelI21,
        Family::SiegelI22,
        Family::SiegelI23,
        Family::SiegelI24,
        Family::BidiscSwap,
        Family::BidiscProduct,
    ];
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let gen = draw(rng, families[i % families.len()])?;
        let plan = gen.powers()?;
        let z = interior_point(rng, &gen);
        let start = gen.track(&z)?;
        for dir in [Direction::Forward, Direction::Inverse] {
            let step = gen.stepper(dir)?;
            let sign = if dir == Direction::Forward { 1 } else { -1 };
            let mut t = start.clone();
            for k in 1..=40i64 {
                t = step.step(&t);
                let closed = plan.apply(sign * k, &start)?;
                worst = worst.max(closed.point.distance(&t.point));
            }
        }
    }
    Ok(vec![Check::new(
        "max |closed-form power - iterate|",
        worst,
        1e-9,
    )])
}

/// `1 - |phi_a(z)|^2 = (1 - |a|^2)(1 - |z|^2) / |1 - <z, a>|^2`.
fn defect(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let n = 1 + i % 3;
        let a = random_ball_point(rng, n, 0.99);
        let z = random_ball_point(rng, n, 0.99);
        let lhs = one_minus_sq_norm(&phi(&a, &z)?);
        let rhs = one_minus_sq_norm(&a) * one_minus_sq_norm(&z)
            / (C64::new(1.0, 0.0) - hermitian_inner(&z, &a)?).norm_sqr();
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(vec![Check::new(
        "max defect identity residual",
        worst,
        1e-12,
    )])
}

/// Closed-form verdict against the numeric tail fit, three draws per case.
fn verdicts(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let families = [
        Family::DiscHyperbolic,
        Family::DiscParabolic,
        Family::SiegelI1,
        Family::SiegelI21,
        Family::SiegelI22,
        Family::SiegelI23,
        Family::SiegelI24,
    ];
    let mut out = Vec::new();
    for f in families {
        let mut disagreements = 0;
        for _ in 0..3 {
            let gen = draw(rng, f)?;
            closed_form_verdict(&gen)?;
            let rep = poincare_series(
                &gen,
                &ComplexVector::zeros(gen.dim()),
                1.0,
                TermForm::Gap,
                10_000,
            )?;
            if rep.methods_disagree() {
                disagreements += 1;
            }
        }
        out.push(Check::new(
            &format!("{f:?} closed-form vs numeric disagreements"),
            disagreements as f64,
            0.0,
        ));
    }
    Ok(out)
}

/// `sum_k (1 - |gamma^k(0)|^2)` for the Siegel translation by 2 is `pi coth pi`.
fn anchor() -> Result<Vec<Check>> {
    let gen = Generator::Siegel(SiegelAffine::dilation(2, 1.0, 2.0)?);
    let rep = poincare_series(
        &gen,
        &ComplexVector::zeros(2),
        1.0,
        TermForm::Defect,
        10_000,
    )?;
    let exact = PI / PI.tanh();
    Ok(vec![Check::new(
        "|partial sum - pi coth pi|",
        (rep.total() - exact).abs(),
        1e-3,
    )])
}

fn bergman(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (mut rule7, mut fd): (f64, f64) = (0.0, 0.0);
    for i in 0..200 {
        let n = 1 + i % 3;
        let m = BallMoebius::new(random_unitary(rng, n), random_ball_point(rng, n, 0.9))?;
        let z = random_ball_point(rng, n, 0.9);
        rule7 = rule7.max(rule7_residual(&m, &z)?);
        let exact = jacobian_ball(&m, &z)?;
        fd = fd.max((jacobian_fd(&m, &z, 1e-5)? - exact).abs() / exact);
    }
    Ok(vec![
        Check::new("max kernel transformation residual", rule7, 1e-10),
        Check::new("max relative finite-difference Jacobian error", fd, 1e-6),
    ])
}

fn clusters(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let params = TheoremParams {
        k: 2000,
        ..TheoremParams::default()
    };
    let mut out = Vec::new();
    let mut run = |name: &str, kind: TheoremKind, gen: &Generator| -> Result<()> {
        let rep = theorem_checks(kind, gen, &params)?;
        out.extend(rep.checks.into_iter().map(|mut c| {
            c.name = format!("{name}: {}", c.name);
            c
        }));
        Ok(())
    };
    for i in 0..3 {
        let gen = draw(rng, Family::BallNonElliptic)?;
        run(&format!("ball #{i}"), TheoremKind::T6Ball, &gen)?;
    }
    for i in 0..2 {
        let gen = draw(rng, Family::BidiscSwap)?;
        run(&format!("bidisc #{i}"), TheoremKind::T7Bidisc, &gen)?;
    }
    let weighted = Generator::weighted_dilation(crate::domain::Weights::new(vec![2, 1])?, 2.0)?;
    run("weighted", TheoremKind::WeightedExample, &weighted)?;
    let gen = draw(rng, Family::BallNonElliptic)?;
    run("base points", TheoremKind::Prop2BasepointIndependence, &gen)?;
    Ok(out)
}

fn potential(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    // invariance of u under the generator, within the tail estimates
    let mut worst: f64 = 0.0;
    let mut max_u = f64::NEG_INFINITY;
    for _ in 0..5 {
        let gen = draw(rng, Family::SiegelI1)?;
        let z = interior_point(rng, &gen);
        let u0 = invariant_u(&gen, &z, 400)?;
        let u1 = invariant_u(&gen, &gen.apply(&z)?, 400)?;
        worst = worst.max((u0.value - u1.value).abs() - u0.tail_bound - u1.tail_bound);
        max_u = max_u.max(u0.value);
    }
    out.push(Check::new(
        "u(gamma z) - u(z) beyond tail bounds",
        worst,
        1e-12,
    ));
    out.push(Check::new("max u", max_u, 0.0));
    for (d, b) in [
        (DomainTag::Disc, random_ball_point(rng, 1, 0.5)),
        (DomainTag::Ball { n: 2 }, random_ball_point(rng, 2, 0.5)),
        (DomainTag::Bidisc, random_ball_point(rng, 2, 0.5)),
    ] {
        let p = PatchParams::for_domain(&d, &b, 2000, rng.gen())?;
        let seam = patch_seam_residual(&d, &p, 500, rng.gen())?;
        out.push(Check::new(
            &format!("{d:?} patch seam residual"),
            seam,
            1e-9,
        ));
        let a2 = b.add(&random_vector(rng, b.dim(), 0.05));
        let c = comparison_constant(&d, &b, &a2, 0.2)?;
        let worst = comparison_residuals(&d, &b, &a2, 0.2, c, 500, rng.gen())?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        out.push(Check::new(
            &format!("{d:?} comparison inequality violation"),
            -worst,
            1e-12,
        ));
    }
    Ok(out)
}

fn basepoint(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, f) in [Family::DiscHyperbolic, Family::SiegelI21, Family::SiegelI1]
        .into_iter()
        .enumerate()
    {
        let gen = draw(rng, f)?;
        let a = interior_point(rng, &gen);
        let zs: Vec<ComplexVector> = (0..3).map(|_| interior_point(rng, &gen)).collect();
        let rep = basepoint_transfer(&a, &zs, &gen, 2000)?;
        let failed = rep
            .pairs
            .iter()
            .filter(|p| p.min_lower_slack < 0.0 || p.min_upper_slack < 0.0)
            .count();
        out.push(Check::new(
            &format!("{f:?} #{i} comparison sandwich violations"),
            failed as f64,
            0.0,
        ));
        out.push(Check::new(
            &format!("{f:?} #{i} verdict changes across base points"),
            if rep.verdicts_agree { 0.0 } else { 1.0 },
            0.0,
        ));
    }
    Ok(out)
}

fn uniformity() -> Result<Vec<Check>> {
    let zero = ComplexVector::zeros(2);
    let south = ComplexVector::new(vec![C64::new(-1.0, 0.0), C64::new(0.0, 0.0)])?;
    let north = ComplexVector::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)])?;
    let dil = Generator::Siegel(SiegelAffine::dilation(2, 2.0, 0.0)?);
    let a = uniform_convergence_check(&dil, &zero, &south, 0.5, -40, 10.0, 1e-4)?;
    let par = Generator::Siegel(SiegelAffine::dilation(2, 1.0, 2.0)?);
    let b = uniform_convergence_check(&par, &zero, &north, 0.5, 10_000, 10.0, 1e-4)?;
    let disc = Generator::Disc(DiscMoebius::new(
        C64::new(1.5, 0.0),
        C64::new(1.25f64.sqrt(), 0.0),
    )?);
    let fixed = ComplexVector::new(vec![C64::new(1.0, 0.0)])?;
    let c =
        uniform_convergence_check(&disc, &ComplexVector::zeros(1), &fixed, 0.5, 40, 10.0, 1e-4)?;
    Ok(
        [("dilation", a), ("translation", b), ("disc hyperbolic", c)]
            .into_iter()
            .map(|(name, r)| {
                let threshold = (r.factor * r.value_at_q).max(r.abs_tol);
                Check::new(
                    &format!("{name}: sup over grid of |gamma^k z - p|"),
                    r.sup_over_grid,
                    threshold,
                )
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_suites_pass() {
        for s in [
            Suite::Powers,
            Suite::Defect,
            Suite::Anchor,
            Suite::Bergman,
            Suite::Uniformity,
        ] {
            let rep = run(s, 1).unwrap();
            assert!(rep.passed, "{rep:#?}");
        }
    }
}
