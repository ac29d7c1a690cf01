//! Green functions, the Bergman kernel of the ball, invariant potentials,
//! finite-difference Levi forms, the plurisubharmonic patch around a pole,
//! comparison constants and barrier functions.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::automorphism::{phi, BallMoebius, Generator, Tracked};
use crate::domain::{
    boundary_defect, boundary_distance, cayley, inner_unchecked, one_minus_sq_norm, ComplexVector,
    Direction, DomainTag, C64, I, ONE,
};
use crate::error::{Error, Result};
use crate::numerics::CompensatedSum;
use crate::orbit::{ray_stalls, rays};
use crate::series::{green_domain, numeric_verdict, Verdict};
use crate::tol;

fn interior_defect(d: &DomainTag, z: &ComplexVector) -> Result<f64> {
    let defect = boundary_defect(d, z)?;
    if !(defect > 0.0) {
        return Err(Error::OutsideDomain(format!(
            "{z:?} is not an interior point (defect {defect:e})"
        )));
    }
    Ok(defect)
}

/// `log |phi_w(z)|` on the ball; near the boundary it is evaluated as
/// `log(1 - D) / 2` with `D = (1 - |z|^2)(1 - |w|^2) / |1 - <z, w>|^2`.
fn ball_green(z: &ComplexVector, w: &ComplexVector, dz: f64, dw: f64) -> Result<f64> {
    if z == w {
        return Ok(f64::NEG_INFINITY);
    }
    let den = (ONE - inner_unchecked(z, w)).norm_sqr();
    let d = dz * dw / den;
    if d < 0.5 {
        return Ok(0.5 * (-d).ln_1p());
    }
    Ok(phi(w, z)?.norm().ln())
}

/// Pluricomplex Green function `g(z, w)` with pole `w`; `-inf` at `z = w`.
/// Disc and ball: `log |phi_w(z)|`. Bidisc: the larger coordinate Green
/// function. Siegel domain: transported from the ball by the Cayley transform.
pub fn green(d: &DomainTag, z: &ComplexVector, w: &ComplexVector) -> Result<f64> {
    match d {
        DomainTag::Disc | DomainTag::Ball { .. } => {
            let dz = interior_defect(d, z)?;
            let dw = interior_defect(d, w)?;
            ball_green(z, w, dz, dw)
        }
        DomainTag::Bidisc => {
            interior_defect(d, z)?;
            interior_defect(d, w)?;
            let mut g = f64::NEG_INFINITY;
            for j in 0..2 {
                let zj = ComplexVector::from_parts(z.get(j), &[]);
                let wj = ComplexVector::from_parts(w.get(j), &[]);
                g = g.max(ball_green(
                    &zj,
                    &wj,
                    one_minus_sq_norm(&zj),
                    one_minus_sq_norm(&wj),
                )?);
            }
            Ok(g)
        }
        DomainTag::Siegel { n } => {
            interior_defect(d, z)?;
            interior_defect(d, w)?;
            let zb = cayley(*n, Direction::Inverse, z)?;
            let wb = cayley(*n, Direction::Inverse, w)?;
            green(&DomainTag::Ball { n: *n }, &zb, &wb)
        }
        _ => Err(Error::Unsupported(
            "no closed-form Green function on weighted domains".into(),
        )),
    }
}

/// `g(z, w)` for an orbit point carrying its own defects, which stay
/// accurate after the point itself has rounded onto the boundary.
pub(crate) fn green_tracked(d: &DomainTag, t: &Tracked, w: &ComplexVector) -> Result<f64> {
    match d {
        DomainTag::Disc | DomainTag::Ball { .. } => {
            let dw = interior_defect(d, w)?;
            ball_green(&t.point, w, t.parts[0], dw)
        }
        DomainTag::Bidisc => {
            interior_defect(d, w)?;
            let mut g = f64::NEG_INFINITY;
            for j in 0..2 {
                let zj = ComplexVector::from_parts(t.point.get(j), &[]);
                let wj = ComplexVector::from_parts(w.get(j), &[]);
                g = g.max(ball_green(&zj, &wj, t.parts[j], one_minus_sq_norm(&wj))?);
            }
            Ok(g)
        }
        _ => green(d, &t.point, w),
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `K(z) = n! / (pi^n (1 - |z|^2)^{n+1})`.
pub fn bergman_kernel_ball(z: &ComplexVector) -> Result<f64> {
    let n = z.dim();
    let d = interior_defect(&DomainTag::Ball { n }, z)?;
    Ok(factorial(n) / (std::f64::consts::PI.powi(n as i32) * d.powi(n as i32 + 1)))
}

/// `|j_gamma(z)| = (1 - |a|^2)^{(n+1)/2} / |1 - <z, a>|^{n+1}` for `gamma = U phi_a`.
pub fn jacobian_ball(m: &BallMoebius, z: &ComplexVector) -> Result<f64> {
    interior_defect(&DomainTag::Ball { n: m.dim() }, z)?;
    Ok(m.jacobian_abs(z))
}

/// `|det J|` from central differences of the map with step `h`.
pub fn jacobian_fd(m: &BallMoebius, z: &ComplexVector, h: f64) -> Result<f64> {
    let n = m.dim();
    interior_defect(&DomainTag::Ball { n }, z)?;
    let mut jac = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        let e = ComplexVector::basis(n, j).scale(C64::new(h, 0.0));
        let plus = m.apply(&z.add(&e))?;
        let minus = m.apply(&z.sub(&e))?;
        for i in 0..n {
            jac[(i, j)] = (plus.get(i) - minus.get(i)) / (2.0 * h);
        }
    }
    Ok(jac.determinant().norm())
}

/// `|K(z) - K(gamma z) |j_gamma(z)|^2| / K(z)`, evaluated as
/// `|1 - ((1 - |z|^2) / (1 - |gamma z|^2))^{n+1} |j_gamma(z)|^2|`.
pub fn rule7_residual(m: &BallMoebius, z: &ComplexVector) -> Result<f64> {
    let n = m.dim();
    let dz = interior_defect(&DomainTag::Ball { n }, z)?;
    let gz = m.apply(z)?;
    let dgz = interior_defect(&DomainTag::Ball { n }, &gz)?;
    let j = m.jacobian_abs(z);
    Ok((1.0 - (dz / dgz).powi(n as i32 + 1) * j * j).abs())
}

/// A truncated potential: value (possibly `-inf`), truncation and an
/// estimate of the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialValue {
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub value: f64,
    pub truncation: usize,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub tail_bound: f64,
    #[serde(with = "crate::serde_ext::extended_f64_opt", default)]
    pub min_term: Option<f64>,
}

/// Tail estimate for nonnegative folded terms `t_1..t_K` whose sum has been
/// taken: geometric when the tail ratios stay below 0.99, otherwise from the
/// fitted power law `k^{-alpha}`; plus an allowance for rounding.
fn tail_estimate(folded: &[f64], max_term: f64) -> Result<f64> {
    let k = folded.len();
    let rounding = 1e-15 * (2 * k + 1) as f64 * max_term;
    let Some(&last) = folded.last() else {
        return Ok(f64::INFINITY);
    };
    if last == 0.0 {
        return Ok(rounding);
    }
    let fit = numeric_verdict(folded);
    if fit.verdict == Verdict::Diverges {
        return Err(Error::DivergentPotential(format!(
            "terms decay like k^{:.3}",
            fit.slope.unwrap_or(0.0)
        )));
    }
    if let Some(rho) = fit.ratio {
        if rho <= tol::GEOMETRIC_RATIO {
            return Ok(last * rho / (1.0 - rho) + rounding);
        }
    }
    match fit.slope {
        Some(s) if s < -1.0 => Ok(last * k as f64 / (-s - 1.0) + rounding),
        Some(_) => Ok(f64::INFINITY),
        None => {
            // Too few terms for a fit: fall back on the last ratio.
            let rho = if k >= 2 && folded[k - 2] > 0.0 {
                last / folded[k - 2]
            } else {
                1.0
            };
            if rho < 1.0 {
                Ok(last * rho / (1.0 - rho) + rounding)
            } else {
                Ok(f64::INFINITY)
            }
        }
    }
}

fn require_ball_like(gen: &Generator) -> Result<()> {
    match gen {
        Generator::Disc(_) | Generator::Ball(_) | Generator::Siegel(_) => Ok(()),
        _ => Err(Error::Unsupported(
            "the invariant potential is defined for groups acting on the ball".into(),
        )),
    }
}

/// `u(z) = sum_{|k| <= K} (|gamma^{-k}(z)|^2 - 1)`, each term the negated
/// defect carried along the orbit.
pub fn invariant_u(gen: &Generator, z: &ComplexVector, k_max: usize) -> Result<PotentialValue> {
    require_ball_like(gen)?;
    if gen.is_identity() {
        // The trivial group has the single term |z|^2 - 1.
        let d = gen.track(z)?.defect();
        return Ok(PotentialValue {
            value: -d,
            truncation: 0,
            tail_bound: 0.0,
            min_term: None,
        });
    }
    let r = rays(gen, z, k_max)?;
    if ray_stalls(&r.forward) && ray_stalls(&r.backward) {
        return Err(Error::DivergentPotential(
            "orbit does not approach the boundary".into(),
        ));
    }
    let folded: Vec<f64> = (1..=k_max)
        .map(|k| r.forward[k].defect() + r.backward[k].defect())
        .collect();
    let mut acc = CompensatedSum::new();
    acc.add(r.forward[0].defect());
    folded.iter().for_each(|t| acc.add(*t));
    let max_term = folded.iter().copied().fold(r.forward[0].defect(), f64::max);
    let tail_bound = tail_estimate(&folded, max_term)?;
    Ok(PotentialValue {
        value: -acc.value(),
        truncation: k_max,
        tail_bound,
        min_term: None,
    })
}

/// Terms below this are treated as hitting the pole: `|phi_a(gamma^k z)|`
/// is then within rounding of zero.
const POLE_THRESHOLD: f64 = -29.0;

/// `sum_{|k| <= K} g(gamma^k(z), a)` in the bounded model, `-inf` when `z` is
/// on the orbit of `a` up to rounding. `min_term` is the most negative term.
pub fn green_orbit_potential(
    gen: &Generator,
    a: &ComplexVector,
    z: &ComplexVector,
    k_max: usize,
) -> Result<PotentialValue> {
    let domain = green_domain(gen)?;
    let r = rays(gen, z, k_max)?;
    if !gen.is_identity() && ray_stalls(&r.forward) && ray_stalls(&r.backward) {
        return Err(Error::DivergentPotential(
            "orbit does not approach the boundary".into(),
        ));
    }
    let g = |t: &Tracked| green_tracked(&domain, t, a);
    let g0 = g(&r.forward[0])?;
    let mut folded = Vec::with_capacity(k_max);
    let mut min_term = g0;
    for k in 1..=k_max {
        let (x, y) = (g(&r.forward[k])?, g(&r.backward[k])?);
        min_term = min_term.min(x).min(y);
        folded.push(-(x + y));
    }
    if min_term <= POLE_THRESHOLD {
        return Ok(PotentialValue {
            value: f64::NEG_INFINITY,
            truncation: k_max,
            tail_bound: 0.0,
            min_term: Some(f64::NEG_INFINITY),
        });
    }
    let tail_bound = if k_max == 0 || gen.is_identity() {
        0.0
    } else {
        tail_estimate(&folded, folded.iter().copied().fold(-g0, f64::max))?
    };
    let mut acc = CompensatedSum::new();
    acc.add(g0);
    folded.iter().for_each(|t| acc.add(-t));
    Ok(PotentialValue {
        value: acc.value(),
        truncation: k_max,
        tail_bound,
        min_term: Some(min_term),
    })
}

/// Step and orthonormal directions for finite-difference Levi forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeviProbe {
    h: f64,
    basis: Vec<ComplexVector>,
}

impl LeviProbe {
    /// Orthonormalises `basis` (Gram-Schmidt); it must span `C^n`.
    pub fn new(h: f64, basis: Vec<ComplexVector>) -> Result<Self> {
        if !(1e-6..=1e-2).contains(&h) {
            return Err(Error::InvalidParameter(format!(
                "step h = {h} outside [1e-6, 1e-2]"
            )));
        }
        let n = basis.first().map(|v| v.dim()).unwrap_or(0);
        if n == 0 || basis.len() != n || basis.iter().any(|v| v.dim() != n) {
            return Err(Error::InvalidParameter(
                "basis must consist of n vectors in C^n".into(),
            ));
        }
        let mut ortho: Vec<ComplexVector> = Vec::with_capacity(n);
        for v in &basis {
            let mut w = v.clone();
            for u in &ortho {
                w = w.sub(&u.scale(inner_unchecked(&w, u)));
            }
            let norm = w.norm();
            if norm <= 1e-10 * v.norm().max(1e-300) {
                return Err(Error::InvalidParameter("basis does not span C^n".into()));
            }
            ortho.push(w.scale(C64::new(1.0 / norm, 0.0)));
        }
        Ok(Self { h, basis: ortho })
    }

    pub fn standard(n: usize) -> Self {
        Self {
            h: tol::DEFAULT_STEP,
            basis: (0..n).map(|j| ComplexVector::basis(n, j)).collect(),
        }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn basis(&self) -> &[ComplexVector] {
        &self.basis
    }

    pub fn with_step(&self, h: f64) -> Result<Self> {
        Self::new(h, self.basis.clone())
    }
}

/// `d^2/dzeta dzetabar f(z + zeta v)` at `zeta = 0` from the five-point
/// Laplacian, which is a quarter of the Laplacian in `zeta`.
fn directional_levi<F>(f: &F, z: &ComplexVector, v: &ComplexVector, h: f64, f0: f64) -> Result<f64>
where
    F: Fn(&ComplexVector) -> Result<f64>,
{
    let mut acc = CompensatedSum::new();
    for step in [C64::new(h, 0.0), C64::new(-h, 0.0), I * h, -I * h] {
        let p = z.add(&v.scale(step));
        let val = f(&p).map_err(|e| match e {
            Error::OutsideDomain(_) | Error::NumericalDomain(_) | Error::SingularInput(_) => {
                Error::Stencil(format!("{p:?}"))
            }
            other => other,
        })?;
        if !val.is_finite() {
            return Err(Error::Stencil(format!("{p:?} (value {val})")));
        }
        acc.add(val);
    }
    acc.add(-4.0 * f0);
    Ok(acc.value() / (4.0 * h * h))
}

/// Hermitian matrix `H_jk = d^2 f / dz_j dzbar_k` in the probe basis, by
/// polarisation of directional Levi forms. Truncation error is `O(h^2)`.
pub fn levi_form<F>(f: &F, z: &ComplexVector, probe: &LeviProbe) -> Result<DMatrix<C64>>
where
    F: Fn(&ComplexVector) -> Result<f64>,
{
    let n = probe.basis.len();
    if z.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: z.dim(),
        });
    }
    let f0 = f(z)?;
    if !f0.is_finite() {
        return Err(Error::Stencil(format!("{z:?} (value {f0})")));
    }
    let h = probe.h;
    let e = &probe.basis;
    let diag: Vec<f64> = e
        .iter()
        .map(|v| directional_levi(f, z, v, h, f0))
        .collect::<Result<_>>()?;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = C64::new(diag[j], 0.0);
        for k in j + 1..n {
            let re = (directional_levi(f, z, &e[j].add(&e[k]), h, f0)? - diag[j] - diag[k]) / 2.0;
            let im =
                (directional_levi(f, z, &e[j].add(&e[k].scale(I)), h, f0)? - diag[j] - diag[k])
                    / 2.0;
            m[(j, k)] = C64::new(re, im);
            m[(k, j)] = C64::new(re, -im);
        }
    }
    Ok(m)
}

/// Smallest eigenvalue of the finite-difference Levi form.
pub fn levi_min_eigen<F>(f: &F, z: &ComplexVector, probe: &LeviProbe) -> Result<f64>
where
    F: Fn(&ComplexVector) -> Result<f64>,
{
    let m = levi_form(f, z, probe)?;
    Ok(m.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeviReport {
    pub min_eigen: f64,
    pub min_eigen_half_step: f64,
    /// `(4 lambda(h/2) - lambda(h)) / 3`.
    pub extrapolated: f64,
    /// Set when the two steps differ by more than ten times `tolerance`.
    pub flagged: bool,
}

pub fn levi_report<F>(
    f: &F,
    z: &ComplexVector,
    probe: &LeviProbe,
    tolerance: f64,
) -> Result<LeviReport>
where
    F: Fn(&ComplexVector) -> Result<f64>,
{
    let a = levi_min_eigen(f, z, probe)?;
    let half = LeviProbe {
        h: probe.h / 2.0,
        basis: probe.basis.clone(),
    };
    let b = levi_min_eigen(f, z, &half)?;
    Ok(LeviReport {
        min_eigen: a,
        min_eigen_half_step: b,
        extrapolated: (4.0 * b - a) / 3.0,
        flagged: (a - b).abs() > 10.0 * tolerance,
    })
}

/// Constants of the patch around the pole `b`: in the chart
/// `zeta = (z - b) / R`, `c1 <= g(z, b) - log |zeta| <= c2` on `|zeta| <= 1`
/// and `log r <= 2 (c1 - c2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchParams {
    pub c1: f64,
    pub c2: f64,
    pub r: f64,
    pub b: ComplexVector,
    pub chart_radius: f64,
}

const PATCH_MARGIN: f64 = 1e-3;

impl PatchParams {
    pub fn new(c1: f64, c2: f64, r: f64, b: ComplexVector, chart_radius: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite() && c1 <= c2) {
            return Err(Error::PatchParam(format!(
                "need c1 <= c2, got {c1} and {c2}"
            )));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::PatchParam(format!("r = {r} outside (0, 1)")));
        }
        if r.ln() > 2.0 * (c1 - c2) + 1e-15 {
            return Err(Error::PatchParam(format!(
                "log r = {} exceeds 2 (c1 - c2) = {}",
                r.ln(),
                2.0 * (c1 - c2)
            )));
        }
        if !(chart_radius > 0.0 && chart_radius.is_finite()) {
            return Err(Error::PatchParam(format!(
                "chart radius {chart_radius} must be positive"
            )));
        }
        Ok(Self {
            c1,
            c2,
            r,
            b,
            chart_radius,
        })
    }

    /// Chart of half the boundary distance at `b`; `c1`, `c2` from the sampled
    /// range of `g(z, b) - log |zeta|` over the closed chart ball, widened by
    /// `1e-3`; `r = min(1/2, exp(2 (c1 - c2)))`.
    pub fn for_domain(d: &DomainTag, b: &ComplexVector, samples: usize, seed: u64) -> Result<Self> {
        if !d.is_bounded() {
            return Err(Error::Unsupported(
                "patch charts are built on bounded models".into(),
            ));
        }
        let radius = 0.5 * boundary_distance(d, b)?;
        if !(radius > 0.0) {
            return Err(Error::PatchParam("pole must be an interior point".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = b.dim();
        // log10 of the chart radius ranges over [-6, 0].
        let eval = |u: &ComplexVector, s: f64| -> Result<f64> {
            let t = 10f64.powf(s);
            Ok(green(d, &b.add(&u.scale(C64::new(t * radius, 0.0))), b)? - t.ln())
        };
        let mut best_lo = (f64::INFINITY, ComplexVector::zeros(n), 0.0);
        let mut best_hi = (f64::NEG_INFINITY, ComplexVector::zeros(n), 0.0);
        for i in 0..samples.max(16) {
            let u = random_unit(&mut rng, n);
            let s = if i % 4 == 0 {
                0.0
            } else {
                -6.0 * rng.gen::<f64>()
            };
            let val = eval(&u, s)?;
            if val < best_lo.0 {
                best_lo = (val, u.clone(), s);
            }
            if val > best_hi.0 {
                best_hi = (val, u, s);
            }
        }
        let lo = -polish(best_lo, &|u, s| eval(u, s).map(|v| -v), &mut rng, true)?;
        let hi = polish(best_hi, &eval, &mut rng, false)?;
        let c1 = lo - PATCH_MARGIN;
        let c2 = hi + PATCH_MARGIN;
        let r = (2.0 * (c1 - c2)).exp().min(0.5);
        Self::new(c1, c2, r, b.clone(), radius)
    }

    pub fn zeta_norm(&self, z: &ComplexVector) -> f64 {
        z.distance(&self.b) / self.chart_radius
    }
}

/// Local random search for the maximum of `f(u, s)` over unit `u` and
/// `s` in `[-6, 0]`, from a starting sample.
fn polish<F>(
    start: (f64, ComplexVector, f64),
    f: &F,
    rng: &mut ChaCha8Rng,
    negated: bool,
) -> Result<f64>
where
    F: Fn(&ComplexVector, f64) -> Result<f64>,
{
    let (mut best, mut u, mut s) = start;
    if negated {
        best = -best;
    }
    let n = u.dim();
    let mut step = 0.1;
    while step > 1e-9 {
        let cand_u = u.add(&random_unit(rng, n).scale(C64::new(step, 0.0)));
        let cand_u = cand_u.scale(C64::new(1.0 / cand_u.norm(), 0.0));
        let cand_s = (s + step * 6.0 * (rng.gen::<f64>() - 0.5)).clamp(-6.0, 0.0);
        let v = f(&cand_u, cand_s)?;
        if v > best {
            (best, u, s) = (v, cand_u, cand_s);
        } else {
            step *= 0.995;
        }
    }
    Ok(best)
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let v = ComplexVector::new(v).expect("finite");
        let norm = v.norm();
        if norm > 1e-8 {
            return v.scale(C64::new(1.0 / norm, 0.0));
        }
    }
}

/// The patched function `v`: `log |zeta|` for `|zeta| < r`,
/// `max(log |zeta|, 2 (g - c1))` for `r <= |zeta| <= 1` and `2 (g - c1)` beyond.
pub fn patch_v(d: &DomainTag, params: &PatchParams, z: &ComplexVector) -> Result<f64> {
    let s = params.zeta_norm(z);
    if s < params.r {
        interior_defect(d, z)?;
        return Ok(s.ln());
    }
    let outer = 2.0 * (green(d, z, &params.b)? - params.c1);
    if s <= 1.0 {
        Ok(s.ln().max(outer))
    } else {
        Ok(outer)
    }
}

/// `rho = exp(2 v)`; equals `|zeta|^2` on `|zeta| < r` and is bounded by
/// `exp(-4 c1)`.
pub fn psh_patch(d: &DomainTag, params: &PatchParams, z: &ComplexVector) -> Result<f64> {
    let checked = PatchParams::new(
        params.c1,
        params.c2,
        params.r,
        params.b.clone(),
        params.chart_radius,
    )?;
    Ok((2.0 * patch_v(d, &checked, z)?).exp())
}

/// Largest jump of `v` across the seams `|zeta| = r` and `|zeta| = 1`,
/// comparing `v` at relative offsets `1 -+ 1e-12` on `samples` directions each.
pub fn patch_seam_residual(
    d: &DomainTag,
    params: &PatchParams,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.b.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = random_unit(&mut rng, n);
        for seam in [params.r, 1.0] {
            let at = |t: f64| {
                params
                    .b
                    .add(&u.scale(C64::new(t * params.chart_radius, 0.0)))
            };
            let inside = patch_v(d, params, &at(seam * (1.0 - 1e-12)))?;
            let outside = patch_v(d, params, &at(seam * (1.0 + 1e-12)))?;
            worst = worst.max((inside - outside).abs());
        }
    }
    Ok(worst)
}

fn check_subdomain(
    d: &DomainTag,
    a: &ComplexVector,
    a2: &ComplexVector,
    radius: f64,
) -> Result<()> {
    if !matches!(
        d,
        DomainTag::Disc | DomainTag::Ball { .. } | DomainTag::Bidisc
    ) {
        return Err(Error::Unsupported(
            "comparison constants are sampled on the disc, ball and bidisc".into(),
        ));
    }
    if a == a2 {
        return Err(Error::PatchParam("poles must differ".into()));
    }
    if !(radius > 0.0) || a2.distance(a) >= radius {
        return Err(Error::PatchParam(
            "the subdomain must contain both poles".into(),
        ));
    }
    if boundary_distance(d, a)? <= radius {
        return Err(Error::PatchParam(
            "the subdomain must lie inside the domain".into(),
        ));
    }
    Ok(())
}

/// `C = sup(-g(z, a)) / inf(-g(z, a'))` over `|z - a| = radius`, from at least
/// `10^4` sphere samples (including the directions `+-(a' - a)`) followed by
/// a local search around the extremal samples.
pub fn comparison_constant(
    d: &DomainTag,
    a: &ComplexVector,
    a2: &ComplexVector,
    radius: f64,
) -> Result<f64> {
    check_subdomain(d, a, a2, radius)?;
    let n = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let diff = a2.sub(a);
    let axis = diff.scale(C64::new(1.0 / diff.norm(), 0.0));
    let mut dirs = vec![axis.clone(), axis.scale(C64::new(-1.0, 0.0))];
    dirs.extend((0..10_000).map(|_| random_unit(&mut rng, n)));
    let at = |u: &ComplexVector| a.add(&u.scale(C64::new(radius, 0.0)));
    let neg_ga = |u: &ComplexVector| green(d, &at(u), a).map(|g| -g);
    let neg_ga2 = |u: &ComplexVector| green(d, &at(u), a2).map(|g| -g);
    let sup = refine(&dirs, &neg_ga, 1.0, &mut rng)?;
    let inf = -refine(&dirs, &|u| neg_ga2(u).map(|v| -v), 1.0, &mut rng)?;
    if !(inf > 0.0) {
        return Err(Error::PatchParam("the sphere meets the second pole".into()));
    }
    Ok(sup / inf)
}

/// Maximum of `f` over unit directions: best sample, then random tangent
/// steps with a shrinking step.
fn refine<F>(dirs: &[ComplexVector], f: &F, step0: f64, rng: &mut ChaCha8Rng) -> Result<f64>
where
    F: Fn(&ComplexVector) -> Result<f64>,
{
    let mut best = dirs[0].clone();
    let mut best_val = f(&best)?;
    for u in &dirs[1..] {
        let v = f(u)?;
        if v > best_val {
            best_val = v;
            best = u.clone();
        }
    }
    let n = best.dim();
    let mut step = 0.05 * step0;
    for _ in 0..400 {
        let cand = best.add(&random_unit(rng, n).scale(C64::new(step, 0.0)));
        let cand = cand.scale(C64::new(1.0 / cand.norm(), 0.0));
        let v = f(&cand)?;
        if v > best_val {
            best_val = v;
            best = cand;
        } else {
            step *= 0.97;
        }
    }
    Ok(best_val)
}

/// `g(z, a) - C g(z, a')` at `count` random points of the domain outside
/// `|z - a| <= radius`; the comparison inequality asserts these are nonnegative.
pub fn comparison_residuals(
    d: &DomainTag,
    a: &ComplexVector,
    a2: &ComplexVector,
    radius: f64,
    c: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_subdomain(d, a, a2, radius)?;
    let n = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = match d {
            DomainTag::Bidisc => {
                let mut coord = || {
                    let u = random_unit(&mut rng, 1);
                    u.get(0) * rng.gen::<f64>().sqrt() * (1.0 - 1e-9)
                };
                let z1 = coord();
                let z2 = coord();
                ComplexVector::from_parts(z1, &[z2])
            }
            _ => {
                let u = random_unit(&mut rng, n);
                let t = rng.gen::<f64>().powf(1.0 / (2 * n) as f64) * (1.0 - 1e-9);
                u.scale(C64::new(t, 0.0))
            }
        };
        if z.distance(a) <= radius {
            continue;
        }
        out.push(green(d, &z, a)? - c * green(d, &z, a2)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BarrierKind {
    /// `Re <z, p> - 1` for `p` on the unit sphere.
    BallLinear { p: ComplexVector },
    /// `|z1|^2 - 1` on the weighted ball.
    WeightedExample,
    /// `sum_p log(|z - p| / D)` with `D` the diameter bound of the domain.
    ClusterWitness {
        points: Vec<ComplexVector>,
        domain: DomainTag,
    },
}

pub fn barrier_witness(kind: &BarrierKind, z: &ComplexVector) -> Result<f64> {
    match kind {
        BarrierKind::BallLinear { p } => {
            if p.dim() != z.dim() {
                return Err(Error::Dimension {
                    expected: p.dim(),
                    got: z.dim(),
                });
            }
            if (p.norm_sq() - 1.0).abs() > tol::BOUNDARY_POINT {
                return Err(Error::PatchParam("p must lie on the unit sphere".into()));
            }
            Ok(inner_unchecked(z, p).re - 1.0)
        }
        BarrierKind::WeightedExample => {
            if z.dim() == 0 {
                return Err(Error::Dimension {
                    expected: 1,
                    got: 0,
                });
            }
            Ok(z.get(0).norm_sqr() - 1.0)
        }
        BarrierKind::ClusterWitness { points, domain } => {
            let diam = domain.diameter_bound();
            if !diam.is_finite() {
                return Err(Error::Unsupported(
                    "cluster witnesses need a bounded domain".into(),
                ));
            }
            let mut acc = 0.0;
            for p in points {
                let defect = boundary_defect(domain, p)?;
                if defect.abs() > tol::BOUNDARY_POINT {
                    return Err(Error::PatchParam(format!("{p:?} is not a boundary point")));
                }
                if p.dim() != z.dim() {
                    return Err(Error::Dimension {
                        expected: p.dim(),
                        got: z.dim(),
                    });
                }
                acc += (z.distance(p) / diam).ln();
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::{DiscMoebius, SiegelAffine};
    use crate::domain::UnitaryMatrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn v(e: &[(f64, f64)]) -> ComplexVector {
        ComplexVector::new(e.iter().map(|&(x, y)| c(x, y)).collect()).unwrap()
    }

    fn random_ball_point(rng: &mut ChaCha8Rng, n: usize, max: f64) -> ComplexVector {
        random_unit(rng, n).scale(c(max * rng.gen::<f64>(), 0.0))
    }

    #[test]
    fn disc_green_basics() {
        let z = v(&[(0.3, -0.4)]);
        let g = green(&DomainTag::Disc, &z, &ComplexVector::zeros(1)).unwrap();
        assert!((g - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(green(&DomainTag::Disc, &z, &z).unwrap(), f64::NEG_INFINITY);
        assert!(matches!(
            green(&DomainTag::Disc, &v(&[(1.0, 0.0)]), &z),
            Err(Error::OutsideDomain(_))
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let (a, b) = (
                random_ball_point(&mut rng, 1, 0.999),
                random_ball_point(&mut rng, 1, 0.999),
            );
            let (x, y) = (
                green(&DomainTag::Disc, &a, &b).unwrap(),
                green(&DomainTag::Disc, &b, &a).unwrap(),
            );
            assert!((x - y).abs() <= 1e-13 * x.abs().max(1.0));
        }
    }

    #[test]
    fn ball_green_increases_to_zero_near_the_boundary() {
        let d = DomainTag::Ball { n: 2 };
        let w = v(&[(0.2, 0.1), (-0.3, 0.0)]);
        let dir = w.scale(c(1.0 / w.norm(), 0.0));
        let mut prev = f64::NEG_INFINITY;
        for t in [0.9, 0.95, 0.99, 0.999, 0.999_999] {
            let g = green(&d, &dir.scale(c(t, 0.0)), &w).unwrap();
            assert!(g < 0.0 && g > prev);
            prev = g;
        }
        assert!(prev > -1e-5);
    }

    #[test]
    fn green_is_invariant_and_has_a_log_pole() {
        let d = DomainTag::Ball { n: 2 };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = BallMoebius::new(
            UnitaryMatrix::diagonal_phases(&[0.3, 1.1]),
            v(&[(0.3, 0.2), (0.1, -0.5)]),
        )
        .unwrap();
        for _ in 0..200 {
            let (z, w) = (
                random_ball_point(&mut rng, 2, 0.95),
                random_ball_point(&mut rng, 2, 0.95),
            );
            let g = green(&d, &z, &w).unwrap();
            let h = green(&d, &m.apply(&z).unwrap(), &m.apply(&w).unwrap()).unwrap();
            assert!((g - h).abs() < 1e-11);
        }
        let w = v(&[(0.4, 0.0), (0.0, 0.3)]);
        let mut spread = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 3..12 {
            let t = 10f64.powi(-k);
            let z = w.add(&random_unit(&mut rng, 2).scale(c(t, 0.0)));
            let diff = green(&d, &z, &w).unwrap() - t.ln();
            spread = (spread.0.min(diff), spread.1.max(diff));
        }
        assert!(spread.1 - spread.0 < 2.0);
    }

    #[test]
    fn bidisc_green_dominates_the_embedded_disc() {
        // F(z) = (z, z/2) maps the disc into the bidisc.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (z, w) = (
                random_ball_point(&mut rng, 1, 0.99),
                random_ball_point(&mut rng, 1, 0.99),
            );
            let f = |x: &ComplexVector| ComplexVector::from_parts(x.get(0), &[x.get(0) / 2.0]);
            let gd = green(&DomainTag::Disc, &z, &w).unwrap();
            let gb = green(&DomainTag::Bidisc, &f(&z), &f(&w)).unwrap();
            assert!(gd >= gb - 1e-13);
        }
    }

    #[test]
    fn siegel_green_goes_through_cayley() {
        let zb = v(&[(0.1, 0.2), (0.3, -0.1)]);
        let wb = v(&[(-0.2, 0.0), (0.1, 0.4)]);
        let z = cayley(2, Direction::Forward, &zb).unwrap();
        let w = cayley(2, Direction::Forward, &wb).unwrap();
        let a = green(&DomainTag::Siegel { n: 2 }, &z, &w).unwrap();
        let b = green(&DomainTag::Ball { n: 2 }, &zb, &wb).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn kernel_jacobian_and_rule7() {
        assert!(
            (bergman_kernel_ball(&ComplexVector::zeros(1)).unwrap() - 1.0 / std::f64::consts::PI)
                .abs()
                < 1e-15
        );
        let id = BallMoebius::identity(2);
        let z = v(&[(0.3, 0.1), (-0.2, 0.4)]);
        assert!((jacobian_ball(&id, &z).unwrap() - 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=2 {
            for _ in 0..100 {
                let thetas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..6.0)).collect();
                let m = BallMoebius::new(
                    UnitaryMatrix::diagonal_phases(&thetas),
                    random_ball_point(&mut rng, n, 0.9),
                )
                .unwrap();
                let z = random_ball_point(&mut rng, n, 0.9);
                assert!(rule7_residual(&m, &z).unwrap() < 1e-10);
                let fd = jacobian_fd(&m, &z, 1e-5).unwrap();
                let exact = jacobian_ball(&m, &z).unwrap();
                assert!((fd - exact).abs() <= 1e-6 * exact.max(1.0));
            }
        }
    }

    #[test]
    fn invariant_u_trivial_group_and_invariance() {
        let z = v(&[(0.3, 0.1), (0.2, -0.2)]);
        let id = Generator::Ball(BallMoebius::identity(2));
        let u = invariant_u(&id, &z, 0).unwrap();
        assert!((u.value - (z.norm_sq() - 1.0)).abs() < 1e-15);
        assert_eq!(u.tail_bound, 0.0);

        let g = Generator::Siegel(SiegelAffine::dilation(2, 2.0, 0.0).unwrap());
        let zero = ComplexVector::zeros(2);
        let a = invariant_u(&g, &zero, 25).unwrap();
        let b = invariant_u(&g, &zero, 30).unwrap();
        assert!((a.value - b.value).abs() < 1e-10);
        assert!(b.value < 0.0);

        let gp = Generator::Siegel(SiegelAffine::dilation(2, 1.0, 1.5).unwrap());
        let u0 = invariant_u(&gp, &z, 2000).unwrap();
        let u1 = invariant_u(&gp, &gp.apply(&z).unwrap(), 2000).unwrap();
        assert!((u0.value - u1.value).abs() <= u0.tail_bound);
        assert!(u0.tail_bound.is_finite());
    }

    #[test]
    fn elliptic_potential_diverges() {
        let g = Generator::Disc(DiscMoebius::rotation(0.7));
        assert!(matches!(
            invariant_u(&g, &v(&[(0.3, 0.0)]), 100),
            Err(Error::DivergentPotential(_))
        ));
    }

    #[test]
    fn green_orbit_potential_pole_and_k0() {
        let g = Generator::Disc(DiscMoebius::new(c(1.5, 0.0), c(1.25f64.sqrt(), 0.0)).unwrap());
        let a = v(&[(0.1, 0.2)]);
        let z = v(&[(-0.3, 0.1)]);
        let p = green_orbit_potential(&g, &a, &z, 0).unwrap();
        assert!((p.value - green(&DomainTag::Disc, &z, &a).unwrap()).abs() < 1e-15);
        assert_eq!(
            green_orbit_potential(&g, &a, &a, 10).unwrap().value,
            f64::NEG_INFINITY
        );
        let ga = g.apply(&a).unwrap();
        assert_eq!(
            green_orbit_potential(&g, &a, &ga, 10).unwrap().value,
            f64::NEG_INFINITY
        );
        let full = green_orbit_potential(&g, &a, &z, 200).unwrap();
        assert!(full.value < 0.0 && full.tail_bound < 1e-8);
    }

    #[test]
    fn levi_examples() {
        let probe = LeviProbe::standard(2);
        let z = v(&[(0.1, 0.2), (-0.3, 0.1)]);
        let sq = |p: &ComplexVector| Ok(p.norm_sq());
        assert!((levi_min_eigen(&sq, &z, &probe).unwrap() - 1.0).abs() < 1e-6);
        let re = |p: &ComplexVector| Ok(p.get(0).re);
        assert!(levi_min_eigen(&re, &z, &probe).unwrap().abs() < 1e-6);
        // |z1|^2 + 2 Re(z1 zbar2) + 3 |z2|^2 has Levi matrix [[1, 1], [1, 3]].
        let mixed = |p: &ComplexVector| {
            let (a, b) = (p.get(0), p.get(1));
            Ok(a.norm_sqr() + 2.0 * (a * b.conj()).re + 3.0 * b.norm_sqr())
        };
        let rotated = LeviProbe::new(
            1e-3,
            vec![v(&[(1.0, 1.0), (0.5, 0.0)]), v(&[(0.0, 0.0), (0.0, 2.0)])],
        )
        .unwrap();
        let expected = 2.0 - 2f64.sqrt();
        assert!((levi_min_eigen(&mixed, &z, &rotated).unwrap() - expected).abs() < 1e-6);
        let g = Generator::Siegel(SiegelAffine::dilation(2, 2.0, 0.0).unwrap());
        let u = |p: &ComplexVector| invariant_u(&g, p, 60).map(|x| x.value);
        let rep = levi_report(&u, &ComplexVector::zeros(2), &probe, 1e-6).unwrap();
        assert!(rep.min_eigen > 0.0 && !rep.flagged);
        let edge = v(&[(1.0 - 1e-5, 0.0), (0.0, 0.0)]);
        assert!(matches!(
            levi_min_eigen(&u, &edge, &probe),
            Err(Error::Stencil(_))
        ));
        assert!(LeviProbe::new(1e-1, probe.basis().to_vec()).is_err());
    }

    #[test]
    fn patch_branches_and_seams() {
        for (d, b) in [
            (DomainTag::Disc, v(&[(0.2, -0.1)])),
            (DomainTag::Ball { n: 2 }, v(&[(0.2, 0.1), (-0.3, 0.2)])),
            (DomainTag::Bidisc, v(&[(0.2, 0.1), (-0.3, 0.2)])),
        ] {
            let p = PatchParams::for_domain(&d, &b, 4000, 1).unwrap();
            assert!(p.r.ln() <= 2.0 * (p.c1 - p.c2));
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            let u = random_unit(&mut rng, b.dim());
            let z = b.add(&u.scale(c(p.r / 2.0 * p.chart_radius, 0.0)));
            let rho = psh_patch(&d, &p, &z).unwrap();
            let zeta2 = (z.distance(&b) / p.chart_radius).powi(2);
            assert!((rho - zeta2).abs() <= 1e-14);
            let seam = patch_seam_residual(&d, &p, 1000, 3).unwrap();
            assert!(seam <= 1e-9, "{d:?} {seam:e} {p:?}");
            for _ in 0..200 {
                let z = random_ball_point(&mut rng, b.dim(), 0.999);
                let z = if d == DomainTag::Bidisc {
                    ComplexVector::from_parts(z.get(0), &[z.get(1)])
                } else {
                    z
                };
                let rho = psh_patch(&d, &p, &z).unwrap();
                assert!(rho >= 0.0 && rho <= (-4.0 * p.c1).exp() * (1.0 + 1e-12));
            }
        }
        assert!(PatchParams::new(0.0, 1.0, 0.5, ComplexVector::zeros(1), 1.0).is_err());
    }

    #[test]
    fn comparison_constant_examples() {
        let (a, a2) = (ComplexVector::zeros(1), v(&[(0.1, 0.0)]));
        let c_disc = comparison_constant(&DomainTag::Disc, &a, &a2, 0.5).unwrap();
        let exact = 0.5f64.ln() / (0.6f64 / 1.05).ln();
        assert!((c_disc - exact).abs() < 1e-12);
        let res = comparison_residuals(&DomainTag::Disc, &a, &a2, 0.5, c_disc, 1000, 7).unwrap();
        assert!(res.iter().all(|&r| r >= -1e-12));
        let (b, b2) = (ComplexVector::zeros(2), v(&[(0.1, 0.0), (0.0, 0.0)]));
        let c_ball = comparison_constant(&DomainTag::Ball { n: 2 }, &b, &b2, 0.5).unwrap();
        assert!((c_ball - exact).abs() < 1e-12);
        let res =
            comparison_residuals(&DomainTag::Ball { n: 2 }, &b, &b2, 0.5, c_ball, 1000, 8).unwrap();
        assert!(res.iter().all(|&r| r >= -1e-12));
        // shrinking pairs
        let mut prev = f64::INFINITY;
        for t in [0.2, 0.05, 0.01, 0.001] {
            let k = comparison_constant(&DomainTag::Disc, &a, &v(&[(t, 0.0)]), 0.5).unwrap();
            assert!((k - 1.0).abs() < (prev - 1.0).abs());
            prev = k;
        }
        assert!(matches!(
            comparison_constant(&DomainTag::Disc, &a, &v(&[(0.6, 0.0)]), 0.5),
            Err(Error::PatchParam(_))
        ));
    }

    #[test]
    fn barriers() {
        let p = v(&[(0.6, 0.0), (0.0, 0.8)]);
        let bl = BarrierKind::BallLinear { p: p.clone() };
        assert!(barrier_witness(&bl, &p).unwrap().abs() < 1e-15);
        assert!(barrier_witness(
            &BarrierKind::BallLinear {
                p: v(&[(0.5, 0.0), (0.0, 0.0)])
            },
            &p
        )
        .is_err());
        let we = BarrierKind::WeightedExample;
        assert_eq!(
            barrier_witness(&we, &v(&[(1.0, 0.0), (0.0, 0.0)])).unwrap(),
            0.0
        );
        assert!(barrier_witness(&we, &v(&[(0.5, 0.0), (0.3, 0.0)])).unwrap() < 0.0);
        let cw = BarrierKind::ClusterWitness {
            points: vec![v(&[(1.0, 0.0)])],
            domain: DomainTag::Disc,
        };
        let near = v(&[(1.0 - 2.0 * (-20f64).exp(), 0.0)]);
        assert!(barrier_witness(&cw, &near).unwrap() <= -20.0 + 1e-6);
        assert_eq!(
            barrier_witness(&cw, &v(&[(1.0, 0.0)])).unwrap(),
            f64::NEG_INFINITY
        );
        let probe = LeviProbe::standard(2);
        let z = v(&[(0.2, 0.1), (0.1, -0.3)]);
        for k in [bl, we] {
            let f = |x: &ComplexVector| barrier_witness(&k, x);
            assert!(levi_min_eigen(&f, &z, &probe).unwrap() >= -1e-6);
        }
        let cw2 = BarrierKind::ClusterWitness {
            points: vec![v(&[(1.0, 0.0), (0.0, 0.0)]), v(&[(-1.0, 0.0), (0.0, 0.0)])],
            domain: DomainTag::Ball { n: 2 },
        };
        let f = |x: &ComplexVector| barrier_witness(&cw2, x);
        assert!(levi_min_eigen(&f, &z, &probe).unwrap() >= -1e-6);
    }
}
