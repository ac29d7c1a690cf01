//! Truncated Poincaré-type series over cyclic groups and their convergence
//! verdicts, numeric (tail fits) and closed form (the case table for disc and
//! Siegel generators).

use serde::{Deserialize, Serialize};

use crate::automorphism::{AutKind, Generator, SiegelAffine, Tracked};
use crate::domain::{inner_unchecked, one_minus_sq_norm, ComplexVector, DomainTag, ONE};
use crate::error::{Error, Result};
use crate::numerics::{ls_slope, radial_gap_from_defect, CompensatedSum};
use crate::orbit::{ray_stalls, rays, Rays};
use crate::potential::green_tracked;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Numeric,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    I1,
    I21,
    I22,
    I23,
    I24,
    II1,
    II2,
    Mixed,
    NotApplicable,
}

/// `Gap` sums `(1 - |z|)^s`, `Defect` sums `(1 - |z|^2)^s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TermForm {
    #[default]
    Gap,
    Defect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeriesKind {
    Poincare {
        s: f64,
        #[serde(default)]
        form: TermForm,
    },
    Green,
    Delta,
    Jacobian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub k: usize,
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub kind: SeriesKind,
    pub base_point: ComplexVector,
    pub truncation: usize,
    /// Symmetric partial sums over `|k| <= K/4, K/2, K`.
    pub checkpoints: Vec<Checkpoint>,
    pub tail_exponent: Option<f64>,
    pub tail_ratio: Option<f64>,
    pub verdict: Verdict,
    pub method: Method,
    pub case: CaseTag,
    pub numeric_verdict: Verdict,
    pub closed_form_verdict: Option<Verdict>,
}

impl SeriesReport {
    pub fn total(&self) -> f64 {
        self.checkpoints
            .last()
            .map(|c| c.partial_sum)
            .unwrap_or(0.0)
    }

    pub fn methods_disagree(&self) -> bool {
        matches!(self.closed_form_verdict, Some(v) if self.numeric_verdict != Verdict::Inconclusive && v != self.numeric_verdict)
    }
}

/// Outcome of the tail analysis of a term sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub verdict: Verdict,
    pub slope: Option<f64>,
    pub ratio: Option<f64>,
}

/// Tail test on nonnegative terms `t_1, t_2, ..` (index from 1): geometric
/// decay (consecutive ratios at most 0.99 on the tail half, or underflow to
/// zero or subnormals) is convergent; otherwise the log-log slope of the tail half decides
/// with the band `(-1 - 0.15, -1 + 0.15)` left inconclusive.
pub fn numeric_verdict(terms: &[f64]) -> TailFit {
    let inconclusive = TailFit {
        verdict: Verdict::Inconclusive,
        slope: None,
        ratio: None,
    };
    let n = terms.len();
    if n < 2 * tol::MIN_TAIL_TERMS {
        return inconclusive;
    }
    // carried defects can stick at subnormal values instead of reaching zero
    let last_nonzero = terms.iter().rposition(|&t| t >= f64::MIN_POSITIVE);
    match last_nonzero {
        None => {
            return TailFit {
                verdict: Verdict::Converges,
                slope: None,
                ratio: Some(0.0),
            }
        }
        Some(i) if i + 1 < n && terms[..=i].iter().all(|&t| t > 0.0) => {
            // underflowed to exact zero
            return TailFit {
                verdict: Verdict::Converges,
                slope: None,
                ratio: Some(0.0),
            };
        }
        _ => {}
    }
    let start = n / 2;
    let tail = &terms[start..];
    if tail.iter().any(|&t| !(t > 0.0)) {
        return inconclusive;
    }
    let ratio = tail.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    if ratio <= tol::GEOMETRIC_RATIO {
        return TailFit {
            verdict: Verdict::Converges,
            slope: None,
            ratio: Some(ratio),
        };
    }
    let xs: Vec<f64> = (start..n).map(|i| ((i + 1) as f64).ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|t| t.ln()).collect();
    let slope = match ls_slope(&xs, &ys) {
        Some(s) => s,
        None => return inconclusive,
    };
    let verdict = if slope < -(1.0 + tol::TAIL_BAND) {
        Verdict::Converges
    } else if slope > -(1.0 - tol::TAIL_BAND) {
        Verdict::Diverges
    } else {
        Verdict::Inconclusive
    };
    TailFit {
        verdict,
        slope: Some(slope),
        ratio: Some(ratio),
    }
}

/// The case of a disc or Siegel generator and the verdict for the `s = 1` Poincare series
/// read off from the case table.
///
/// For `r = 1` the translation `a'` splits along the eigenvalue-1 block of
/// `U'` into `a'_fix` and `a'_rot`. With `a'_fix = 0` and `a'_rot != 0`,
/// `w = <a'(I - U')^{-1} U', a'>` separates the diverging case (`w != -|a'|^2/2`)
/// from the converging one; `c - 2 Im w = 0` is elliptic.
pub fn closed_form_verdict(gen: &Generator) -> Result<(CaseTag, Verdict)> {
    match gen {
        Generator::Disc(m) => match m.classify().kind {
            AutKind::Hyperbolic => Ok((CaseTag::II1, Verdict::Converges)),
            AutKind::Parabolic => Ok((CaseTag::II2, Verdict::Converges)),
            _ => Err(Error::NotProperlyDiscontinuous(
                "elliptic or identity disc generator".into(),
            )),
        },
        Generator::Siegel(s) => siegel_case(s),
        _ => Err(Error::Unsupported(
            "closed-form verdicts exist for disc and Siegel generators only".into(),
        )),
    }
}

/// Tolerance for the vanishing tests of the case table, relative to the size
/// of the parameters.
const CASE_TOL: f64 = 1e-10;

fn siegel_case(s: &SiegelAffine) -> Result<(CaseTag, Verdict)> {
    if (s.r() - 1.0).abs() > 1e-15 {
        return Ok((CaseTag::I1, Verdict::Converges));
    }
    let sp = s.spectral();
    let scale = 1.0 + s.aprime().norm_sq() + s.c().abs();
    let mut fix = 0.0;
    let mut rot = 0.0;
    let mut w = num_complex::Complex64::new(0.0, 0.0);
    for j in 0..sp.eigenvalues.len() {
        let b2 = sp.coefficients[j].norm_sqr();
        if sp.is_fixed(j) {
            fix += b2;
        } else {
            rot += b2;
            let l = sp.eigenvalues[j];
            w += l / (ONE - l) * b2;
        }
    }
    let fix_zero = fix.sqrt() <= CASE_TOL * scale;
    let rot_zero = rot.sqrt() <= CASE_TOL * scale;
    if !fix_zero {
        return Ok((
            if rot_zero {
                CaseTag::I22
            } else {
                CaseTag::Mixed
            },
            Verdict::Converges,
        ));
    }
    if rot_zero {
        if s.c().abs() <= CASE_TOL * scale {
            return Err(Error::NotProperlyDiscontinuous(
                "a' = 0 and c = 0: elliptic generator".into(),
            ));
        }
        return Ok((CaseTag::I21, Verdict::Converges));
    }
    let c_eff = s.c() - 2.0 * w.im;
    if c_eff.abs() <= CASE_TOL * scale {
        return Err(Error::NotProperlyDiscontinuous(
            "translation vanishes after centring the rotation: elliptic generator".into(),
        ));
    }
    if (w + rot / 2.0).norm() > CASE_TOL * scale {
        Ok((CaseTag::I23, Verdict::Diverges))
    } else {
        Ok((CaseTag::I24, Verdict::Converges))
    }
}

fn require_ball_like(gen: &Generator) -> Result<()> {
    match gen {
        Generator::Disc(_) | Generator::Ball(_) | Generator::Siegel(_) => Ok(()),
        _ => Err(Error::Unsupported(
            "this series needs a generator acting on the disc or ball".into(),
        )),
    }
}

fn check_discontinuity(r: &Rays) -> Result<()> {
    if ray_stalls(&r.forward) && ray_stalls(&r.backward) {
        return Err(Error::NotProperlyDiscontinuous(
            "orbit does not approach the boundary (interior accumulation)".into(),
        ));
    }
    Ok(())
}

/// Symmetric partial sums at `K/4`, `K/2` and `K` from `term(0)` and the
/// folded terms `t_k = term(k) + term(-k)`, `k >= 1`.
fn checkpoints(k_max: usize, term0: f64, folded: &[f64]) -> Vec<Checkpoint> {
    let marks = [k_max / 4, k_max / 2, k_max];
    let mut acc = CompensatedSum::new();
    acc.add(term0);
    let mut out = Vec::new();
    let mut next = 0;
    while next < marks.len() && marks[next] == 0 {
        out.push(Checkpoint {
            k: 0,
            partial_sum: acc.value(),
        });
        next += 1;
    }
    for (i, t) in folded.iter().enumerate() {
        acc.add(*t);
        while next < marks.len() && marks[next] == i + 1 {
            out.push(Checkpoint {
                k: i + 1,
                partial_sum: acc.value(),
            });
            next += 1;
        }
    }
    out
}

fn build_report(
    kind: SeriesKind,
    gen: &Generator,
    a: &ComplexVector,
    k_max: usize,
    term0: f64,
    folded: Vec<f64>,
    use_closed_form: bool,
) -> SeriesReport {
    let fit = numeric_verdict(&folded);
    let closed = if use_closed_form {
        closed_form_verdict(gen).ok()
    } else {
        None
    };
    let (verdict, method) = match closed {
        Some((_, v)) if v == fit.verdict => (v, Method::Both),
        Some((_, v)) => (v, Method::ClosedForm),
        None => (fit.verdict, Method::Numeric),
    };
    SeriesReport {
        kind,
        base_point: a.clone(),
        truncation: k_max,
        checkpoints: checkpoints(k_max, term0, &folded),
        tail_exponent: fit.slope,
        tail_ratio: fit.ratio,
        verdict,
        method,
        case: closed.map(|c| c.0).unwrap_or(CaseTag::NotApplicable),
        numeric_verdict: fit.verdict,
        closed_form_verdict: closed.map(|c| c.1),
    }
}

fn fold(r: &Rays, f: impl Fn(&Tracked) -> f64) -> (f64, Vec<f64>) {
    let k_max = r.truncation();
    let folded = (1..=k_max)
        .map(|k| f(&r.forward[k]) + f(&r.backward[k]))
        .collect();
    (f(&r.forward[0]), folded)
}

/// `sum_{|k| <= K} (1 - |gamma^k(a)|)^s`, or `(1 - |gamma^k(a)|^2)^s` with
/// [`TermForm::Defect`], from defects carried by the defect identity.
pub fn poincare_series(
    gen: &Generator,
    a: &ComplexVector,
    s: f64,
    form: TermForm,
    k_max: usize,
) -> Result<SeriesReport> {
    require_ball_like(gen)?;
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(
            "exponent s must be positive".into(),
        ));
    }
    let r = rays(gen, a, k_max)?;
    check_discontinuity(&r)?;
    let term = |t: &Tracked| match form {
        TermForm::Gap => radial_gap_from_defect(t.defect()).powf(s),
        TermForm::Defect => t.defect().max(0.0).powf(s),
    };
    let (t0, folded) = fold(&r, term);
    let closed = s == 1.0;
    Ok(build_report(
        SeriesKind::Poincare { s, form },
        gen,
        a,
        k_max,
        t0,
        folded,
        closed,
    ))
}

/// `sum_{1 <= |k| <= K} g(gamma^k(z), z)` with the Green function of the
/// bounded model; the verdict is taken on the negated terms.
pub fn green_series(gen: &Generator, z: &ComplexVector, k_max: usize) -> Result<SeriesReport> {
    let domain = green_domain(gen)?;
    let r = rays(gen, z, k_max)?;
    check_discontinuity(&r)?;
    let mut folded = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let g1 = green_tracked(&domain, &r.forward[k], z)?;
        let g2 = green_tracked(&domain, &r.backward[k], z)?;
        if g1 == f64::NEG_INFINITY || g2 == f64::NEG_INFINITY {
            return Err(Error::SingularInput(format!(
                "gamma^{k} fixes the base point"
            )));
        }
        folded.push(-(g1 + g2));
    }
    let mut report = build_report(SeriesKind::Green, gen, z, k_max, 0.0, folded, false);
    for c in &mut report.checkpoints {
        c.partial_sum = -c.partial_sum;
    }
    Ok(report)
}

pub(crate) fn green_domain(gen: &Generator) -> Result<DomainTag> {
    match gen.bounded_domain() {
        d @ (DomainTag::Disc | DomainTag::Ball { .. } | DomainTag::Bidisc) => Ok(d),
        _ => Err(Error::Unsupported(
            "no closed-form Green function on the weighted ball".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxiliaryKind {
    Delta,
    Jacobian,
}

/// `Delta`: boundary distances `delta(gamma^k(a))` (Euclidean on the disc, ball
/// and bidisc, the defect on the weighted ball). `Jacobian` (ball only):
/// `|j_{gamma^k}(a)|^2` from the closed form with `c_k = gamma^{-k}(0)`.
pub fn auxiliary_series(
    kind: AuxiliaryKind,
    gen: &Generator,
    a: &ComplexVector,
    k_max: usize,
) -> Result<SeriesReport> {
    match kind {
        AuxiliaryKind::Delta => {
            let r = rays(gen, a, k_max)?;
            check_discontinuity(&r)?;
            let weighted = matches!(gen, Generator::WeightedDilation { .. });
            let term = |t: &Tracked| {
                if weighted {
                    t.defect()
                } else {
                    radial_gap_from_defect(t.parts[0]).min(radial_gap_from_defect(t.parts[1]))
                }
            };
            let (t0, folded) = fold(&r, term);
            let closed = matches!(gen, Generator::Disc(_) | Generator::Siegel(_));
            Ok(build_report(
                SeriesKind::Delta,
                gen,
                a,
                k_max,
                t0,
                folded,
                closed,
            ))
        }
        AuxiliaryKind::Jacobian => {
            require_ball_like(gen)?;
            let n = gen.dim();
            let zero = ComplexVector::zeros(n);
            let r = rays(gen, &zero, k_max)?;
            check_discontinuity(&r)?;
            let da = one_minus_sq_norm(a);
            if !(da > 0.0) {
                return Err(Error::OutsideDomain(format!(
                    "{a:?} is not an interior point"
                )));
            }
            let e = (n + 1) as i32;
            // |j_{gamma^k}(a)|^2 with gamma^k = U phi_c, c = gamma^{-k}(0).
            let term = |c: &Tracked| {
                let den = (ONE - inner_unchecked(a, &c.point)).norm_sqr();
                (c.parts[0] / den).powi(e)
            };
            let t0 = term(&r.forward[0]);
            let folded: Vec<f64> = (1..=k_max)
                .map(|k| term(&r.backward[k]) + term(&r.forward[k]))
                .collect();
            Ok(build_report(
                SeriesKind::Jacobian,
                gen,
                a,
                k_max,
                t0,
                folded,
                false,
            ))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasepointPair {
    pub z: ComplexVector,
    /// `1 - |phi_z(a)|^2`, the constant of the sandwich.
    pub q: f64,
    pub min_lower_slack: f64,
    pub min_upper_slack: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasepointReport {
    pub a: ComplexVector,
    pub verdict_a: Verdict,
    pub pairs: Vec<BasepointPair>,
    pub sandwich_holds: bool,
    pub verdicts_agree: bool,
}

/// Checks `q (1 - |gamma z|) / 4 <= 1 - |gamma a| <= 4 (1 - |gamma z|) / q`,
/// `q = 1 - |phi_z(a)|^2`, along the orbit for every `z`, and compares the
/// `s = 1` verdicts at all base points. Terms where both gaps have underflowed
/// below the normal range are skipped.
pub fn basepoint_transfer(
    a: &ComplexVector,
    zs: &[ComplexVector],
    gen: &Generator,
    k_max: usize,
) -> Result<BasepointReport> {
    require_ball_like(gen)?;
    let ra = rays(gen, a, k_max)?;
    let verdict_a = poincare_series(gen, a, 1.0, TermForm::Gap, k_max)?.verdict;
    let mut pairs = Vec::new();
    for z in zs {
        let rz = rays(gen, z, k_max)?;
        let q = one_minus_sq_norm(&crate::automorphism::phi(z, a)?);
        let mut lower = f64::INFINITY;
        let mut upper = f64::INFINITY;
        for k in -(k_max as i64)..=(k_max as i64) {
            let ga = radial_gap_from_defect(ra.get(k).defect());
            let gz = radial_gap_from_defect(rz.get(k).defect());
            // both gaps subnormal: no relative precision left to compare
            if ga.max(gz) < f64::MIN_POSITIVE {
                continue;
            }
            lower = lower.min(ga - q * gz / 4.0);
            upper = upper.min(4.0 * gz / q - ga);
        }
        let verdict = poincare_series(gen, z, 1.0, TermForm::Gap, k_max)?.verdict;
        pairs.push(BasepointPair {
            z: z.clone(),
            q,
            min_lower_slack: lower,
            min_upper_slack: upper,
            verdict,
        });
    }
    let sandwich_holds = pairs
        .iter()
        .all(|p| p.min_lower_slack >= 0.0 && p.min_upper_slack >= 0.0);
    let verdicts_agree = pairs.iter().all(|p| p.verdict == verdict_a);
    Ok(BasepointReport {
        a: a.clone(),
        verdict_a,
        pairs,
        sandwich_holds,
        verdicts_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::DiscMoebius;
    use crate::domain::{UnitaryMatrix, C64};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn numeric_verdict_examples() {
        let sq: Vec<f64> = (1..=1000).map(|k| 1.0 / (k as f64).powi(2)).collect();
        assert_eq!(numeric_verdict(&sq).verdict, Verdict::Converges);
        let harmonic: Vec<f64> = (1..=1000).map(|k| 1.0 / k as f64).collect();
        assert_eq!(numeric_verdict(&harmonic).verdict, Verdict::Inconclusive);
        let slow: Vec<f64> = (1..=1000).map(|k| 1.0 / (k as f64).sqrt()).collect();
        assert_eq!(numeric_verdict(&slow).verdict, Verdict::Diverges);
        let geo: Vec<f64> = (1..=100).map(|k| 0.9f64.powi(k)).collect();
        let fit = numeric_verdict(&geo);
        assert_eq!(fit.verdict, Verdict::Converges);
        assert!(fit.slope.is_none());
        assert_eq!(numeric_verdict(&sq[..10]).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn case_table() {
        let g = Generator::Siegel(SiegelAffine::dilation(2, 2.0, 5.0).unwrap());
        assert_eq!(
            closed_form_verdict(&g).unwrap(),
            (CaseTag::I1, Verdict::Converges)
        );
        let g = Generator::Siegel(SiegelAffine::dilation(2, 1.0, 2.0).unwrap());
        assert_eq!(
            closed_form_verdict(&g).unwrap(),
            (CaseTag::I21, Verdict::Converges)
        );
        let a = ComplexVector::new(vec![c(0.5, 0.2)]).unwrap();
        let g = Generator::Siegel(
            SiegelAffine::new(1.0, 0.3, a.clone(), UnitaryMatrix::identity(1)).unwrap(),
        );
        assert_eq!(
            closed_form_verdict(&g).unwrap(),
            (CaseTag::I22, Verdict::Converges)
        );
        let g = Generator::Siegel(
            SiegelAffine::new(1.0, 0.3, a.clone(), UnitaryMatrix::diagonal_phases(&[1.0])).unwrap(),
        );
        assert_eq!(
            closed_form_verdict(&g).unwrap(),
            (CaseTag::I23, Verdict::Diverges)
        );
        let g = Generator::Siegel(
            SiegelAffine::new(1.0, 0.3, a, UnitaryMatrix::diagonal_phases(&[PI])).unwrap(),
        );
        assert_eq!(
            closed_form_verdict(&g).unwrap(),
            (CaseTag::I24, Verdict::Converges)
        );
        let g = Generator::Siegel(SiegelAffine::dilation(2, 1.0, 0.0).unwrap());
        assert!(matches!(
            closed_form_verdict(&g),
            Err(Error::NotProperlyDiscontinuous(_))
        ));
    }

    #[test]
    fn poincare_partial_sums_grow_and_match_reference() {
        let g = Generator::Siegel(SiegelAffine::dilation(2, 1.0, 2.0).unwrap());
        let zero = ComplexVector::zeros(2);
        let rep = poincare_series(&g, &zero, 1.0, TermForm::Defect, 10_000).unwrap();
        let reference = PI / PI.tanh();
        assert!((rep.total() - reference).abs() < 1e-3);
        assert!(rep
            .checkpoints
            .windows(2)
            .all(|w| w[0].partial_sum <= w[1].partial_sum));
        assert_eq!(rep.verdict, Verdict::Converges);
        assert_eq!(rep.method, Method::Both);
    }

    #[test]
    fn disc_hyperbolic_converges() {
        let g = Generator::Disc(DiscMoebius::new(c(2f64.sqrt(), 0.0), c(1.0, 0.0)).unwrap());
        let rep = poincare_series(&g, &ComplexVector::zeros(1), 1.0, TermForm::Gap, 2000).unwrap();
        assert_eq!(rep.verdict, Verdict::Converges);
        assert_eq!(rep.case, CaseTag::II1);
    }

    #[test]
    fn elliptic_is_rejected() {
        let g = Generator::Disc(DiscMoebius::rotation(1.0));
        let r = poincare_series(
            &g,
            &ComplexVector::new(vec![c(0.3, 0.0)]).unwrap(),
            1.0,
            TermForm::Gap,
            500,
        );
        assert!(matches!(r, Err(Error::NotProperlyDiscontinuous(_))));
    }

    #[test]
    fn inverse_generator_gives_the_same_sums() {
        let g = Generator::Disc(DiscMoebius::new(c(1.0, 1.0), c(1.0, 0.0)).unwrap());
        let a = ComplexVector::new(vec![c(0.2, -0.1)]).unwrap();
        let r1 = poincare_series(&g, &a, 1.0, TermForm::Gap, 1000).unwrap();
        let r2 = poincare_series(&g.inverse(), &a, 1.0, TermForm::Gap, 1000).unwrap();
        for (x, y) in r1.checkpoints.iter().zip(&r2.checkpoints) {
            assert!((x.partial_sum - y.partial_sum).abs() <= 1e-12);
        }
    }
}
