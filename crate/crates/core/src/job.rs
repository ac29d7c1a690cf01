//! Batch jobs: JSON configs in, JSON reports out.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::automorphism::{
    AutClass, BallMoebius, BidiscAuto, DiscMoebius, Generator, SiegelAffine,
};
use crate::domain::{ComplexVector, UnitaryMatrix, Weights, C64};
use crate::error::{Error, Result};
use crate::orbit::{
    cluster_points, orbit, proper_discontinuity_check, theorem_checks, ClusterReport,
    DiscontinuityReport, OrbitSample, TheoremKind, TheoremParams, TheoremReport,
};
use crate::potential::{invariant_u, levi_report, LeviProbe, LeviReport, PotentialValue};
use crate::render::Scene;
use crate::series::{
    auxiliary_series, closed_form_verdict, green_series, poincare_series, AuxiliaryKind, CaseTag,
    SeriesKind, SeriesReport, Verdict,
};
use crate::tol;
use crate::verify::{self, Suite, VerifyReport};

pub const MAX_K: usize = 10_000_000;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Classify,
    Orbit,
    Series,
    Limitset,
    Verify,
    Render,
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::String(s)) => f.write_str(&s),
            _ => write!(f, "{self:?}"),
        }
    }
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| Error::Config {
            path: "command".into(),
            message: format!("unknown command `{s}`"),
        })
    }
}

/// `[re, im]` as decimal strings.
pub type ComplexDec = [String; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscSpec {
    pub p: ComplexDec,
    pub q: ComplexDec,
}

/// Generator parameters, kept as the decimal strings of the config so the
/// report echoes them exactly. `phases` gives a diagonal unitary; `unitary`
/// lists rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Disc {
        p: ComplexDec,
        q: ComplexDec,
    },
    Ball {
        center: Vec<ComplexDec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phases: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unitary: Option<Vec<Vec<ComplexDec>>>,
    },
    Siegel {
        r: String,
        c: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<Vec<ComplexDec>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phases: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unitary: Option<Vec<Vec<ComplexDec>>>,
        /// Dimension; needed only when `a`, `phases` and `unitary` are absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    Bidisc {
        gamma1: DiscSpec,
        gamma2: DiscSpec,
        #[serde(default)]
        swap: bool,
    },
    WeightedDilation {
        weights: Vec<u32>,
        r: String,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Knobs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Finite-difference step of the Levi form of the invariant potential.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Orbit samples with `|k|` up to this are copied into the report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    /// Point of the bounded model; the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<ComplexDec>>,
    /// Series to sum for `series`; Poincaré with `s = 1` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesKind>,
    /// Check suite to run for `limitset`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    #[serde(default)]
    pub knobs: Knobs,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResult {
    /// Absent for the bidisc, whose components are classified instead.
    pub class: Option<AutClass>,
    pub components: Vec<AutClass>,
    pub case: Option<CaseTag>,
    pub condition1: Option<Verdict>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSummary {
    pub u: PotentialValue,
    pub levi: LeviReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub series: SeriesReport,
    pub potential: Option<PotentialSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub truncation: usize,
    pub samples: Vec<OrbitSample>,
    pub clusters: ClusterReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitsetResult {
    pub clusters: ClusterReport,
    pub discontinuity: DiscontinuityReport,
    pub theorem: Option<TheoremReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobResult {
    Classify(ClassifyResult),
    Orbit(OrbitResult),
    Series(SeriesResult),
    Limitset(LimitsetResult),
    Verify(VerifyReport),
    Render(OrbitResult),
}

/// Deterministic report; wall time is kept apart in [`Timing`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobReport {
    pub version: String,
    pub command: Command,
    pub config: JobConfig,
    pub result: JobResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_time_seconds: f64,
}

pub fn parse_config(text: &str) -> Result<JobConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn load_config(path: &Path) -> Result<JobConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

fn config_err(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn dec(s: &str, path: &str) -> Result<f64> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(config_err(
            path,
            format!("`{s}` is not a finite decimal number"),
        )),
    }
}

fn cdec(c: &ComplexDec, path: &str) -> Result<C64> {
    Ok(C64::new(
        dec(&c[0], &format!("{path}[0]"))?,
        dec(&c[1], &format!("{path}[1]"))?,
    ))
}

fn cvec(v: &[ComplexDec], path: &str) -> Result<ComplexVector> {
    let entries = v
        .iter()
        .enumerate()
        .map(|(i, c)| cdec(c, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    ComplexVector::new(entries).map_err(|e| config_err(path, e.to_string()))
}

/// Wraps library validation errors with the config path that caused them.
fn at<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config { .. } => e,
        other => config_err(path, other.to_string()),
    })
}

fn unitary(
    phases: &Option<Vec<String>>,
    rows: &Option<Vec<Vec<ComplexDec>>>,
    n: usize,
    path: &str,
) -> Result<UnitaryMatrix> {
    match (phases, rows) {
        (Some(_), Some(_)) => Err(config_err(
            path,
            "give either `phases` or `unitary`, not both",
        )),
        (Some(p), None) => {
            let thetas = p
                .iter()
                .enumerate()
                .map(|(i, s)| dec(s, &format!("{path}.phases[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            if thetas.len() != n {
                return Err(config_err(
                    &format!("{path}.phases"),
                    format!("expected {n} phases"),
                ));
            }
            Ok(UnitaryMatrix::diagonal_phases(&thetas))
        }
        (None, Some(rows)) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(config_err(
                    &format!("{path}.unitary"),
                    format!("expected a {n}x{n} matrix"),
                ));
            }
            let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
            for (i, row) in rows.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    m[(i, j)] = cdec(c, &format!("{path}.unitary[{i}][{j}]"))?;
                }
            }
            at(&format!("{path}.unitary"), UnitaryMatrix::new(m))
        }
        (None, None) => Ok(UnitaryMatrix::identity(n)),
    }
}

fn disc(spec: &DiscSpec, path: &str) -> Result<DiscMoebius> {
    at(
        path,
        DiscMoebius::new(
            cdec(&spec.p, &format!("{path}.p"))?,
            cdec(&spec.q, &format!("{path}.q"))?,
        ),
    )
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Generator> {
        let path = "generator";
        Ok(match self {
            GeneratorSpec::Disc { p, q } => Generator::Disc(disc(
                &DiscSpec {
                    p: p.clone(),
                    q: q.clone(),
                },
                path,
            )?),
            GeneratorSpec::Ball {
                center,
                phases,
                unitary: rows,
            } => {
                let a = cvec(center, &format!("{path}.center"))?;
                let u = unitary(phases, rows, a.dim(), path)?;
                Generator::Ball(at(path, BallMoebius::new(u, a))?)
            }
            GeneratorSpec::Siegel {
                r,
                c,
                a,
                phases,
                unitary: rows,
                n,
            } => {
                let m = a
                    .as_ref()
                    .map(|v| v.len())
                    .or(phases.as_ref().map(|v| v.len()))
                    .or(rows.as_ref().map(|v| v.len()))
                    .or(n.map(|n| n.saturating_sub(1)))
                    .ok_or_else(|| config_err(&format!("{path}.n"), "dimension missing"))?;
                if m == 0 || n.is_some_and(|n| n != m + 1) {
                    return Err(config_err(
                        &format!("{path}.n"),
                        "Siegel elements need n >= 2 matching a and U",
                    ));
                }
                let a = match a {
                    Some(v) => cvec(v, &format!("{path}.a"))?,
                    None => ComplexVector::zeros(m),
                };
                let u = unitary(phases, rows, m, path)?;
                let g = SiegelAffine::new(
                    dec(r, &format!("{path}.r"))?,
                    dec(c, &format!("{path}.c"))?,
                    a,
                    u,
                );
                Generator::Siegel(at(path, g)?)
            }
            GeneratorSpec::Bidisc {
                gamma1,
                gamma2,
                swap,
            } => Generator::Bidisc(BidiscAuto::new(
                disc(gamma1, &format!("{path}.gamma1"))?,
                disc(gamma2, &format!("{path}.gamma2"))?,
                *swap,
            )),
            GeneratorSpec::WeightedDilation { weights, r } => {
                let w = at(&format!("{path}.weights"), Weights::new(weights.clone()))?;
                at(
                    path,
                    Generator::weighted_dilation(w, dec(r, &format!("{path}.r"))?),
                )?
            }
        })
    }
}

/// Validated view of a config.
struct Job<'a> {
    config: &'a JobConfig,
    command: Command,
}

impl Job<'_> {
    fn generator(&self) -> Result<Generator> {
        self.config
            .generator
            .as_ref()
            .ok_or_else(|| config_err("generator", "this command needs a generator"))?
            .build()
    }

    fn base_point(&self, gen: &Generator) -> Result<ComplexVector> {
        let z = match &self.config.base_point {
            Some(v) => cvec(v, "base_point")?,
            None => ComplexVector::zeros(gen.dim()),
        };
        if z.dim() != gen.dim() {
            return Err(config_err(
                "base_point",
                format!("expected {} coordinates, got {}", gen.dim(), z.dim()),
            ));
        }
        at("base_point", gen.track(&z).map(|_| z))
    }

    fn k(&self, default: usize) -> Result<usize> {
        let k = self.config.knobs.k.unwrap_or(default);
        if k == 0 || k > MAX_K {
            return Err(config_err(
                "knobs.k",
                format!("K = {k} outside 1..={MAX_K}"),
            ));
        }
        Ok(k)
    }

    fn positive(&self, value: Option<f64>, default: f64, path: &str) -> Result<f64> {
        let x = value.unwrap_or(default);
        if !(x > 0.0 && x.is_finite()) {
            return Err(config_err(path, format!("{x} must be positive")));
        }
        Ok(x)
    }

    fn bands(&self) -> Result<(f64, f64)> {
        let k = &self.config.knobs;
        Ok((
            self.positive(k.epsilon, tol::DEFAULT_EPSILON, "knobs.epsilon")?,
            self.positive(k.delta, tol::DEFAULT_DELTA, "knobs.delta")?,
        ))
    }

    fn classify(&self) -> Result<ClassifyResult> {
        let gen = self.generator()?;
        let (class, components) = match &gen {
            Generator::Bidisc(b) => (None, vec![b.gamma1.classify(), b.gamma2.classify()]),
            g => (Some(g.classify(10_000)?), vec![]),
        };
        let (case, condition1, note) = match closed_form_verdict(&gen) {
            Ok((c, v)) => (Some(c), Some(v), None),
            Err(e @ (Error::Unsupported(_) | Error::NotProperlyDiscontinuous(_))) => {
                (None, None, Some(e.to_string()))
            }
            Err(e) => return Err(e),
        };
        Ok(ClassifyResult {
            class,
            components,
            case,
            condition1,
            note,
        })
    }

    fn orbit(&self) -> Result<OrbitResult> {
        let gen = self.generator()?;
        let a = self.base_point(&gen)?;
        let k = self.k(tol::DEFAULT_ORBIT_K)?;
        let (epsilon, delta) = self.bands()?;
        let all = orbit(&gen, &a, k)?;
        let clusters = cluster_points(&gen.bounded_domain(), &all, epsilon, delta)?;
        let keep = self.config.knobs.report_k.unwrap_or(200).min(k) as i64;
        let samples = all.into_iter().filter(|s| s.k.abs() <= keep).collect();
        Ok(OrbitResult {
            truncation: k,
            samples,
            clusters,
        })
    }

    fn series(&self) -> Result<SeriesResult> {
        let gen = self.generator()?;
        let a = self.base_point(&gen)?;
        let k = self.k(tol::DEFAULT_SERIES_K)?;
        let kind = self.config.series.unwrap_or(SeriesKind::Poincare {
            s: 1.0,
            form: Default::default(),
        });
        let series = match kind {
            SeriesKind::Poincare { s, form } => poincare_series(&gen, &a, s, form, k)?,
            SeriesKind::Green => green_series(&gen, &a, k)?,
            SeriesKind::Delta => auxiliary_series(AuxiliaryKind::Delta, &gen, &a, k)?,
            SeriesKind::Jacobian => auxiliary_series(AuxiliaryKind::Jacobian, &gen, &a, k)?,
        };
        let potential = match self.config.knobs.h {
            Some(h) => {
                let probe = at("knobs.h", LeviProbe::standard(gen.dim()).with_step(h))?;
                let u = invariant_u(&gen, &a, k)?;
                let f = |z: &ComplexVector| invariant_u(&gen, z, k).map(|p| p.value);
                let levi = levi_report(&f, &a, &probe, 1e-6)?;
                Some(PotentialSummary { u, levi })
            }
            None => None,
        };
        Ok(SeriesResult { series, potential })
    }

    fn limitset(&self) -> Result<LimitsetResult> {
        let gen = self.generator()?;
        let a = self.base_point(&gen)?;
        let k = self.k(tol::DEFAULT_ORBIT_K)?;
        let (epsilon, delta) = self.bands()?;
        let clusters = cluster_points(&gen.bounded_domain(), &orbit(&gen, &a, k)?, epsilon, delta)?;
        let discontinuity = proper_discontinuity_check(&gen, &a, k)?;
        let theorem = match self.config.theorem {
            Some(kind) => {
                let params = TheoremParams {
                    base_points: vec![a.clone()],
                    k,
                    epsilon,
                    delta,
                };
                Some(theorem_checks(kind, &gen, &params)?)
            }
            None => None,
        };
        Ok(LimitsetResult {
            clusters,
            discontinuity,
            theorem,
        })
    }

    fn run(&self) -> Result<JobResult> {
        Ok(match self.command {
            Command::Classify => JobResult::Classify(self.classify()?),
            Command::Orbit => JobResult::Orbit(self.orbit()?),
            Command::Series => JobResult::Series(self.series()?),
            Command::Limitset => JobResult::Limitset(self.limitset()?),
            Command::Verify => JobResult::Verify(verify::run(
                self.config.suite.unwrap_or(Suite::All),
                self.config.knobs.seed.unwrap_or(1),
            )?),
            Command::Render => JobResult::Render(self.orbit()?),
        })
    }
}

/// Runs `command` on `config`. A `command` inside the config must agree.
pub fn run(command: Command, config: &JobConfig) -> Result<JobReport> {
    if let Some(c) = config.command {
        if c != command {
            return Err(config_err(
                "command",
                format!("config is for `{c}`, invoked as `{command}`"),
            ));
        }
    }
    let result = Job { config, command }.run()?;
    Ok(JobReport {
        version: VERSION.into(),
        command,
        config: config.clone(),
        result,
    })
}

/// 0 on success, 2 when a series verdict is inconclusive, 1 when a
/// verification fails.
pub fn exit_code(report: &JobReport) -> i32 {
    match &report.result {
        JobResult::Series(s) if s.series.verdict == Verdict::Inconclusive => 2,
        JobResult::Verify(v) if !v.passed => 1,
        _ => 0,
    }
}

pub fn to_json(report: &JobReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Draws the orbit or cluster data of a report.
pub fn render(report: &JobReport, path: &Path) -> Result<()> {
    let gen = report
        .config
        .generator
        .as_ref()
        .map(|g| g.build())
        .transpose()?;
    let domain = gen.map(|g| g.bounded_domain());
    let (samples, clusters): (&[OrbitSample], _) = match &report.result {
        JobResult::Orbit(o) | JobResult::Render(o) => (&o.samples, &o.clusters.clusters[..]),
        JobResult::Limitset(l) => (&[], &l.clusters.clusters[..]),
        _ => (&[], &[][..]),
    };
    let Some(domain) = domain else {
        return Err(Error::Render("report has no generator".into()));
    };
    Scene {
        domain: &domain,
        samples,
        clusters,
    }
    .write(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::AutKind;

    fn cfg(text: &str) -> JobConfig {
        parse_config(text).unwrap()
    }

    #[test]
    fn classify_sqrt2_disc() {
        let c = cfg(
            r#"{"generator": {"type": "disc", "p": ["1.4142135623730951", "0"], "q": ["1", "0"]}}"#,
        );
        let rep = run(Command::Classify, &c).unwrap();
        let JobResult::Classify(r) = &rep.result else {
            panic!()
        };
        let class = r.class.as_ref().unwrap();
        assert_eq!(class.kind, AutKind::Hyperbolic);
        let mut fixed: Vec<f64> = class.boundary_fixed_points().map(|p| p.get(0).re).collect();
        fixed.sort_by(f64::total_cmp);
        assert!((fixed[0] + 1.0).abs() < 1e-9 && (fixed[1] - 1.0).abs() < 1e-9);
        assert!(to_json(&rep).contains("\"1.4142135623730951\""));
        assert_eq!(exit_code(&rep), 0);
    }

    #[test]
    fn config_errors_carry_paths() {
        let e = parse_config(r#"{"generator": {"type": "disc", "p": ["1", "0"]}}"#).unwrap_err();
        assert!(
            matches!(&e, Error::Config { path, .. } if path == "generator"),
            "{e}"
        );
        let e = parse_config(r#"{"knobs": {"k": "ten"}}"#).unwrap_err();
        assert!(
            matches!(&e, Error::Config { path, .. } if path == "knobs.k"),
            "{e}"
        );
        let e = parse_config(r#"{"knobs": {"kk": 1}}"#).unwrap_err();
        assert!(matches!(&e, Error::Config { .. }));
        let c = cfg(r#"{"generator": {"type": "disc", "p": ["1.2", "0"], "q": ["x", "0"]}}"#);
        let e = run(Command::Classify, &c).unwrap_err();
        assert!(
            matches!(&e, Error::Config { path, .. } if path == "generator.q[0]"),
            "{e}"
        );
        let c = cfg(r#"{"generator": {"type": "disc", "p": ["1.2", "0"], "q": ["1", "0"]}}"#);
        assert!(matches!(
            run(Command::Classify, &c),
            Err(Error::Config { .. })
        ));
        let c = cfg(
            r#"{"knobs": {"k": 20000000}, "generator": {"type": "siegel", "r": "1", "c": "2", "n": 2}}"#,
        );
        assert!(
            matches!(run(Command::Series, &c), Err(Error::Config { path, .. }) if path == "knobs.k")
        );
        let c = cfg(r#"{"command": "orbit"}"#);
        assert!(matches!(
            run(Command::Series, &c),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn series_anchor_and_round_trip() {
        let c = cfg(
            r#"{"command": "series", "generator": {"type": "siegel", "r": "1", "c": "2", "n": 2},
                "series": {"kind": "poincare", "s": 1.0, "form": "defect"}, "knobs": {"k": 10000}}"#,
        );
        let rep = run(Command::Series, &c).unwrap();
        let JobResult::Series(s) = &rep.result else {
            panic!()
        };
        assert_eq!(s.series.verdict, Verdict::Converges);
        let exact = std::f64::consts::PI / std::f64::consts::PI.tanh();
        assert!((s.series.total() - exact).abs() < 1e-3);
        let json = to_json(&rep);
        let back: JobReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
        assert_eq!(to_json(&back), json);
    }

    #[test]
    fn orbit_render_and_limitset() {
        let c = cfg(
            r#"{"generator": {"type": "disc", "p": ["1.4142135623730951", "0"], "q": ["1", "0"]},
                "knobs": {"k": 400, "report_k": 50}, "theorem": "t6_ball"}"#,
        );
        let rep = run(Command::Render, &c).unwrap();
        let JobResult::Render(o) = &rep.result else {
            panic!()
        };
        assert_eq!(o.samples.len(), 101);
        assert_eq!(o.clusters.clusters.len(), 2);
        let dir = tempfile::tempdir().unwrap();
        render(&rep, &dir.path().join("o.svg")).unwrap();
        let back: JobReport = serde_json::from_str(&to_json(&rep)).unwrap();
        assert_eq!(back, rep);
        let lim = run(Command::Limitset, &c).unwrap();
        let JobResult::Limitset(l) = &lim.result else {
            panic!()
        };
        assert!(l.discontinuity.properly_discontinuous);
        assert!(l.theorem.as_ref().unwrap().passed);
        let cls = run(Command::Classify, &c).unwrap();
        assert!(matches!(
            render(&cls, &dir.path().join("c.svg")),
            Err(Error::Render(_))
        ));
    }

    #[test]
    fn generator_specs_build() {
        for text in [
            r#"{"type": "ball", "center": [["0.5", "0"], ["0", "0.1"]], "phases": ["0", "1"]}"#,
            r#"{"type": "ball", "center": [["0.5", "0"]], "unitary": [[["0", "1"]]]}"#,
            r#"{"type": "siegel", "r": "1", "c": "0.3", "a": [["0.5", "0.2"]], "phases": ["1"]}"#,
            r#"{"type": "bidisc", "gamma1": {"p": ["1.5", "0"], "q": ["1.118033988749895", "0"]},
                "gamma2": {"p": ["2", "0"], "q": ["1.7320508075688772", "0"]}, "swap": true}"#,
            r#"{"type": "weighted_dilation", "weights": [2, 1], "r": "2"}"#,
        ] {
            let spec: GeneratorSpec = serde_json::from_str(text).unwrap();
            spec.build().unwrap();
        }
        let bad: GeneratorSpec =
            serde_json::from_str(r#"{"type": "ball", "center": [["0.5", "0"]], "phases": ["0"], "unitary": [[["1", "0"]]]}"#)
                .unwrap();
        assert!(matches!(bad.build(), Err(Error::Config { .. })));
    }

    #[test]
    fn inconclusive_series_exits_with_two() {
        let c = cfg(
            r#"{"generator": {"type": "ball", "center": [["0.5", "0"], ["0", "0"]]}, "knobs": {"k": 10}}"#,
        );
        let rep = run(Command::Series, &c).unwrap();
        assert_eq!(exit_code(&rep), 2);
    }
}
