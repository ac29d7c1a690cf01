//! Orbits, boundary cluster sets and the limit-set checks.

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::automorphism::{AutKind, Generator, Tracked};
use crate::domain::{
    project_to_boundary, BoundaryPoint, ComplexVector, Direction, DomainTag, C64, ZERO,
};
use crate::error::{Error, Result};
use crate::numerics::ls_slope;
use crate::potential::{barrier_witness, BarrierKind};
use crate::series::{auxiliary_series, AuxiliaryKind, Verdict};
use crate::tol;

/// `gamma^k(a)` for `0 <= k <= K` (`forward`) and `gamma^{-k}(a)` (`backward`);
/// both start with `a` itself.
#[derive(Debug, Clone)]
pub struct Rays {
    pub forward: Vec<Tracked>,
    pub backward: Vec<Tracked>,
}

impl Rays {
    /// Sample `k` for `-K <= k <= K`.
    pub fn get(&self, k: i64) -> &Tracked {
        if k >= 0 {
            &self.forward[k as usize]
        } else {
            &self.backward[k.unsigned_abs() as usize]
        }
    }

    pub fn truncation(&self) -> usize {
        self.forward.len() - 1
    }
}

fn ray(
    gen: &Generator,
    start: &Tracked,
    direction: Direction,
    k_max: usize,
) -> Result<Vec<Tracked>> {
    let stepper = gen.stepper(direction)?;
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(start.clone());
    for k in 0..k_max {
        let next = stepper.step(&out[k]);
        out.push(next);
    }
    Ok(out)
}

/// Both rays of the orbit of `a`, computed by repeated application with the
/// defect carried along; the two rays run concurrently.
pub fn rays(gen: &Generator, a: &ComplexVector, k_max: usize) -> Result<Rays> {
    let start = gen.track(a)?;
    let (f, b) = rayon::join(
        || ray(gen, &start, Direction::Forward, k_max),
        || ray(gen, &start, Direction::Inverse, k_max),
    );
    Ok(Rays {
        forward: f?,
        backward: b?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    pub k: i64,
    pub point: ComplexVector,
    pub defect: f64,
}

/// Samples `gamma^k(a)`, `|k| <= K`, in increasing `k`.
pub fn orbit(gen: &Generator, a: &ComplexVector, k_max: usize) -> Result<Vec<OrbitSample>> {
    let r = rays(gen, a, k_max)?;
    let kk = k_max as i64;
    Ok((-kk..=kk)
        .map(|k| {
            let t = r.get(k);
            OrbitSample {
                k,
                point: t.point.clone(),
                defect: t.defect(),
            }
        })
        .collect())
}

/// True when a ray makes no progress toward the boundary: the smallest
/// defect on its second half is at least 0.9 of the smallest on its first.
pub fn ray_stalls(ray: &[Tracked]) -> bool {
    defects_stall(&ray.iter().map(|t| t.defect()).collect::<Vec<_>>())
}

fn defects_stall(defects: &[f64]) -> bool {
    let n = defects.len();
    if n < 16 {
        return false;
    }
    let min = |s: &[f64]| s.iter().copied().fold(f64::INFINITY, f64::min);
    let first = min(&defects[1..n / 2]);
    let second = min(&defects[n / 2..]);
    // subnormal defects can stick at the smallest positive value
    second >= f64::MIN_POSITIVE && second >= 0.9 * first
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Forward,
    Backward,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub point: BoundaryPoint,
    pub hits: usize,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub clusters: Vec<Cluster>,
    pub epsilon: f64,
    pub delta: f64,
    pub samples: usize,
    pub interior_cluster_found: bool,
}

impl ClusterReport {
    pub fn points(&self) -> Vec<&ComplexVector> {
        self.clusters.iter().map(|c| &c.point.point).collect()
    }
}

/// Pairs closer than `eps`, found by a sweep along `Re z1`. `wanted` filters
/// pairs before the distance is computed; `visit` returns false to stop.
fn close_pairs<S>(
    points: &[&ComplexVector],
    eps: f64,
    state: &mut S,
    wanted: impl Fn(&mut S, usize, usize) -> bool,
    visit: impl Fn(&mut S, usize, usize) -> bool,
) {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[i]
            .get(0)
            .re
            .total_cmp(&points[j].get(0).re)
            .then(i.cmp(&j))
    });
    for (pos, &i) in order.iter().enumerate() {
        let x = points[i].get(0).re;
        for &j in &order[pos + 1..] {
            if points[j].get(0).re - x >= eps {
                break;
            }
            let (a, b) = (i.min(j), i.max(j));
            if wanted(state, a, b) && points[i].distance(points[j]) < eps && !visit(state, a, b) {
                return;
            }
        }
    }
}

/// Union of all pairs closer than `eps`. Points are first bucketed in cubes
/// of diameter `eps / 2`, whose members are linked outright; occupied cubes
/// whose centres are within `2 eps` are then compared member by member.
fn single_linkage(points: &[&ComplexVector], eps: f64) -> UnionFind<usize> {
    let mut uf = UnionFind::<usize>::new(points.len());
    let Some(first) = points.first() else {
        return uf;
    };
    let dims = 2 * first.dim();
    let side = eps / (2.0 * (dims as f64).sqrt());
    let mut cells: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        let key = p
            .entries()
            .iter()
            .flat_map(|c| [c.re, c.im])
            .map(|x| (x / side).floor() as i64)
            .collect();
        cells.entry(key).or_default().push(i);
    }
    let cells: Vec<(Vec<i64>, Vec<usize>)> = cells.into_iter().collect();
    for (_, members) in &cells {
        for w in members.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let reach = (2.0 * eps / side).ceil() as i64;
    // Cells are sorted by their first key coordinate.
    for a in 0..cells.len() {
        for b in a + 1..cells.len() {
            let (ka, kb) = (&cells[a].0, &cells[b].0);
            if kb[0] - ka[0] > reach {
                break;
            }
            if ka.iter().zip(kb).any(|(x, y)| (x - y).abs() > reach) {
                continue;
            }
            let (ma, mb) = (&cells[a].1, &cells[b].1);
            if uf.equiv(ma[0], mb[0]) {
                continue;
            }
            'pairs: for &i in ma {
                for &j in mb {
                    if points[i].distance(points[j]) < eps {
                        uf.union(i, j);
                        break 'pairs;
                    }
                }
            }
        }
    }
    uf
}

/// Limit of a ray converging like `p + A/k`, from samples at `k1 > k2 > k3`
/// (absolute indices); `None` when the three samples do not follow that rate.
fn richardson(
    x1: &ComplexVector,
    k1: f64,
    x2: &ComplexVector,
    k2: f64,
    x3: &ComplexVector,
    k3: f64,
) -> Option<ComplexVector> {
    let near = x2.distance(x1);
    let far = x3.distance(x2);
    if near == 0.0 {
        return None;
    }
    let expected = (1.0 / k3 - 1.0 / k2) / (1.0 / k2 - 1.0 / k1);
    let measured = far / near;
    if !(0.7..=1.4).contains(&(measured / expected)) {
        return None;
    }
    let w = k1 / (k1 - k2);
    Some(
        x1.scale(C64::new(w, 0.0))
            .sub(&x2.scale(C64::new(w - 1.0, 0.0))),
    )
}

struct Component {
    members: Vec<usize>,
    rep: ComplexVector,
    depth: f64,
}

/// Boundary cluster set of orbit samples. Samples with defect below `delta`
/// are projected to the boundary and linked when closer than `epsilon`;
/// groups containing no sample with `|k| > K/2` are dropped, and each
/// remaining group is represented by its deepest sample, or by the Richardson
/// limit of its ray when the approach is `O(1/k)`; representatives closer
/// than `epsilon` are merged. Interior accumulation is flagged by two
/// samples with defect at least `delta`, indices more than `K/4` apart and
/// distance below `epsilon`, or by both rays stalling.
pub fn cluster_points(
    domain: &DomainTag,
    samples: &[OrbitSample],
    epsilon: f64,
    delta: f64,
) -> Result<ClusterReport> {
    if !(epsilon > 0.0 && delta > 0.0) {
        return Err(Error::InvalidParameter(
            "epsilon and delta must be positive".into(),
        ));
    }
    let k_max = samples
        .iter()
        .map(|s| s.k.unsigned_abs())
        .max()
        .unwrap_or(0);

    let near: Vec<usize> = (0..samples.len())
        .filter(|&i| samples[i].defect < delta)
        .collect();
    let projected: Vec<ComplexVector> = near
        .iter()
        .map(|&i| project_to_boundary(domain, &samples[i].point, delta))
        .collect();
    let refs: Vec<&ComplexVector> = projected.iter().collect();
    let uf = single_linkage(&refs, epsilon);
    let labels = uf.into_labeling();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        let g = *slot.entry(l).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }

    // Groups that no sample beyond K/2 reaches are transients of the approach.
    let mut comps: Vec<Component> = groups
        .into_iter()
        .filter(|members| {
            members
                .iter()
                .any(|&i| samples[near[i]].k.unsigned_abs() * 2 > k_max)
        })
        .map(|members| {
            let by_k = |i: &usize| samples[near[*i]].k;
            let deepest = *members
                .iter()
                .min_by(|a, b| {
                    samples[near[**a]]
                        .defect
                        .total_cmp(&samples[near[**b]].defect)
                        .then(by_k(a).cmp(&by_k(b)))
                })
                .expect("nonempty group");
            let depth = samples[near[deepest]].defect;
            let k1 = by_k(&deepest);
            let mut rep = projected[deepest].clone();
            if k1 != 0 {
                let same_ray = |bound: u64| {
                    members
                        .iter()
                        .filter(|i| {
                            by_k(i).signum() == k1.signum() && by_k(i).unsigned_abs() <= bound
                        })
                        .max_by_key(|i| by_k(i).unsigned_abs())
                        .copied()
                };
                let a1 = k1.unsigned_abs();
                if let Some(i2) = same_ray(a1 / 2) {
                    let a2 = by_k(&i2).unsigned_abs();
                    if let Some(i3) = same_ray(a2 / 2) {
                        let a3 = by_k(&i3).unsigned_abs();
                        if a3 > 0 && a2 > a3 {
                            if let Some(x) = richardson(
                                &projected[deepest],
                                a1 as f64,
                                &projected[i2],
                                a2 as f64,
                                &projected[i3],
                                a3 as f64,
                            ) {
                                rep = project_to_boundary(domain, &x, delta);
                            }
                        }
                    }
                }
            }
            Component {
                members,
                rep,
                depth,
            }
        })
        .collect();

    // Merge representatives closer than epsilon until none remain.
    loop {
        let mut merged = false;
        'outer: for i in 0..comps.len() {
            for j in i + 1..comps.len() {
                if comps[i].rep.distance(&comps[j].rep) < epsilon {
                    let b = comps.remove(j);
                    let a = &mut comps[i];
                    if b.depth < a.depth {
                        a.rep = b.rep;
                        a.depth = b.depth;
                    }
                    a.members.extend(b.members);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }

    let mut clusters = Vec::with_capacity(comps.len());
    for c in comps {
        let (mut fwd, mut bwd) = (false, false);
        for &i in &c.members {
            match samples[near[i]].k.signum() {
                1 => fwd = true,
                -1 => bwd = true,
                _ => {}
            }
        }
        let side = match (fwd, bwd) {
            (true, false) => Side::Forward,
            (false, true) => Side::Backward,
            _ => Side::Both,
        };
        clusters.push(Cluster {
            point: BoundaryPoint::new(c.rep, domain.clone())?,
            hits: c.members.len(),
            side,
        });
    }

    let inner: Vec<usize> = (0..samples.len())
        .filter(|&i| samples[i].defect >= delta)
        .collect();
    let inner_points: Vec<&ComplexVector> = inner.iter().map(|&i| &samples[i].point).collect();
    let mut pair_found = false;
    close_pairs(
        &inner_points,
        epsilon,
        &mut pair_found,
        |_, i, j| samples[inner[i]].k.abs_diff(samples[inner[j]].k) > k_max / 4,
        |found, _, _| {
            *found = true;
            false
        },
    );
    let ray_defects = |sign: i64| {
        let mut r: Vec<(u64, f64)> = samples
            .iter()
            .filter(|s| s.k == 0 || s.k.signum() == sign)
            .map(|s| (s.k.unsigned_abs(), s.defect))
            .collect();
        r.sort_by_key(|x| x.0);
        r.into_iter().map(|x| x.1).collect::<Vec<_>>()
    };
    let stalled = defects_stall(&ray_defects(1)) && defects_stall(&ray_defects(-1));

    Ok(ClusterReport {
        clusters,
        epsilon,
        delta,
        samples: samples.len(),
        interior_cluster_found: pair_found || stalled,
    })
}

/// Cluster report of the orbit of `a` with the default bands.
pub fn orbit_clusters(gen: &Generator, a: &ComplexVector, k_max: usize) -> Result<ClusterReport> {
    let samples = orbit(gen, a, k_max)?;
    cluster_points(
        &gen.bounded_domain(),
        &samples,
        tol::DEFAULT_EPSILON,
        tol::DEFAULT_DELTA,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscontinuityReport {
    pub properly_discontinuous: bool,
    pub interior_cluster_found: bool,
    /// Verdict of the boundary-distance series, when it could be formed.
    pub witness: Option<Verdict>,
    /// False when a convergent witness coexists with interior accumulation.
    pub consistent: bool,
}

/// No interior accumulation of the orbit of `a`; cross-checked against the
/// boundary-distance series, whose convergence forces proper discontinuity.
pub fn proper_discontinuity_check(
    gen: &Generator,
    a: &ComplexVector,
    k_max: usize,
) -> Result<DiscontinuityReport> {
    let report = orbit_clusters(gen, a, k_max)?;
    let witness = match auxiliary_series(
        AuxiliaryKind::Delta,
        gen,
        a,
        k_max.min(tol::DEFAULT_SERIES_K),
    ) {
        Ok(r) => Some(r.verdict),
        Err(Error::NotProperlyDiscontinuous(_)) => None,
        Err(e) => return Err(e),
    };
    let properly_discontinuous = !report.interior_cluster_found;
    Ok(DiscontinuityReport {
        properly_discontinuous,
        interior_cluster_found: report.interior_cluster_found,
        witness,
        consistent: properly_discontinuous || witness != Some(Verdict::Converges),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub k: i64,
    pub value_at_q: f64,
    pub sup_over_grid: f64,
    pub grid_points: usize,
    pub factor: f64,
    pub abs_tol: f64,
    pub passed: bool,
}

/// Lattice points of the closed ball of radius `radius` inside the domain.
fn grid(gen: &Generator, radius: f64) -> Vec<ComplexVector> {
    let n = gen.dim();
    let m: usize = if 2 * n <= 4 { 5 } else { 3 };
    let coords: Vec<f64> = (0..m)
        .map(|i| -radius + 2.0 * radius * i as f64 / (m - 1) as f64)
        .collect();
    let mut out = Vec::new();
    let total = m.pow(2 * n as u32);
    for idx in 0..total {
        let mut rest = idx;
        let mut reals = Vec::with_capacity(2 * n);
        for _ in 0..2 * n {
            reals.push(coords[rest % m]);
            rest /= m;
        }
        let z = ComplexVector::new(
            (0..n)
                .map(|j| C64::new(reals[2 * j], reals[2 * j + 1]))
                .collect(),
        )
        .expect("finite");
        if z.norm() <= radius * (1.0 + 1e-12) && gen.track(&z).is_ok() {
            out.push(z);
        }
    }
    out
}

/// `sup |gamma^k(z) - p|` over a grid in `|z| <= radius`, compared with the
/// value at `q`. Passes when the supremum is at most `factor` times the value
/// at `q`, or at most `abs_tol`.
pub fn uniform_convergence_check(
    gen: &Generator,
    q: &ComplexVector,
    p: &ComplexVector,
    radius: f64,
    k: i64,
    factor: f64,
    abs_tol: f64,
) -> Result<UniformityReport> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "grid radius {radius} outside (0, 1)"
        )));
    }
    let plan = gen.powers()?;
    let at = |j: i64, z: &ComplexVector| -> Result<f64> {
        Ok(plan.apply(j, &gen.track(z)?)?.point.distance(p))
    };
    let value_at_q = at(k, q)?;
    let half = at(k / 2, q)?;
    if !(value_at_q <= 1e-3 && (value_at_q < half || half == 0.0)) {
        return Err(Error::Premise(format!(
            "orbit of q does not approach p: |gamma^k q - p| = {value_at_q:e}, at k/2 {half:e}"
        )));
    }
    let pts = grid(gen, radius);
    let mut sup: f64 = 0.0;
    for z in &pts {
        sup = sup.max(at(k, z)?);
    }
    Ok(UniformityReport {
        k,
        value_at_q,
        sup_over_grid: sup,
        grid_points: pts.len(),
        factor,
        abs_tol,
        passed: sup <= factor * value_at_q || sup <= abs_tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremKind {
    T6Ball,
    T7Bidisc,
    WeightedExample,
    Prop2BasepointIndependence,
    T4KernelBlowup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremParams {
    /// Base points of the orbits; the origin when empty (base-point independence uses five
    /// fixed points near the origin).
    #[serde(default)]
    pub base_points: Vec<ComplexVector>,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
}

impl Default for TheoremParams {
    fn default() -> Self {
        Self {
            base_points: vec![],
            k: tol::DEFAULT_ORBIT_K,
            epsilon: tol::DEFAULT_EPSILON,
            delta: tol::DEFAULT_DELTA,
        }
    }
}

/// One measured quantity against its threshold (`value <= threshold`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub value: f64,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub kind: TheoremKind,
    pub clusters: Vec<ClusterReport>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn default_base_points(n: usize) -> Vec<ComplexVector> {
    let mut out = vec![ComplexVector::zeros(n)];
    for (s, t) in [(0.3, 0.0), (-0.2, 0.25), (0.1, -0.4), (0.05, 0.15)] {
        let mut e = vec![ZERO; n];
        e[0] = C64::new(s, t);
        e[n - 1] += C64::new(t / 2.0, s / 3.0);
        out.push(ComplexVector::new(e).expect("finite"));
    }
    out
}

/// One-sided Hausdorff distance from `a` to `b` (infinite when `b` is empty
/// and `a` is not).
fn hausdorff_one_sided(a: &[&ComplexVector], b: &[&ComplexVector]) -> f64 {
    a.iter()
        .map(|x| {
            b.iter()
                .map(|y| x.distance(y))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn hausdorff(a: &[&ComplexVector], b: &[&ComplexVector]) -> f64 {
    hausdorff_one_sided(a, b).max(hausdorff_one_sided(b, a))
}

fn non_elliptic(kind: AutKind, what: &str) -> Result<()> {
    match kind {
        AutKind::Parabolic | AutKind::Hyperbolic => Ok(()),
        _ => Err(Error::Premise(format!(
            "{what} is {kind:?}; a non-elliptic generator is required"
        ))),
    }
}

pub fn theorem_checks(
    kind: TheoremKind,
    gen: &Generator,
    params: &TheoremParams,
) -> Result<TheoremReport> {
    let n = gen.dim();
    let base = params
        .base_points
        .first()
        .cloned()
        .unwrap_or_else(|| ComplexVector::zeros(n));
    let clusters_of = |a: &ComplexVector| -> Result<ClusterReport> {
        let samples = orbit(gen, a, params.k)?;
        cluster_points(
            &gen.bounded_domain(),
            &samples,
            params.epsilon,
            params.delta,
        )
    };
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    match kind {
        TheoremKind::T6Ball | TheoremKind::T4KernelBlowup => {
            let ball = gen
                .ball_model()
                .map_err(|_| Error::Premise("a generator acting on the ball is required".into()))?;
            let class = gen.classify(10_000)?;
            non_elliptic(class.kind, "the generator")?;
            let rep = clusters_of(&base)?;
            if kind == TheoremKind::T6Ball {
                let fixed: Vec<&ComplexVector> = class.boundary_fixed_points().collect();
                let pts = rep.points();
                let moved = pts
                    .iter()
                    .map(|p| ball.apply_unchecked(p).distance(p))
                    .fold(0.0, f64::max);
                checks.push(Check::new("cluster_count", pts.len() as f64, 2.0));
                checks.push(Check::new(
                    "interior_cluster",
                    rep.interior_cluster_found as u8 as f64,
                    0.0,
                ));
                checks.push(Check::new("max |gamma(p) - p|", moved, 1e-6));
                checks.push(Check::new(
                    "distance to fixed points",
                    hausdorff_one_sided(&pts, &fixed),
                    1e-6,
                ));
            } else {
                let r = rays(gen, &base, params.k)?;
                let log_k0 = potential_log_kernel_constant(n);
                let mut decreases = 0usize;
                let mut worst_exponent: f64 = 0.0;
                for ray in [&r.forward, &r.backward] {
                    let tail: Vec<f64> = ray
                        .iter()
                        .map(|t| t.defect())
                        .filter(|&d| d < 1e-3 && d > 0.0)
                        .collect();
                    let logk: Vec<f64> = tail
                        .iter()
                        .map(|d| log_k0 - (n as f64 + 1.0) * d.ln())
                        .collect();
                    decreases += logk.windows(2).filter(|w| w[1] < w[0]).count();
                    if tail.len() >= 2 {
                        let xs: Vec<f64> = tail.iter().map(|d| d.ln()).collect();
                        if let Some(s) = ls_slope(&xs, &logk) {
                            worst_exponent = worst_exponent.max((s + n as f64 + 1.0).abs());
                        }
                    }
                }
                checks.push(Check::new(
                    "kernel decreases along the rays",
                    decreases as f64,
                    0.0,
                ));
                checks.push(Check::new(
                    "|log-log slope + (n + 1)|",
                    worst_exponent,
                    1e-9,
                ));
            }
            reports.push(rep);
        }
        TheoremKind::T7Bidisc => {
            let Generator::Bidisc(b) = gen else {
                return Err(Error::Premise("a bidisc generator is required".into()));
            };
            if !b.swap {
                return Err(Error::Premise("the swap case is required".into()));
            }
            let h1 = b.gamma2.compose(&b.gamma1).classify();
            let h2 = b.gamma1.compose(&b.gamma2).classify();
            non_elliptic(h1.kind, "gamma2 o gamma1")?;
            non_elliptic(h2.kind, "gamma1 o gamma2")?;
            let mut cands = Vec::new();
            for p in h1.boundary_fixed_points() {
                for q in h2.boundary_fixed_points() {
                    let x = ComplexVector::from_parts(p.get(0), &[q.get(0)]);
                    cands.push(b.apply_unchecked(&x));
                    cands.push(x);
                }
            }
            let rep = clusters_of(&base)?;
            let pts = rep.points();
            let cand_refs: Vec<&ComplexVector> = cands.iter().collect();
            checks.push(Check::new("cluster_count", pts.len() as f64, 8.0));
            checks.push(Check::new(
                "interior_cluster",
                rep.interior_cluster_found as u8 as f64,
                0.0,
            ));
            checks.push(Check::new(
                "distance to Fix x Fix and its image",
                hausdorff_one_sided(&pts, &cand_refs),
                1e-6,
            ));
            reports.push(rep);
        }
        TheoremKind::WeightedExample => {
            let Generator::WeightedDilation { r, .. } = gen else {
                return Err(Error::Premise(
                    "a weighted dilation generator is required".into(),
                ));
            };
            if (r - 1.0).abs() <= 1e-15 {
                return Err(Error::Premise("the dilation must be nontrivial".into()));
            }
            let rep = clusters_of(&base)?;
            let pts = rep.points();
            let tail = vec![ZERO; n - 1];
            let expected = [
                ComplexVector::from_parts(C64::new(1.0, 0.0), &tail),
                ComplexVector::from_parts(C64::new(-1.0, 0.0), &tail),
            ];
            let exp_refs: Vec<&ComplexVector> = expected.iter().collect();
            let barrier = pts
                .iter()
                .map(|p| barrier_witness(&BarrierKind::WeightedExample, p).map(f64::abs))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            checks.push(Check::new(
                "cluster set vs {(1,0'), (-1,0')}",
                hausdorff(&pts, &exp_refs),
                1e-6,
            ));
            checks.push(Check::new("|barrier| at clusters", barrier, 1e-9));
            checks.push(Check::new(
                "interior_cluster",
                rep.interior_cluster_found as u8 as f64,
                0.0,
            ));
            reports.push(rep);
        }
        TheoremKind::Prop2BasepointIndependence => {
            let bases = if params.base_points.len() >= 2 {
                params.base_points.clone()
            } else {
                default_base_points(n)
            };
            for a in &bases {
                reports.push(clusters_of(a)?);
            }
            let mut worst: f64 = 0.0;
            for i in 0..reports.len() {
                for j in i + 1..reports.len() {
                    worst = worst.max(hausdorff(&reports[i].points(), &reports[j].points()));
                }
            }
            checks.push(Check::new(
                "pairwise cluster-set distance",
                worst,
                2.0 * params.epsilon,
            ));
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(TheoremReport {
        kind,
        clusters: reports,
        checks,
        passed,
    })
}

/// `log(n! / pi^n)`, the constant of the ball kernel.
fn potential_log_kernel_constant(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum::<f64>() - n as f64 * std::f64::consts::PI.ln()
}
