//! Decreasing smooth approximations of class-`P` functions and numerical
//! checks of the convergence of their conjugates.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::convex::{legendre_grid, mollify, Grid, PlConvexFunction, SampledFunction};
use crate::error::{invalid, Error, Result};
use crate::ma::DiscreteMeasure;
use crate::ot::{initial_weights, solve_dual, SolverOptions};
use crate::polytope::{Density, Polytope};

/// Grid-limited convergence tolerance.
pub const TOL_CONV: f64 = 1e-4;

/// `sqrt(1 + |x|^2) - 1`: smooth, strictly convex, slopes of norm < 1.
pub fn strict_term(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    r2 / (1.0 + (1.0 + r2).sqrt())
}

/// `F_n = mollify(F, eps_n) + eps_n s + c_n`, decreasing in `n`.
#[derive(Debug, Clone)]
pub struct ApproxSequence {
    pub base: SampledFunction,
    pub schedule: Vec<f64>,
    pub members: Vec<SampledFunction>,
    /// The constants `c_n` enforcing monotonicity.
    pub shifts: Vec<f64>,
}

impl ApproxSequence {
    /// `min (F_n - F_{n+1})` and `min (F_n - F)` over nodes where both are
    /// finite; both must be `>= 0`.
    pub fn monotonicity_gaps(&self) -> (f64, f64) {
        let gap = |a: &SampledFunction, b: &SampledFunction| {
            a.values()
                .iter()
                .zip(b.values())
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(x, y)| x - y)
                .fold(f64::INFINITY, f64::min)
        };
        let consecutive = self
            .members
            .windows(2)
            .map(|w| gap(&w[0], &w[1]))
            .fold(f64::INFINITY, f64::min);
        let above = self
            .members
            .iter()
            .map(|m| gap(m, &self.base))
            .fold(f64::INFINITY, f64::min);
        (consecutive, above)
    }

    /// Conjugates of the base and of every member on `dual`.
    pub fn conjugates(&self, dual: &Grid) -> Result<Conjugates> {
        Ok(Conjugates {
            limit: legendre_grid(&self.base, dual)?,
            members: self
                .members
                .iter()
                .map(|m| legendre_grid(m, dual))
                .collect::<Result<_>>()?,
        })
    }
}

/// `F^*` and `F_n^*` on a shared dual grid.
#[derive(Debug, Clone)]
pub struct Conjugates {
    pub limit: SampledFunction,
    pub members: Vec<SampledFunction>,
}

fn check_base_class(f: &SampledFunction, p: &Polytope) -> Result<()> {
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: f.dim(),
        });
    }
    let slack = 1e-9 * (1.0 + p.diameter());
    for flat in 0..f.values().len() {
        if let Some(g) = f.central_gradient(flat, 1) {
            let v = p.violation(&g);
            if v > slack {
                return Err(Error::ClassViolation(format!(
                    "gradient {g:?} at {:?} leaves P by {v:e}",
                    f.grid().point(flat)
                )));
            }
        }
    }
    Ok(())
}

pub fn make_decreasing_sequence(f: &SampledFunction, p: &Polytope, schedule: &[f64]) -> Result<ApproxSequence> {
    if schedule.is_empty() || schedule.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return invalid("schedule must be a nonempty list of positive scales");
    }
    if schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return invalid("schedule must be strictly decreasing");
    }
    check_base_class(f, p)?;
    let mut raw = Vec::with_capacity(schedule.len());
    for &eps in schedule {
        let m = mollify(f, eps)?;
        raw.push(m.map(|x, v| v + eps * strict_term(x))?);
    }
    let n = raw.len();
    let mut shifts = vec![0.0; n];
    for k in (0..n.saturating_sub(1)).rev() {
        let need = raw[k + 1]
            .values()
            .iter()
            .zip(raw[k].values())
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| a + shifts[k + 1] - b)
            .fold(0.0, f64::max);
        shifts[k] = need;
    }
    let members = raw
        .into_iter()
        .zip(&shifts)
        .map(|(m, c)| m.map(|_, v| v + c)?.tagged_convex())
        .collect::<Result<Vec<_>>>()?;
    Ok(ApproxSequence {
        base: f.clone(),
        schedule: schedule.to_vec(),
        members,
        shifts,
    })
}

/// One checked property: the tracked series, the value compared against the
/// tolerance, and the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub pass: bool,
    pub worst_case: f64,
    pub series: Vec<f64>,
}

impl PropertyReport {
    fn below(series: Vec<f64>, tol: f64) -> Self {
        let last = series.last().copied().unwrap_or(f64::NAN);
        Self {
            pass: last <= tol,
            worst_case: last,
            series,
        }
    }

    fn flag(pass: bool, worst_case: f64) -> Self {
        Self {
            pass,
            worst_case,
            series: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ConvergenceReport {
    pub properties: BTreeMap<String, PropertyReport>,
}

impl ConvergenceReport {
    pub fn pass(&self) -> bool {
        self.properties.values().all(|p| p.pass)
    }

    fn merge(&mut self, prefix: &str, other: ConvergenceReport) {
        for (k, v) in other.properties {
            self.properties.insert(format!("{prefix}{k}"), v);
        }
    }
}

/// Gradient at a node if central differences with steps 1, 2 and 4 agree
/// within `10 TOL_CONV`.
pub fn stable_gradient(s: &SampledFunction, flat: usize) -> Option<Vec<f64>> {
    let g1 = s.central_gradient(flat, 1)?;
    for step in [2, 4] {
        let g = s.central_gradient(flat, step)?;
        if g.iter().zip(&g1).any(|(a, b)| (a - b).abs() > 10.0 * TOL_CONV) {
            return None;
        }
    }
    Some(g1)
}

fn max_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn interior_compact(k: &Polytope, p: &Polytope) -> Result<()> {
    if k.vertices().iter().any(|v| p.depth(v) <= 0.0) {
        return invalid("compact set touches the boundary of P");
    }
    Ok(())
}

/// Sup and gradient errors of `F_n^*` against `F^*` on each compact, plus the
/// one-sided bound `F_n^* <= F^*` at every dual node.
pub fn check_lemma_a(conj: &Conjugates, p: &Polytope, compacts: &[Polytope]) -> Result<ConvergenceReport> {
    let mut report = ConvergenceReport::default();
    let grid = conj.limit.grid();
    let lim = conj.limit.values();
    for (ki, k) in compacts.iter().enumerate() {
        interior_compact(k, p)?;
        let nodes: Vec<usize> = (0..lim.len()).filter(|&i| k.contains(&grid.point(i), 0.0)).collect();
        if nodes.is_empty() {
            return invalid("compact set contains no dual nodes");
        }
        let stable: Vec<(usize, Vec<f64>)> = nodes
            .iter()
            .filter_map(|&i| stable_gradient(&conj.limit, i).map(|g| (i, g)))
            .collect();
        let mut sup = Vec::new();
        let mut grad = Vec::new();
        for m in &conj.members {
            let mv = m.values();
            sup.push(nodes.iter().map(|&i| (mv[i] - lim[i]).abs()).fold(0.0, f64::max));
            grad.push(
                stable
                    .iter()
                    .map(|(i, g)| {
                        m.central_gradient(*i, 1)
                            .map_or(f64::INFINITY, |gn| max_norm_diff(&gn, g))
                    })
                    .fold(0.0, f64::max),
            );
        }
        report
            .properties
            .insert(format!("K{ki}.sup_error"), PropertyReport::below(sup, TOL_CONV));
        report
            .properties
            .insert(format!("K{ki}.gradient_error"), PropertyReport::below(grad, TOL_CONV));
        report.properties.insert(
            format!("K{ki}.stable_nodes"),
            PropertyReport::flag(!stable.is_empty(), stable.len() as f64),
        );
    }
    let mut one_sided = Vec::new();
    for m in &conj.members {
        let worst = m
            .values()
            .iter()
            .zip(lim)
            .filter(|(_, l)| l.is_finite())
            .map(|(a, l)| (a - l) / (1.0 + l.abs()))
            .fold(f64::NEG_INFINITY, f64::max);
        one_sided.push(worst);
    }
    let worst = one_sided.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    report.properties.insert(
        "one_sided".into(),
        PropertyReport {
            pass: worst <= 1e-12,
            worst_case: worst,
            series: one_sided,
        },
    );
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundednessReport {
    pub bounded: bool,
    /// `sup_n sup_{B(x, delta/2)} |grad F_n^*|` (max norm).
    pub observed: f64,
    /// `M + 4 eta / (delta - 2h)`.
    pub bound: f64,
    /// Lipschitz constant of `F^*` on `B(x, delta)`.
    pub m: f64,
    /// `sup_n sup_{B(x, delta)} |F_n^* - F^*|`.
    pub eta: f64,
    /// `eta + |grad F^*(x)| delta / 2`, recorded only.
    pub literal: f64,
}

/// Uniform-in-`n` bound on `grad F_n^*` near `x`. For convex grid functions a
/// chord of length `t >= delta/2 - h` inside `B(x, delta)` bounds the central
/// difference, which gives `M + 2 eta / t`.
pub fn check_local_boundedness(conj: &Conjugates, p: &Polytope, x: &[f64], delta: f64) -> Result<BoundednessReport> {
    let grid = conj.limit.grid();
    let h = grid.spacing().iter().copied().fold(0.0, f64::max);
    if !(delta > 2.0 * h) {
        return invalid("delta must exceed two dual grid steps");
    }
    if p.depth(x) <= delta {
        return invalid("ball leaves the interior of P");
    }
    let lim = &conj.limit;
    let near = |r: f64| -> Vec<usize> {
        (0..lim.values().len())
            .filter(|&i| {
                let q = grid.point(i);
                q.iter().zip(x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) <= r
            })
            .collect()
    };
    let center = near(0.5 * h + 1e-12)
        .into_iter()
        .min_by(|&a, &b| {
            let d = |i: usize| crate::linalg::dist(&grid.point(i), x);
            d(a).total_cmp(&d(b))
        })
        .ok_or_else(|| Error::InvalidInput("x is not near a dual node".into()))?;
    let gx = stable_gradient(lim, center).ok_or_else(|| Error::InvalidInput("F* is not differentiable at x".into()))?;
    let ball = near(delta);
    let strides = grid.strides();
    let mut m: f64 = 0.0;
    for &i in &ball {
        let idx = grid.multi_index(i);
        for k in 0..grid.dim() {
            if idx[k] + 1 < grid.counts()[k] {
                let j = i + strides[k];
                let s = (lim.values()[j] - lim.values()[i]) / grid.spacing()[k];
                if s.is_finite() {
                    m = m.max(s.abs());
                }
            }
        }
    }
    let mut eta: f64 = 0.0;
    let mut observed: f64 = 0.0;
    let half = near(0.5 * delta);
    for mem in &conj.members {
        for &i in &ball {
            eta = eta.max((mem.values()[i] - lim.values()[i]).abs());
        }
        for &i in &half {
            if let Some(g) = mem.central_gradient(i, 1) {
                observed = observed.max(g.iter().fold(0.0, |a, v| a.max(v.abs())));
            }
        }
    }
    let bound = m + 4.0 * eta / (delta - 2.0 * h) + 1e-9;
    let pnorm = gx.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(BoundednessReport {
        bounded: observed <= bound,
        observed,
        bound,
        m,
        eta,
        literal: eta + pnorm * delta / 2.0,
    })
}

/// Graphical convergence of `grad F_n^*`: for each sample at a stable node of
/// `F^*`, the nearest graph point `(x_n, grad F_n^*(x_n))` among nodes within
/// two steps, and value convergence along it.
pub fn check_graphical_convergence(conj: &Conjugates, samples: &[Vec<f64>]) -> Result<ConvergenceReport> {
    let grid = conj.limit.grid();
    let lim = &conj.limit;
    let strides = grid.strides();
    let mut targets = Vec::new();
    for x in samples {
        if x.len() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                got: x.len(),
            });
        }
        let idx: Vec<usize> = (0..grid.dim())
            .map(|k| {
                let t = ((x[k] - grid.origin()[k]) / grid.spacing()[k]).round();
                t.clamp(0.0, (grid.counts()[k] - 1) as f64) as usize
            })
            .collect();
        let flat = grid.flat_index(&idx);
        if let Some(g) = stable_gradient(lim, flat) {
            targets.push((flat, idx, g));
        }
    }
    let mut graph = Vec::new();
    let mut value = Vec::new();
    let mut pointwise = Vec::new();
    for m in &conj.members {
        let (mut wg, mut wv, mut wp) = (0.0f64, 0.0f64, 0.0f64);
        for (flat, idx, g) in &targets {
            let mut best = (f64::INFINITY, f64::INFINITY);
            let span = 5usize.pow(grid.dim() as u32);
            for t in 0..span {
                let mut rest = t;
                let mut j = *flat as isize;
                let mut d2 = 0.0;
                let mut ok = true;
                for k in 0..grid.dim() {
                    let o = (rest % 5) as isize - 2;
                    rest /= 5;
                    let pos = idx[k] as isize + o;
                    if pos < 0 || pos >= grid.counts()[k] as isize {
                        ok = false;
                        break;
                    }
                    j += o * strides[k] as isize;
                    d2 += (o as f64 * grid.spacing()[k]).powi(2);
                }
                if !ok {
                    continue;
                }
                if let Some(gn) = m.central_gradient(j as usize, 1) {
                    let d = d2.sqrt() + max_norm_diff(&gn, g);
                    if d < best.0 {
                        best = (d, (m.values()[j as usize] - lim.values()[*flat]).abs());
                    }
                }
            }
            wg = wg.max(best.0);
            wv = wv.max(best.1);
            let here = m
                .central_gradient(*flat, 1)
                .map_or(f64::INFINITY, |gn| max_norm_diff(&gn, g));
            wp = wp.max(here);
        }
        graph.push(wg);
        value.push(wv);
        pointwise.push(wp);
    }
    let mut report = ConvergenceReport::default();
    report.properties.insert(
        "samples_in_domain".into(),
        PropertyReport::flag(!targets.is_empty(), targets.len() as f64),
    );
    report
        .properties
        .insert("graph_distance".into(), PropertyReport::below(graph, TOL_CONV));
    report
        .properties
        .insert("value_along_graph".into(), PropertyReport::below(value, TOL_CONV));
    report
        .properties
        .insert("pointwise_gradient".into(), PropertyReport::below(pointwise, TOL_CONV));
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientUniquenessReport {
    /// `grad u = grad v` at every node where both are stably differentiable.
    pub hypothesis: bool,
    pub differing_nodes: Vec<Vec<f64>>,
    /// `sup |(u - v) - median(u - v)|` over nodes in `C`.
    pub deviation: f64,
    pub equal_mod_constant: bool,
}

pub fn check_ae_gradient_uniqueness(
    u: &SampledFunction,
    v: &SampledFunction,
    c: &Polytope,
) -> Result<GradientUniquenessReport> {
    if u.grid() != v.grid() {
        return invalid("u and v must share a grid");
    }
    let grid = u.grid();
    let nodes: Vec<usize> = (0..u.values().len())
        .filter(|&i| c.contains(&grid.point(i), 0.0) && u.values()[i].is_finite() && v.values()[i].is_finite())
        .collect();
    if nodes.is_empty() {
        return invalid("C contains no finite grid nodes");
    }
    let mut differing = Vec::new();
    for &i in &nodes {
        if let (Some(a), Some(b)) = (stable_gradient(u, i), stable_gradient(v, i)) {
            if max_norm_diff(&a, &b) > 10.0 * TOL_CONV {
                differing.push(grid.point(i));
            }
        }
    }
    let mut diffs: Vec<f64> = nodes.iter().map(|&i| u.values()[i] - v.values()[i]).collect();
    diffs.sort_by(f64::total_cmp);
    let med = diffs[diffs.len() / 2];
    let deviation = diffs.iter().map(|d| (d - med).abs()).fold(0.0, f64::max);
    let hypothesis = differing.is_empty();
    Ok(GradientUniquenessReport {
        hypothesis,
        differing_nodes: differing,
        deviation,
        equal_mod_constant: hypothesis && deviation <= TOL_CONV,
    })
}

/// Output of a verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub properties: BTreeMap<String, PropertyReport>,
}

pub const SUITES: [&str; 4] = ["lemmaA", "attouch", "uniqueness", "boundedness"];

/// Shared fixtures of the suites: the square `[-1, 1]^2`, a primal grid of
/// radius 2 and a dual grid covering the square.
struct Lab {
    square: Polytope,
    primal: Grid,
    dual: Grid,
}

impl Lab {
    fn new() -> Result<Self> {
        Ok(Self {
            square: Polytope::boxed(&[-1.0, -1.0], &[1.0, 1.0])?,
            primal: Grid::cube(2, 2.0, 129)?,
            dual: Grid::spanning(&[-1.05, -1.05], &[1.05, 1.05], 85)?,
        })
    }

    fn schedule() -> Vec<f64> {
        (1..=10).map(|k| 0.5f64.powi(k)).collect()
    }

    fn compacts(&self) -> Result<Vec<Polytope>> {
        Ok(vec![
            Polytope::boxed(&[-0.5, -0.5], &[0.5, 0.5])?,
            Polytope::boxed(&[-0.75, -0.75], &[0.75, 0.75])?,
        ])
    }

    fn phi_square(&self) -> Result<SampledFunction> {
        SampledFunction::from_fn(self.primal.clone(), |x| x[0].abs() + x[1].abs())?.tagged_convex()
    }

    /// Random atoms on primal grid nodes with `|y_k| <= 1/4`.
    fn random_measure(&self, seed: u64) -> Result<DiscreteMeasure> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = rng.random_range(3..=6);
        let mut atoms: Vec<(Vec<f64>, f64)> = Vec::new();
        while atoms.len() < count {
            let y = vec![
                rng.random_range(-8..=8) as f64 / 32.0,
                rng.random_range(-8..=8) as f64 / 32.0,
            ];
            if atoms.iter().all(|(z, _)| z != &y) {
                atoms.push((y, rng.random_range(0.5..1.5)));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        DiscreteMeasure::probability(atoms.into_iter().map(|(y, m)| (y, m / total)).collect())
    }

    fn solve(&self, mu: &DiscreteMeasure, w0: Option<Vec<f64>>) -> Result<PlConvexFunction> {
        let g = Density::uniform(&self.square)?;
        let opts = SolverOptions {
            initial_weights: w0,
            ..SolverOptions::default()
        };
        Ok(solve_dual(&self.square, &g, mu, &opts)?.u)
    }

    fn sample(&self, u: &PlConvexFunction) -> Result<SampledFunction> {
        SampledFunction::from_fn(self.primal.clone(), |x| u.value(x))?.tagged_convex()
    }

    fn bases(&self, seed: u64) -> Result<Vec<(&'static str, SampledFunction)>> {
        let mu = self.random_measure(seed)?;
        let u = self.solve(&mu, None)?;
        Ok(vec![("phi_square", self.phi_square()?), ("solver", self.sample(&u)?)])
    }
}

/// Runs one of [`SUITES`].
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let lab = Lab::new()?;
    let mut report = ConvergenceReport::default();
    match name {
        "lemmaA" => {
            for (label, base) in lab.bases(seed)? {
                let seq = make_decreasing_sequence(&base, &lab.square, &Lab::schedule())?;
                let (consecutive, above) = seq.monotonicity_gaps();
                report.properties.insert(
                    format!("{label}.decreasing"),
                    PropertyReport::flag(consecutive >= 0.0 && above >= 0.0, consecutive.min(above)),
                );
                let conj = seq.conjugates(&lab.dual)?;
                report.merge(
                    &format!("{label}."),
                    check_lemma_a(&conj, &lab.square, &lab.compacts()?)?,
                );
            }
        }
        "attouch" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let samples: Vec<Vec<f64>> = (0..40)
                .map(|_| vec![rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7)])
                .collect();
            for (label, base) in lab.bases(seed)? {
                let seq = make_decreasing_sequence(&base, &lab.square, &Lab::schedule())?;
                let conj = seq.conjugates(&lab.dual)?;
                report.merge(&format!("{label}."), check_graphical_convergence(&conj, &samples)?);
            }
        }
        "uniqueness" => {
            let mu = lab.random_measure(seed)?;
            let base = initial_weights(&lab.square, mu.points());
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
            let mut us = Vec::new();
            for _ in 0..3 {
                let w0: Vec<f64> = base.iter().map(|b| b + 0.01 * rng.random_range(-1.0..1.0)).collect();
                us.push(lab.sample(&lab.solve(&mu, Some(w0))?)?);
            }
            let c = Polytope::boxed(&[-1.5, -1.5], &[1.5, 1.5])?;
            let mut worst: f64 = 0.0;
            let mut all = true;
            for i in 0..us.len() {
                for j in 0..i {
                    let r = check_ae_gradient_uniqueness(&us[i], &us[j], &c)?;
                    all &= r.equal_mod_constant;
                    worst = worst.max(r.deviation);
                }
            }
            report
                .properties
                .insert("solver_runs_agree".into(), PropertyReport::flag(all, worst));
            let shifted = us[0].map(|_, v| v + 7.0)?;
            let r = check_ae_gradient_uniqueness(&us[0], &shifted, &c)?;
            report.properties.insert(
                "constant_shift".into(),
                PropertyReport::flag(r.equal_mod_constant, r.deviation),
            );
            let tilted = us[0].map(|x, v| v + 0.1 * x[0])?;
            let r = check_ae_gradient_uniqueness(&us[0], &tilted, &c)?;
            report.properties.insert(
                "tilt_detected".into(),
                PropertyReport::flag(!r.hypothesis && !r.equal_mod_constant, r.differing_nodes.len() as f64),
            );
        }
        "boundedness" => {
            let points = [[0.0, 0.0], [0.3, -0.2], [-0.45, 0.4]];
            for (label, base) in lab.bases(seed)? {
                let seq = make_decreasing_sequence(&base, &lab.square, &Lab::schedule())?;
                let conj = seq.conjugates(&lab.dual)?;
                for (i, x) in points.iter().enumerate() {
                    match check_local_boundedness(&conj, &lab.square, x, 0.2) {
                        Ok(r) => {
                            report.properties.insert(
                                format!("{label}.x{i}"),
                                PropertyReport {
                                    pass: r.bounded,
                                    worst_case: r.observed - r.bound,
                                    series: vec![r.observed, r.bound, r.m, r.eta, r.literal],
                                },
                            );
                        }
                        // F* has a kink at this point: outside the lemma's hypotheses
                        Err(Error::InvalidInput(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        other => return invalid(format!("unknown suite {other:?}; expected one of {SUITES:?}")),
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        seed,
        pass: report.pass(),
        properties: report.properties,
    })
}
