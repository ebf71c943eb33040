//! Convex potentials as invariant Kähler data: moment maps, class membership
//! and the real/complex Monge-Ampère normalisation.

use std::sync::Arc;

use serde::Serialize;

use crate::convex::{subgradient_pl, Grid, PlConvexFunction, SampledFunction, SubgradientSet};
use crate::error::{invalid, Error, Result};
use crate::linalg::GAUSS5;
use crate::polytope::{support_function, Polytope};

/// Growth tolerance for the "bounded" predicates.
pub const TOL_SLOPE: f64 = 1e-6;
/// Halfspace slack for moment images.
pub const TOL_MOMENT: f64 = 1e-9;

/// A convex function on `R^n` with a gradient where it is differentiable.
pub trait ConvexPotential {
    fn dim(&self) -> usize;
    /// `+inf` outside the effective domain.
    fn value(&self, x: &[f64]) -> f64;
    /// `Ok(grad)` at differentiability points, otherwise the subgradient set
    /// (or an empty set when it is not available).
    fn gradient(&self, x: &[f64]) -> std::result::Result<Vec<f64>, SubgradientSet>;
    /// Box `(center, half-width)` on which values are meaningful; `None` for
    /// functions defined on all of `R^n`.
    fn extent(&self) -> Option<(Vec<f64>, f64)> {
        None
    }
}

impl ConvexPotential for PlConvexFunction {
    fn dim(&self) -> usize {
        PlConvexFunction::dim(self)
    }
    fn value(&self, x: &[f64]) -> f64 {
        PlConvexFunction::value(self, x)
    }
    fn gradient(&self, x: &[f64]) -> std::result::Result<Vec<f64>, SubgradientSet> {
        let s = subgradient_pl(self, x).unwrap_or(SubgradientSet { vertices: Vec::new() });
        if s.is_singleton() {
            Ok(s.vertices[0].clone())
        } else {
            Err(s)
        }
    }
}

impl ConvexPotential for SampledFunction {
    fn dim(&self) -> usize {
        SampledFunction::dim(self)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.interpolate(x)
    }
    /// Central differences of the interpolant with the grid spacing; the
    /// point counts as differentiable when half and full steps agree.
    fn gradient(&self, x: &[f64]) -> std::result::Result<Vec<f64>, SubgradientSet> {
        let h = self.grid().spacing().to_vec();
        let diff = |scale: f64| -> Option<Vec<f64>> {
            (0..x.len())
                .map(|k| {
                    let mut a = x.to_vec();
                    let mut b = x.to_vec();
                    a[k] -= scale * h[k];
                    b[k] += scale * h[k];
                    let (fa, fb) = (self.interpolate(&a), self.interpolate(&b));
                    (fa.is_finite() && fb.is_finite()).then(|| (fb - fa) / (2.0 * scale * h[k]))
                })
                .collect()
        };
        match (diff(1.0), diff(0.5)) {
            (Some(g1), Some(g2)) if g1.iter().zip(&g2).all(|(a, b)| (a - b).abs() <= 1e-6 * (1.0 + a.abs())) => Ok(g1),
            _ => Err(SubgradientSet { vertices: Vec::new() }),
        }
    }
    fn extent(&self) -> Option<(Vec<f64>, f64)> {
        let g = self.grid();
        let (lo, hi) = (g.origin().to_vec(), g.upper());
        let center = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let half = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| 0.5 * (b - a))
            .fold(f64::INFINITY, f64::min);
        Some((center, half))
    }
}

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A smooth potential given by closures.
#[derive(Clone)]
pub struct SmoothPotential {
    dim: usize,
    f: ValueFn,
    grad: Option<GradFn>,
}

impl std::fmt::Debug for SmoothPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothPotential")
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl SmoothPotential {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            dim,
            f: Arc::new(f),
            grad: None,
        }
    }

    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(g));
        self
    }

    /// `log(1 + e^x)`, the potential of the Fubini-Study metric on `CP^1`
    /// with moment polytope `[0, 1]`.
    pub fn logistic() -> Self {
        Self::new(1, |x| softplus(x[0])).with_gradient(|x| vec![sigmoid(x[0])])
    }

    /// `|x|^2 / 2`.
    pub fn quadratic(dim: usize) -> Self {
        Self::new(dim, |x| 0.5 * x.iter().map(|v| v * v).sum::<f64>()).with_gradient(|x| x.to_vec())
    }

    /// `sum_j c_j log(1 + e^{k_j (x - s_j)}) / k_j`: smooth, strictly convex,
    /// slopes in `(0, sum c_j)`.
    pub fn softplus_mixture(terms: Vec<(f64, f64, f64)>) -> Self {
        let t2 = terms.clone();
        Self::new(1, move |x| {
            terms.iter().map(|&(c, k, s)| c * softplus(k * (x[0] - s)) / k).sum()
        })
        .with_gradient(move |x| vec![t2.iter().map(|&(c, k, s)| c * sigmoid(k * (x[0] - s))).sum()])
    }
}

pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl ConvexPotential for SmoothPotential {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
    fn gradient(&self, x: &[f64]) -> std::result::Result<Vec<f64>, SubgradientSet> {
        Ok(match &self.grad {
            Some(g) => g(x),
            None => (0..x.len())
                .map(|k| {
                    let h = 1e-5 * (1.0 + x[k].abs());
                    let mut a = x.to_vec();
                    let mut b = x.to_vec();
                    a[k] -= h;
                    b[k] += h;
                    ((self.f)(&b) - (self.f)(&a)) / (2.0 * h)
                })
                .collect(),
        })
    }
}

/// A toric potential `F_v = F_0 + v` with a relative potential sampled on a
/// grid.
pub struct ToricPotential {
    pub reference: Box<dyn ConvexPotential + Send + Sync>,
    pub relative: SampledFunction,
}

impl ToricPotential {
    /// `F_0 + v` on the grid of `v`.
    pub fn sampled(&self) -> Result<SampledFunction> {
        self.relative.map(|x, v| self.reference.value(x) + v)
    }

    /// Discrete convexity of `F_0 + v`.
    pub fn is_convex(&self) -> bool {
        self.sampled()
            .map(|s| s.convexity_violation(crate::convex::TOL_CONVEX).is_none())
            .unwrap_or(false)
    }
}

/// Value of the moment map: a point where `F` is differentiable, otherwise the
/// subgradient set, flagged.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentValue {
    Point(Vec<f64>),
    NonDifferentiable(SubgradientSet),
}

/// `grad F(x) + c`.
pub fn moment_map(f: &dyn ConvexPotential, x: &[f64], c: Option<&[f64]>) -> Result<MomentValue> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.len(),
        });
    }
    let zero = vec![0.0; x.len()];
    let c = c.unwrap_or(&zero);
    let shift = |v: Vec<f64>| v.iter().zip(c).map(|(a, b)| a + b).collect::<Vec<f64>>();
    Ok(match f.gradient(x) {
        Ok(g) => MomentValue::Point(shift(g)),
        Err(s) => MomentValue::NonDifferentiable(SubgradientSet {
            vertices: s.vertices.into_iter().map(shift).collect(),
        }),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentImageReport {
    pub contained: bool,
    pub max_violation: f64,
    pub checked: usize,
}

/// Checks `grad F(x) ∈ P` at every differentiable point of `points`.
pub fn moment_image_check(f: &dyn ConvexPotential, p: &Polytope, points: &[Vec<f64>]) -> Result<MomentImageReport> {
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: f.dim(),
        });
    }
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0;
    for x in points {
        if let Ok(g) = f.gradient(x) {
            checked += 1;
            worst = worst.max(p.violation(&g));
        }
    }
    let max_violation = worst.max(0.0);
    Ok(MomentImageReport {
        contained: max_violation <= TOL_MOMENT,
        max_violation,
        checked,
    })
}

/// Moment check on the nodes of a grid (interior nodes only for sampled
/// potentials).
pub fn moment_image_check_grid(f: &dyn ConvexPotential, p: &Polytope, grid: &Grid) -> Result<MomentImageReport> {
    let pts: Vec<Vec<f64>> = grid.points().collect();
    moment_image_check(f, p, &pts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl Verdict {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::Yes => Some(true),
            Verdict::No => Some(false),
            Verdict::Inconclusive => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    /// `sup (F - phi_P) < inf`.
    pub in_p: Verdict,
    /// Additionally `inf (F - phi_P) > -inf`.
    pub in_p_plus: Verdict,
    pub radii: [f64; 3],
    pub sups: [f64; 3],
    pub infs: [f64; 3],
}

fn growth_verdict(s: [f64; 3], r: [f64; 3]) -> Verdict {
    let (d1, d2) = (s[1] - s[0], s[2] - s[1]);
    if !s.iter().all(|v| v.is_finite()) {
        Verdict::No
    } else if d2.abs() <= TOL_SLOPE * (1.0 + s[2].abs()) {
        Verdict::Yes
    } else if d2 >= 0.5 * d1 && d2 > TOL_SLOPE * r[2] {
        Verdict::No
    } else {
        Verdict::Inconclusive
    }
}

/// Class `P` / `P+` membership by stabilisation of `sup` and `inf` of
/// `F - phi_P` over boxes of radius `r, 2r, 4r`. For potentials with a finite
/// extent the boxes are nested inside it instead; otherwise an open verdict
/// retries with the radius quadrupled, up to three times.
pub fn class_membership(f: &dyn ConvexPotential, p: &Polytope, radius: Option<f64>) -> Result<ClassReport> {
    let n = f.dim();
    if n != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: n,
        });
    }
    let (center, r) = match (f.extent(), radius) {
        (Some((c, half)), r) => (c, r.unwrap_or(half / 4.0).min(half / 4.0)),
        (None, Some(r)) => (vec![0.0; n], r),
        (None, None) => (vec![0.0; n], 10.0 * p.diameter()),
    };
    if !(r > 0.0) {
        return invalid("class test radius must be positive");
    }
    let res = match n {
        1 => 4001,
        2 => 161,
        _ => 21,
    };
    // widen the boxes while the verdict is open, unless the caller fixed the radius
    let widenings = if radius.is_none() && f.extent().is_none() {
        CLASS_WIDENINGS
    } else {
        0
    };
    let mut r = r;
    let mut attempt = 0;
    loop {
        let (radii, sups, infs) = class_samples(f, p, &center, r, res)?;
        let in_p = growth_verdict(sups, radii);
        let lower = growth_verdict([-infs[0], -infs[1], -infs[2]], radii);
        let in_p_plus = match (in_p, lower) {
            (Verdict::Yes, v) => v,
            (Verdict::No, _) => Verdict::No,
            (Verdict::Inconclusive, Verdict::No) => Verdict::No,
            _ => Verdict::Inconclusive,
        };
        let open = in_p == Verdict::Inconclusive || in_p_plus == Verdict::Inconclusive;
        if !open || attempt == widenings {
            return Ok(ClassReport {
                in_p,
                in_p_plus,
                radii,
                sups,
                infs,
            });
        }
        attempt += 1;
        r *= 4.0;
    }
}

const CLASS_WIDENINGS: usize = 3;

type ClassSamples = ([f64; 3], [f64; 3], [f64; 3]);

fn class_samples(f: &dyn ConvexPotential, p: &Polytope, center: &[f64], r: f64, res: usize) -> Result<ClassSamples> {
    let radii = [r, 2.0 * r, 4.0 * r];
    let mut sups = [f64::NEG_INFINITY; 3];
    let mut infs = [f64::INFINITY; 3];
    for (k, &rk) in radii.iter().enumerate() {
        let lo: Vec<f64> = center.iter().map(|c| c - rk).collect();
        let hi: Vec<f64> = center.iter().map(|c| c + rk).collect();
        let grid = Grid::spanning(&lo, &hi, res)?;
        let nodes: Vec<Vec<f64>> = grid.points().collect();
        // include the center so every box shares at least one node
        for x in nodes.iter().map(|v| v.as_slice()).chain(std::iter::once(center)) {
            let d = f.value(x) - support_function(p, x);
            if d.is_nan() {
                continue;
            }
            sups[k] = sups[k].max(d);
            infs[k] = infs[k].min(d);
        }
    }
    for k in 1..3 {
        sups[k] = sups[k].max(sups[k - 1]);
        infs[k] = infs[k].min(infs[k - 1]);
    }
    Ok((radii, sups, infs))
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorReport {
    /// `int_{X_0} (f o L) MA^C`, with `MA^C = dd^c psi` of `psi = F(log|z|)`
    /// computed as a planar Laplacian.
    pub complex_side: f64,
    /// `int f MA^R(F) = int f F''`.
    pub real_side: f64,
    /// `complex_side / (2 pi real_side)`; 1 certifies the `n!/(2 pi)^n` factor.
    pub ratio: f64,
}

const FACTOR_PANELS: usize = 800;

/// Fourth-order central second difference of `g` at `x` with step `h`.
fn second_difference(g: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-g(x + 2.0 * h) + 16.0 * g(x + h) - 30.0 * g(x) + 16.0 * g(x - h) - g(x - 2.0 * h)) / (12.0 * h * h)
}

/// Fourth-order central first difference.
fn first_difference(g: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-g(x + 2.0 * h) + 8.0 * g(x + h) - 8.0 * g(x - h) + g(x - 2.0 * h)) / (12.0 * h)
}

fn panels(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let h = (b - a) / FACTOR_PANELS as f64;
    let parts = (0..FACTOR_PANELS).map(|i| {
        let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
        let (m, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        r * GAUSS5.iter().map(|(x, w)| w * f(m + r * x)).sum::<f64>()
    });
    crate::linalg::compensated_sum(parts.collect::<Vec<_>>())
}

/// Compares the fibre-integrated complex Monge-Ampère mass of
/// `psi(z) = F(log|z|)` over the annulus `e^a <= |z| <= e^b` with the real
/// Monge-Ampère mass of `F` on `[a, b]`, both weighted by `f`.
///
/// The real side differentiates the gradient of `F` once; the complex side
/// takes a Cartesian Laplacian of `psi` and integrates it in polar
/// coordinates, so the two share no discretisation.
pub fn complex_real_factor_check(
    f: &dyn ConvexPotential,
    test: impl Fn(f64) -> f64,
    window: (f64, f64),
) -> Result<FactorReport> {
    if f.dim() != 1 {
        return Err(Error::Unsupported("the factor check is one-dimensional".into()));
    }
    let (a, b) = window;
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return invalid("invalid window");
    }
    let grad = |x: f64| match f.gradient(&[x]) {
        Ok(g) => g[0],
        Err(_) => f64::NAN,
    };
    let fpp = |x: f64| first_difference(grad, x, 1e-3);
    let mut convex_ok = true;
    let real_side = panels(a, b, |x| {
        let d = fpp(x);
        if !(d >= -1e-12) {
            convex_ok = false;
        }
        test(x) * d
    });
    if !convex_ok {
        return invalid("potential is not convex on the window");
    }
    let psi = |z: [f64; 2]| f.value(&[0.5 * (z[0] * z[0] + z[1] * z[1]).ln()]);
    let laplacian = |z: [f64; 2]| {
        let h = 5e-3 * z[0].hypot(z[1]);
        second_difference(|t| psi([t, z[1]]), z[0], h) + second_difference(|t| psi([z[0], t]), z[1], h)
    };
    // dA = r dr dtheta = e^{2t} dt dtheta with r = e^t
    const ANGLES: usize = 6;
    let complex_side = 2.0 * std::f64::consts::PI / ANGLES as f64
        * (0..ANGLES)
            .map(|k| {
                let th = (k as f64 + 0.5) * 2.0 * std::f64::consts::PI / ANGLES as f64;
                panels(a, b, |t| {
                    let r = t.exp();
                    test(t) * laplacian([r * th.cos(), r * th.sin()]) * r * r
                })
            })
            .sum::<f64>();
    let ratio = complex_side / (2.0 * std::f64::consts::PI * real_side);
    Ok(FactorReport {
        complex_side,
        real_side,
        ratio,
    })
}

/// `int f MA^R(F)` over `[a, b]` for a smooth 1D potential.
pub fn real_ma_mass(f: &dyn ConvexPotential, test: impl Fn(f64) -> f64, window: (f64, f64)) -> Result<f64> {
    if f.dim() != 1 {
        return Err(Error::Unsupported(
            "real MA mass of smooth potentials is one-dimensional".into(),
        ));
    }
    let grad = |x: f64| f.gradient(&[x]).map(|g| g[0]).unwrap_or(f64::NAN);
    Ok(panels(window.0, window.1, |x| {
        test(x) * first_difference(grad, x, 1e-3)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::Piece;

    fn unit() -> Polytope {
        Polytope::interval(0.0, 1.0).unwrap()
    }

    #[test]
    fn moment_map_examples() {
        let lg = SmoothPotential::logistic();
        assert_eq!(moment_map(&lg, &[0.0], None).unwrap(), MomentValue::Point(vec![0.5]));
        let phi = PlConvexFunction::support_function(unit().vertices()).unwrap();
        assert_eq!(moment_map(&phi, &[5.0], None).unwrap(), MomentValue::Point(vec![1.0]));
        match moment_map(&phi, &[0.0], None).unwrap() {
            MomentValue::NonDifferentiable(s) => assert_eq!(s.vertices.len(), 2),
            v => panic!("{v:?}"),
        }
        let q = SmoothPotential::quadratic(2);
        assert_eq!(
            moment_map(&q, &[1.0, 2.0], None).unwrap(),
            MomentValue::Point(vec![1.0, 2.0])
        );
        assert_eq!(
            moment_map(&q, &[1.0, 2.0], Some(&[0.5, 0.0])).unwrap(),
            MomentValue::Point(vec![1.5, 2.0])
        );
    }

    #[test]
    fn moment_image_examples() {
        let pts: Vec<Vec<f64>> = (-50..=50).map(|k| vec![k as f64 * 0.37]).collect();
        let lg = SmoothPotential::logistic();
        assert!(moment_image_check(&lg, &unit(), &pts).unwrap().contained);
        let phi = PlConvexFunction::support_function(unit().vertices()).unwrap();
        assert!(moment_image_check(&phi, &unit(), &pts).unwrap().contained);
        let twice = phi.scaled(2.0);
        let r = moment_image_check(&twice, &unit(), &pts).unwrap();
        assert!(!r.contained);
        assert!((r.max_violation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn class_examples() {
        let phi = PlConvexFunction::support_function(unit().vertices()).unwrap();
        let lifted = PlConvexFunction::new(
            1,
            phi.pieces()
                .iter()
                .map(|p| Piece::new(p.slope.clone(), p.intercept + 1.0))
                .collect(),
        )
        .unwrap();
        let r = class_membership(&lifted, &unit(), None).unwrap();
        assert_eq!((r.in_p, r.in_p_plus), (Verdict::Yes, Verdict::Yes));
        let r = class_membership(&SmoothPotential::logistic(), &unit(), None).unwrap();
        assert_eq!((r.in_p, r.in_p_plus), (Verdict::Yes, Verdict::Yes));
        assert!((r.sups[2] - 2f64.ln()).abs() < 1e-12);
        let r = class_membership(&SmoothPotential::quadratic(1), &unit(), None).unwrap();
        assert_eq!((r.in_p, r.in_p_plus), (Verdict::No, Verdict::No));
        // in P but not P+: max(0, x/2) is dominated by max(0, x) but not conversely
        let half = phi.scaled(0.5);
        let r = class_membership(&half, &unit(), None).unwrap();
        assert_eq!((r.in_p, r.in_p_plus), (Verdict::Yes, Verdict::No));
    }

    #[test]
    fn factor_examples() {
        let lg = SmoothPotential::logistic();
        let r = complex_real_factor_check(&lg, |_| 1.0, (-20.0, 20.0)).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-6, "{r:?}");
        assert!((r.real_side - 1.0).abs() < 1e-8);
        let q = SmoothPotential::quadratic(1);
        let r = complex_real_factor_check(&q, |_| 1.0, (-3.0, 2.0)).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-6, "{r:?}");
        assert!((r.real_side - 5.0).abs() < 1e-9);
        let r = complex_real_factor_check(&lg, |x| sigmoid(x) * (1.0 - sigmoid(x)), (-20.0, 20.0)).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-6, "{r:?}");
        // int s(1-s) s' dx = int_0^1 t(1-t) dt = 1/6
        assert!((r.real_side - 1.0 / 6.0).abs() < 1e-8);
        let concave = SmoothPotential::new(1, |x| -x[0] * x[0]);
        assert!(complex_real_factor_check(&concave, |_| 1.0, (-1.0, 1.0)).is_err());
    }

    #[test]
    fn toric_potential_sum() {
        let g = Grid::spanning(&[-2.0], &[2.0], 41).unwrap();
        let v = SampledFunction::from_fn(g, |x| 0.1 * (x[0] * 0.5).cos()).unwrap();
        let t = ToricPotential {
            reference: Box::new(SmoothPotential::logistic()),
            relative: v,
        };
        let s = t.sampled().unwrap();
        assert!((s.values()[20] - (2f64.ln() + 0.1)).abs() < 1e-14);
        assert!(t.is_convex());
    }
}
