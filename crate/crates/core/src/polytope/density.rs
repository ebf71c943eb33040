use std::collections::BTreeMap;

use super::clip::{clip_labeled, LabeledPolygon};
use super::quadrature;
use super::Polytope;
use crate::convex::SampledFunction;
use crate::error::{invalid, Error, Result};

/// Mass tolerance for uniform and polynomial densities.
pub const TOL_MASS_EXACT: f64 = 1e-10;
/// Mass tolerance for grid densities.
pub const TOL_MASS_GRID: f64 = 1e-6;

/// Polynomial of total degree at most 2 in one or two variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::Unsupported(format!("polynomial densities in dimension {dim}")));
        }
        for (e, c) in &terms {
            if e.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.len(),
                });
            }
            if e.iter().sum::<u32>() > 2 {
                return invalid("polynomial densities have total degree at most 2");
            }
            if !c.is_finite() {
                return invalid("polynomial coefficients must be finite");
            }
        }
        Ok(Self { dim, terms })
    }

    /// Parses `{"i,j": c, ...}` style exponent keys.
    pub fn from_keyed(dim: usize, coeffs: &BTreeMap<String, f64>) -> Result<Self> {
        let mut terms = Vec::new();
        for (k, &c) in coeffs {
            let e = k
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("coefficient key {k:?}: {e}")))?;
            terms.push((e, c));
        }
        Self::new(dim, terms)
    }

    pub fn to_keyed(&self) -> BTreeMap<String, f64> {
        self.terms
            .iter()
            .map(|(e, c)| {
                let k: Vec<String> = e.iter().map(|x| x.to_string()).collect();
                (k.join(","), *c)
            })
            .collect()
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(p).map(|(&k, &x)| x.powi(k as i32)).product::<f64>())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensityKind {
    Uniform,
    Polynomial(Polynomial),
    /// Multilinear interpolant of grid samples.
    Grid(SampledFunction),
}

/// A bounded density on a polytope, normalised to integrate to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    dim: usize,
    kind: DensityKind,
    scale: f64,
    bound: f64,
    max: f64,
}

impl Density {
    pub fn uniform(p: &Polytope) -> Result<Self> {
        Self::build(p, DensityKind::Uniform, None)
    }

    pub fn polynomial(p: &Polytope, poly: Polynomial, bound: Option<f64>) -> Result<Self> {
        if poly.dim != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                got: poly.dim,
            });
        }
        Self::build(p, DensityKind::Polynomial(poly), bound)
    }

    pub fn grid(p: &Polytope, samples: SampledFunction, bound: Option<f64>) -> Result<Self> {
        if samples.dim() != p.dim() || p.dim() > 2 {
            return invalid("grid density must match the polytope dimension (1 or 2)");
        }
        let (lo, hi) = p.bounding_box();
        let (glo, ghi) = (samples.grid().origin().to_vec(), samples.grid().upper());
        for k in 0..p.dim() {
            let tol = 1e-12 * (1.0 + lo[k].abs().max(hi[k].abs()));
            if lo[k] < glo[k] - tol || hi[k] > ghi[k] + tol {
                return invalid("density grid does not cover the polytope");
            }
        }
        if samples.values().iter().any(|v| !v.is_finite()) {
            return invalid("density grid values must be finite");
        }
        Self::build(p, DensityKind::Grid(samples), bound)
    }

    fn build(p: &Polytope, kind: DensityKind, bound: Option<f64>) -> Result<Self> {
        if p.dim() > 2 {
            return Err(Error::Unsupported("densities on polytopes above dimension 2".into()));
        }
        let mut d = Self {
            dim: p.dim(),
            kind,
            scale: 1.0,
            bound: f64::INFINITY,
            max: f64::INFINITY,
        };
        let raw = d.mass(p);
        if !(raw > 0.0) || !raw.is_finite() {
            return invalid("density must have positive finite mass on the polytope");
        }
        d.scale = 1.0 / raw;
        let (gmin, gmax) = d.range_on(p);
        if gmin < -1e-14 * gmax.abs().max(1.0) {
            return invalid(format!("density is negative on the polytope (min {gmin:e})"));
        }
        d.max = gmax;
        // a density vanishing somewhere on P has no finite C; only an explicit
        // bound is enforced
        let needed = if gmin > 0.0 {
            gmax.max(1.0 / gmin)
        } else {
            f64::INFINITY
        };
        d.bound = match bound {
            Some(c) => {
                if !(c >= 1.0) {
                    return invalid("density bound C must be >= 1");
                }
                if c < needed * (1.0 - 1e-12) {
                    return invalid(format!("density violates 1/C <= g <= C with C = {c} (needs {needed})"));
                }
                c
            }
            None => needed,
        };
        Ok(d)
    }

    /// Min and max of `g` over a dense sample of `P` (vertices, edge points and
    /// an interior lattice).
    pub fn range_on(&self, p: &Polytope) -> (f64, f64) {
        let (lo, hi) = p.bounding_box();
        let res = if self.dim == 1 { 2001 } else { 101 };
        let mut gmin = f64::INFINITY;
        let mut gmax = f64::NEG_INFINITY;
        let mut visit = |x: &[f64]| {
            let v = self.eval(x);
            gmin = gmin.min(v);
            gmax = gmax.max(v);
        };
        for v in p.vertices() {
            visit(v);
        }
        let steps = res - 1;
        if self.dim == 1 {
            for i in 0..=steps {
                visit(&[lo[0] + (hi[0] - lo[0]) * i as f64 / steps as f64]);
            }
        } else {
            for i in 0..=steps {
                for j in 0..=steps {
                    let x = [
                        lo[0] + (hi[0] - lo[0]) * i as f64 / steps as f64,
                        lo[1] + (hi[1] - lo[1]) * j as f64 / steps as f64,
                    ];
                    if p.contains(&x, 1e-12) {
                        visit(&x);
                    }
                }
            }
        }
        (gmin, gmax)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    /// The constant `C` with `1/C <= g <= C` on `P`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Largest value of `g` seen on the dense sample of `P`.
    pub fn max_value(&self) -> f64 {
        self.max
    }

    /// Normalisation factor applied to the raw density.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, DensityKind::Grid(_))
    }

    /// Mass tolerance appropriate for this density kind.
    pub fn tol_mass(&self) -> f64 {
        if self.is_exact() {
            TOL_MASS_EXACT
        } else {
            TOL_MASS_GRID
        }
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        self.scale
            * match &self.kind {
                DensityKind::Uniform => 1.0,
                DensityKind::Polynomial(poly) => poly.eval(p),
                DensityKind::Grid(s) => s.interpolate(p),
            }
    }

    /// `int_P g` over a polytope (1D or 2D).
    pub fn mass(&self, p: &Polytope) -> f64 {
        self.integrate(p, |_| 1.0)
    }

    /// `int_P h g` for a weight `h`. Exact when `h g` is polynomial of degree
    /// <= 5 (2D) or <= 9 (1D) on every grid cell.
    pub fn integrate(&self, p: &Polytope, h: impl Fn(&[f64]) -> f64) -> f64 {
        match p.dim() {
            1 => {
                let (a, b) = p.interval_bounds().unwrap_or((0.0, 0.0));
                self.integrate_interval(a, b, h)
            }
            2 => self.integrate_polygon(&p.polygon_vertices().unwrap_or_default(), h),
            _ => f64::NAN,
        }
    }

    pub fn integrate_interval(&self, a: f64, b: f64, h: impl Fn(&[f64]) -> f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let f = |x: f64| h(&[x]) * self.eval(&[x]);
        match &self.kind {
            DensityKind::Grid(s) => {
                let xs = s.grid().axis(0);
                let mut cuts = vec![a];
                cuts.extend(xs.iter().copied().filter(|&x| x > a && x < b));
                cuts.push(b);
                crate::linalg::compensated_sum(cuts.windows(2).map(|w| quadrature::interval(w[0], w[1], f)))
            }
            _ => quadrature::interval(a, b, f),
        }
    }

    pub fn integrate_polygon(&self, poly: &[[f64; 2]], h: impl Fn(&[f64]) -> f64) -> f64 {
        if poly.len() < 3 {
            return 0.0;
        }
        let f = |p: [f64; 2]| h(&p) * self.eval(&p);
        match &self.kind {
            DensityKind::Grid(s) => {
                let g = s.grid();
                let (o, hs, c) = (g.origin(), g.spacing(), g.counts());
                let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
                for v in poly {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                let cell_range = |k: usize| {
                    let a = ((lo[k] - o[k]) / hs[k]).floor().max(0.0) as usize;
                    let b = (((hi[k] - o[k]) / hs[k]).ceil().max(0.0) as usize).min(c[k] - 1);
                    (a.min(c[k].saturating_sub(2)), b.max(1))
                };
                let (i0, i1) = cell_range(0);
                let (j0, j1) = cell_range(1);
                let mut parts = Vec::new();
                for i in i0..i1 {
                    for j in j0..j1 {
                        let (x0, y0) = (o[0] + i as f64 * hs[0], o[1] + j as f64 * hs[1]);
                        let (x1, y1) = (x0 + hs[0], y0 + hs[1]);
                        let mut piece = LabeledPolygon::uniform(poly.to_vec(), ());
                        for (n, off) in [
                            ([1.0, 0.0], x1),
                            ([-1.0, 0.0], -x0),
                            ([0.0, 1.0], y1),
                            ([0.0, -1.0], -y0),
                        ] {
                            piece = clip_labeled(&piece, n, off, ());
                            if piece.is_empty() {
                                break;
                            }
                        }
                        if !piece.is_empty() {
                            parts.push(quadrature::polygon(&piece.vertices, f));
                        }
                    }
                }
                crate::linalg::compensated_sum(parts)
            }
            _ => quadrature::polygon(poly, f),
        }
    }

    /// `int_[a,b] g ds` along a segment in the plane.
    pub fn line_integral(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let f = |p: [f64; 2]| self.eval(&p);
        match &self.kind {
            DensityKind::Grid(s) => {
                let g = s.grid();
                let mut ts = vec![0.0, 1.0];
                for k in 0..2 {
                    let d = b[k] - a[k];
                    if d.abs() < 1e-300 {
                        continue;
                    }
                    for x in g.axis(k) {
                        let t = (x - a[k]) / d;
                        if t > 0.0 && t < 1.0 {
                            ts.push(t);
                        }
                    }
                }
                ts.sort_by(f64::total_cmp);
                let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                crate::linalg::compensated_sum(ts.windows(2).map(|w| quadrature::segment(at(w[0]), at(w[1]), f)))
            }
            _ => quadrature::segment(a, b, f),
        }
    }
}
