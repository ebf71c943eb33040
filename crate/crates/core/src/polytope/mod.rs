//! The moment polytope: representations, support function, exact clipping,
//! densities and their integrals.

mod clip;
mod delzant;
mod density;
pub mod quadrature;
mod sample;

pub use clip::{clip_labeled, LabeledPolygon};
pub use delzant::{delzant_check_2d, DelzantReport, VertexCheck};
pub use density::{Density, DensityKind, Polynomial, TOL_MASS_EXACT, TOL_MASS_GRID};
pub use sample::sample;

use crate::convex::{convex_hull_2d, hull_facets, polygon_area, Halfspace};
use crate::error::{invalid, Error, Result};
use crate::linalg::dot;

/// A bounded convex polytope with nonempty interior.
///
/// Exact geometry is available in one and two dimensions. Higher dimensions
/// are accepted only as axis-aligned boxes, for grid operations.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    /// 1D: `[lo], [hi]`; 2D: counter-clockwise, strictly convex.
    vertices: Vec<Vec<f64>>,
    halfspaces: Vec<Halfspace>,
}

impl Polytope {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || !(hi > lo) {
            return invalid(format!("invalid interval [{lo}, {hi}]"));
        }
        Ok(Self {
            dim: 1,
            vertices: vec![vec![lo], vec![hi]],
            halfspaces: vec![Halfspace::new(vec![-1.0], -lo), Halfspace::new(vec![1.0], hi)],
        })
    }

    /// Convex polygon from its vertices. The order is normalised to
    /// counter-clockwise and collinear or duplicate points are removed.
    pub fn polygon(points: &[[f64; 2]]) -> Result<Self> {
        if points.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return invalid("polygon vertices must be finite");
        }
        let hull = convex_hull_2d(points);
        if hull.len() < 3 || polygon_area(&hull) <= 1e-14 {
            return invalid("polygon has empty interior");
        }
        let vertices: Vec<Vec<f64>> = hull.iter().map(|p| p.to_vec()).collect();
        let halfspaces = hull_facets(&vertices).ok_or_else(|| Error::InvalidInput("degenerate polygon".into()))?;
        Ok(Self {
            dim: 2,
            vertices,
            halfspaces,
        })
    }

    /// Axis-aligned box `prod [lo_k, hi_k]` in any dimension.
    pub fn boxed(lo: &[f64], hi: &[f64]) -> Result<Self> {
        match lo.len() {
            1 => Self::interval(lo[0], hi[0]),
            2 => Self::polygon(&[[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]),
            n => {
                if hi.len() != n || lo.iter().zip(hi).any(|(a, b)| !(b > a)) {
                    return invalid("box needs lo < hi on every axis");
                }
                let mut vertices = Vec::with_capacity(1 << n);
                for mask in 0..(1usize << n) {
                    vertices.push((0..n).map(|k| if mask >> k & 1 == 1 { hi[k] } else { lo[k] }).collect());
                }
                let mut halfspaces = Vec::with_capacity(2 * n);
                for k in 0..n {
                    let mut e = vec![0.0; n];
                    e[k] = 1.0;
                    halfspaces.push(Halfspace::new(e.clone(), hi[k]));
                    e[k] = -1.0;
                    halfspaces.push(Halfspace::new(e, -lo[k]));
                }
                Ok(Self {
                    dim: n,
                    vertices,
                    halfspaces,
                })
            }
        }
    }

    /// From vertex lists in dimension 1 or 2.
    pub fn from_vertices(vertices: &[Vec<f64>]) -> Result<Self> {
        match vertices.first().map(|v| v.len()) {
            Some(1) => {
                let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
                let hi = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
                Self::interval(lo, hi)
            }
            Some(2) => {
                if vertices.iter().any(|v| v.len() != 2) {
                    return invalid("mixed vertex dimensions");
                }
                let pts: Vec<[f64; 2]> = vertices.iter().map(|v| [v[0], v[1]]).collect();
                Self::polygon(&pts)
            }
            Some(n) => Err(Error::Unsupported(format!(
                "vertex-described polytopes in dimension {n}; use a box"
            ))),
            None => invalid("no vertices"),
        }
    }

    /// Intersection of halfspaces in dimension 1 or 2; rejects unbounded or
    /// empty results.
    pub fn from_halfspaces(halfspaces: &[Halfspace]) -> Result<Self> {
        let dim = halfspaces.first().map_or(0, |h| h.normal.len());
        let reach = halfspaces
            .iter()
            .map(|h| h.offset.abs() / h.normal.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-300))
            .fold(0.0, f64::max);
        let big = 1e6 * (1.0 + reach);
        match dim {
            1 => {
                let (mut lo, mut hi) = (-big, big);
                for h in halfspaces {
                    let a = h.normal[0];
                    if a > 0.0 {
                        hi = hi.min(h.offset / a);
                    } else if a < 0.0 {
                        lo = lo.max(h.offset / a);
                    } else if h.offset < 0.0 {
                        return invalid("infeasible halfspace");
                    }
                }
                if lo <= -big || hi >= big {
                    return invalid("halfspaces do not bound an interval");
                }
                Self::interval(lo, hi)
            }
            2 => {
                let mut poly = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
                for h in halfspaces {
                    if h.normal.len() != 2 {
                        return invalid("mixed halfspace dimensions");
                    }
                    let lp = LabeledPolygon::unlabeled(poly);
                    poly = clip_labeled(&lp, [h.normal[0], h.normal[1]], h.offset, 0).vertices;
                    if poly.len() < 3 {
                        return invalid("halfspaces have empty intersection");
                    }
                }
                if poly.iter().any(|p| p[0].abs() >= 0.5 * big || p[1].abs() >= 0.5 * big) {
                    return invalid("halfspaces do not bound a polygon");
                }
                // recompute corners as exact line intersections
                let scale = poly.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
                let mut corners = Vec::new();
                for (i, a) in halfspaces.iter().enumerate() {
                    for b in &halfspaces[..i] {
                        let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
                        if det.abs() < 1e-14 {
                            continue;
                        }
                        let x = (a.offset * b.normal[1] - a.normal[1] * b.offset) / det;
                        let y = (a.normal[0] * b.offset - a.offset * b.normal[0]) / det;
                        if halfspaces.iter().all(|h| h.violation(&[x, y]) <= 1e-9 * scale) {
                            corners.push([x, y]);
                        }
                    }
                }
                Self::polygon(&corners)
            }
            _ => invalid("halfspace polytopes are supported in dimension 1 and 2"),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Counter-clockwise vertex list of a polygon.
    pub fn polygon_vertices(&self) -> Option<Vec<[f64; 2]>> {
        (self.dim == 2).then(|| self.vertices.iter().map(|v| [v[0], v[1]]).collect())
    }

    /// `(lo, hi)` of an interval.
    pub fn interval_bounds(&self) -> Option<(f64, f64)> {
        (self.dim == 1).then(|| (self.vertices[0][0], self.vertices[1][0]))
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for v in &self.vertices {
            for k in 0..self.dim {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Lebesgue measure.
    pub fn volume(&self) -> f64 {
        match self.dim {
            1 => self.vertices[1][0] - self.vertices[0][0],
            2 => polygon_area(&self.polygon_vertices().unwrap_or_default()),
            _ => {
                let (lo, hi) = self.bounding_box();
                lo.iter().zip(&hi).map(|(a, b)| b - a).product()
            }
        }
    }

    pub fn centroid(&self) -> Vec<f64> {
        match self.dim {
            2 => {
                let poly = self.polygon_vertices().unwrap_or_default();
                let a = polygon_area(&poly);
                let (mut cx, mut cy) = (0.0, 0.0);
                for i in 0..poly.len() {
                    let p = poly[i];
                    let q = poly[(i + 1) % poly.len()];
                    let c = p[0] * q[1] - q[0] * p[1];
                    cx += (p[0] + q[0]) * c;
                    cy += (p[1] + q[1]) * c;
                }
                vec![cx / (6.0 * a), cy / (6.0 * a)]
            }
            _ => {
                let (lo, hi) = self.bounding_box();
                lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect()
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max(crate::linalg::dist(a, b));
            }
        }
        d
    }

    /// Largest violation of the facet inequalities at `p`, in distance units.
    pub fn violation(&self, p: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.violation(p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.violation(p) <= tol
    }

    /// Distance from `p` to the boundary (negative outside).
    pub fn depth(&self, p: &[f64]) -> f64 {
        -self.violation(p)
    }
}

/// `phi_P(x) = sup_{p in P} <x, p>`, a max over vertices.
pub fn support_function(p: &Polytope, x: &[f64]) -> f64 {
    p.vertices().iter().map(|v| dot(v, x)).fold(f64::NEG_INFINITY, f64::max)
}

/// Intersection with `{<normal, p> <= offset}`; `None` when empty or of zero
/// measure.
pub fn clip_halfplane(p: &Polytope, normal: &[f64], offset: f64) -> Option<Polytope> {
    match p.dim() {
        1 => {
            let (mut lo, mut hi) = p.interval_bounds()?;
            let a = normal[0];
            if a > 0.0 {
                hi = hi.min(offset / a);
            } else if a < 0.0 {
                lo = lo.max(offset / a);
            } else if offset < 0.0 {
                return None;
            }
            let tol = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
            if hi - lo <= tol {
                return None;
            }
            Polytope::interval(lo, hi).ok()
        }
        2 => {
            let lp = LabeledPolygon::unlabeled(p.polygon_vertices()?);
            let out = clip_labeled(&lp, [normal[0], normal[1]], offset, 0);
            if out.vertices.len() < 3 {
                return None;
            }
            Polytope::polygon(&out.vertices).ok()
        }
        _ => None,
    }
}
