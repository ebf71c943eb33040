use serde::{Deserialize, Serialize};

use super::hull::{convex_hull_2d, hull_facets, lower_envelope_value, Halfspace};
use crate::error::{invalid, Error, Result};
use crate::linalg::{affine_rank, dist, dot, for_each_combination, solve, sub};

/// One affine piece `x -> <slope, x> + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub slope: Vec<f64>,
    pub intercept: f64,
}

impl Piece {
    pub fn new(slope: Vec<f64>, intercept: f64) -> Self {
        Self { slope, intercept }
    }

    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        dot(&self.slope, x) + self.intercept
    }
}

/// Relative tie tolerance used to decide which pieces are active.
#[inline]
pub fn tie_tol(max_value: f64) -> f64 {
    1e-9 * (1.0 + max_value.abs())
}

/// A finite maximum of affine functions on `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlJson", into = "PlJson")]
pub struct PlConvexFunction {
    dim: usize,
    pieces: Vec<Piece>,
}

#[derive(Serialize, Deserialize)]
struct PlJson {
    dim: usize,
    pieces: Vec<Piece>,
}

impl TryFrom<PlJson> for PlConvexFunction {
    type Error = Error;
    fn try_from(j: PlJson) -> Result<Self> {
        PlConvexFunction::new(j.dim, j.pieces)
    }
}

impl From<PlConvexFunction> for PlJson {
    fn from(f: PlConvexFunction) -> Self {
        PlJson {
            dim: f.dim,
            pieces: f.pieces,
        }
    }
}

/// A point where the graph of a PL function has a vertex, with the pieces
/// active there.
#[derive(Debug, Clone)]
pub struct PlVertex {
    pub point: Vec<f64>,
    pub value: f64,
    pub active: Vec<usize>,
}

impl PlConvexFunction {
    /// Builds the function, dropping exact duplicates and pieces that share a
    /// slope with a higher piece (those are never active).
    pub fn new(dim: usize, pieces: Vec<Piece>) -> Result<Self> {
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        if pieces.is_empty() {
            return invalid("a PL convex function needs at least one piece");
        }
        let mut kept: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            if p.slope.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.slope.len(),
                });
            }
            if !p.intercept.is_finite() || p.slope.iter().any(|s| !s.is_finite()) {
                return invalid("pieces must be finite");
            }
            let same_slope = kept.iter().position(|q| {
                q.slope
                    .iter()
                    .zip(&p.slope)
                    .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()))
            });
            match same_slope {
                Some(i) => {
                    if p.intercept > kept[i].intercept {
                        kept[i].intercept = p.intercept;
                    }
                }
                None => kept.push(p),
            }
        }
        Ok(Self { dim, pieces: kept })
    }

    /// `phi_P(x) = max_v <x, v>` over the given vertices.
    pub fn support_function(vertices: &[Vec<f64>]) -> Result<Self> {
        let dim = vertices.first().map_or(0, |v| v.len());
        Self::new(dim, vertices.iter().map(|v| Piece::new(v.clone(), 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn slopes(&self) -> Vec<Vec<f64>> {
        self.pieces.iter().map(|p| p.slope.clone()).collect()
    }

    /// Checked evaluation.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.value(x))
    }

    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.pieces.iter().map(|p| p.value(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices of pieces within the tie tolerance of the maximum at `x`.
    pub fn active_pieces(&self, x: &[f64]) -> Vec<usize> {
        let vals: Vec<f64> = self.pieces.iter().map(|p| p.value(x)).collect();
        let m = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tol = tie_tol(m);
        (0..vals.len()).filter(|&i| vals[i] >= m - tol).collect()
    }

    /// `f + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece::new(p.slope.clone(), p.intercept + c))
            .collect();
        Self { dim: self.dim, pieces }
    }

    /// `t * f` for `t > 0`.
    pub fn scaled(&self, t: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece::new(p.slope.iter().map(|s| s * t).collect(), p.intercept * t))
            .collect();
        Self { dim: self.dim, pieces }
    }

    /// Vertices of the graph: points where the active slopes affinely span
    /// `R^n`. Empty when the slopes themselves do not.
    pub fn vertices(&self) -> Vec<PlVertex> {
        let n = self.dim;
        let m = self.pieces.len();
        let mut out: Vec<PlVertex> = Vec::new();
        let mut a = vec![0.0; n * n];
        let mut b = vec![0.0; n];
        for_each_combination(m, n + 1, |c| {
            let p0 = &self.pieces[c[0]];
            for (row, &k) in c[1..].iter().enumerate() {
                let pk = &self.pieces[k];
                for j in 0..n {
                    a[row * n + j] = pk.slope[j] - p0.slope[j];
                }
                b[row] = p0.intercept - pk.intercept;
            }
            let Some(x) = solve(&a, &b) else { return };
            let value = self.value(&x);
            let tol = tie_tol(value);
            if c.iter().any(|&k| self.pieces[k].value(&x) < value - tol) {
                return;
            }
            let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if out
                .iter()
                .any(|v| v.point.iter().zip(&x).all(|(p, q)| (p - q).abs() <= 1e-9 * scale))
            {
                return;
            }
            let active = self.active_pieces(&x);
            out.push(PlVertex {
                point: x,
                value,
                active,
            });
        });
        out
    }
}

/// The subgradient set: a convex polytope in slope space given by its vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgradientSet {
    pub vertices: Vec<Vec<f64>>,
}

impl SubgradientSet {
    /// Reduces `slopes` to the vertices of their convex hull (1D and 2D) or
    /// to distinct points (3D).
    pub fn from_slopes(slopes: Vec<Vec<f64>>) -> Self {
        let dim = slopes.first().map_or(0, |s| s.len());
        let vertices = match dim {
            1 => {
                let lo = slopes.iter().map(|s| s[0]).fold(f64::INFINITY, f64::min);
                let hi = slopes.iter().map(|s| s[0]).fold(f64::NEG_INFINITY, f64::max);
                if hi - lo <= 1e-12 * (1.0 + lo.abs()) {
                    vec![vec![lo]]
                } else {
                    vec![vec![lo], vec![hi]]
                }
            }
            2 => {
                let pts: Vec<[f64; 2]> = slopes.iter().map(|s| [s[0], s[1]]).collect();
                convex_hull_2d(&pts).into_iter().map(|p| p.to_vec()).collect()
            }
            _ => {
                let mut v: Vec<Vec<f64>> = Vec::new();
                for s in slopes {
                    if !v.iter().any(|q| q.iter().zip(&s).all(|(a, b)| (a - b).abs() <= 1e-12)) {
                        v.push(s);
                    }
                }
                v
            }
        };
        Self { vertices }
    }

    pub fn is_singleton(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Membership of `p` in the set, up to `tol`.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        let heights = vec![0.0; self.vertices.len()];
        lower_envelope_value(&self.vertices, &heights, p, tol).is_some()
    }

    /// Lebesgue measure in slope space (1D length, 2D area; 0 otherwise).
    pub fn volume(&self) -> f64 {
        match self.vertices.first().map(|v| v.len()) {
            Some(1) if self.vertices.len() == 2 => (self.vertices[1][0] - self.vertices[0][0]).abs(),
            Some(2) if self.vertices.len() >= 3 => {
                let poly: Vec<[f64; 2]> = self.vertices.iter().map(|v| [v[0], v[1]]).collect();
                super::hull::polygon_area(&poly).abs()
            }
            _ => 0.0,
        }
    }
}

/// `∂f(x)`: convex hull of the slopes of the pieces active at `x`.
pub fn subgradient_pl(f: &PlConvexFunction, x: &[f64]) -> Result<SubgradientSet> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.len(),
        });
    }
    let slopes = f
        .active_pieces(x)
        .into_iter()
        .map(|i| f.pieces()[i].slope.clone())
        .collect();
    Ok(SubgradientSet::from_slopes(slopes))
}

/// Legendre conjugate of a PL convex function: PL on `conv(slopes)`, `+inf`
/// outside.
#[derive(Debug, Clone)]
pub struct ConjugatePl {
    dim: usize,
    /// Pieces `(x_j, -f(x_j))` over the vertices `x_j` of `f`; `None` when the
    /// slopes of `f` do not span `R^n`.
    pieces: Option<PlConvexFunction>,
    facets: Vec<Halfspace>,
    slopes: Vec<Vec<f64>>,
    heights: Vec<f64>,
}

impl ConjugatePl {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The affine pieces of the conjugate on its domain, if the domain is
    /// full-dimensional.
    pub fn pieces(&self) -> Option<&PlConvexFunction> {
        self.pieces.as_ref()
    }

    /// Facets of the domain `conv(slopes)` (empty if it is lower-dimensional).
    pub fn domain_facets(&self) -> &[Halfspace] {
        &self.facets
    }

    /// Lifted points `(slope_k, -intercept_k)` whose lower hull is the graph.
    pub fn lifted_points(&self) -> (&[Vec<f64>], &[f64]) {
        (&self.slopes, &self.heights)
    }

    pub fn in_domain(&self, p: &[f64]) -> bool {
        let scale = 1.0 + p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if self.pieces.is_some() {
            self.facets.iter().all(|h| h.violation(p) <= 1e-9 * scale)
        } else {
            let zeros = vec![0.0; self.slopes.len()];
            lower_envelope_value(&self.slopes, &zeros, p, 1e-9 * scale).is_some()
        }
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        if !self.in_domain(p) {
            return f64::INFINITY;
        }
        match &self.pieces {
            Some(f) => f.value(p),
            None => {
                let scale = 1.0 + p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                lower_envelope_value(&self.slopes, &self.heights, p, 1e-9 * scale).unwrap_or(f64::INFINITY)
            }
        }
    }

    /// Points at which the conjugate of this function attains its sup: the
    /// vertices of the linearity complex on the domain.
    fn complex_vertices(&self) -> Vec<(Vec<f64>, f64)> {
        let Some(g) = &self.pieces else {
            return self
                .slopes
                .iter()
                .map(|s| (s.clone(), self.value(s)))
                .filter(|(_, v)| v.is_finite())
                .collect();
        };
        let n = self.dim;
        let gp = g.pieces();
        let mut out: Vec<(Vec<f64>, f64)> = Vec::new();
        for k in 1..=(n + 1).min(gp.len()) {
            let nf = n + 1 - k;
            if nf > self.facets.len() {
                continue;
            }
            for_each_combination(gp.len(), k, |pc| {
                for_each_combination(self.facets.len(), nf, |fc| {
                    let mut a = Vec::with_capacity(n * n);
                    let mut b = Vec::with_capacity(n);
                    let p0 = &gp[pc[0]];
                    for &j in &pc[1..] {
                        a.extend(sub(&gp[j].slope, &p0.slope));
                        b.push(p0.intercept - gp[j].intercept);
                    }
                    for &j in fc {
                        a.extend(self.facets[j].normal.iter().copied());
                        b.push(self.facets[j].offset);
                    }
                    let Some(p) = solve(&a, &b) else { return };
                    if !self.in_domain(&p) {
                        return;
                    }
                    let v = g.value(&p);
                    let tol = tie_tol(v);
                    if pc.iter().any(|&j| gp[j].value(&p) < v - tol) {
                        return;
                    }
                    out.push(self.snap_to_lifted(p, v));
                });
            });
        }
        out
    }

    /// Replaces a computed complex vertex by the lifted point it approximates.
    fn snap_to_lifted(&self, p: Vec<f64>, v: f64) -> (Vec<f64>, f64) {
        let scale = 1.0 + p.iter().fold(v.abs(), |m, x| m.max(x.abs()));
        self.slopes
            .iter()
            .zip(&self.heights)
            .find(|(s, h)| dist(s, &p) <= 1e-7 * scale && (*h - v).abs() <= 1e-7 * scale)
            .map(|(s, h)| (s.clone(), *h))
            .unwrap_or((p, v))
    }

    /// The conjugate of this conjugate, as an evaluator.
    pub fn conjugate(&self) -> Biconjugate {
        Biconjugate {
            vertices: self.complex_vertices(),
        }
    }
}

/// `(f*)*` evaluated as a max over the vertices of the linearity complex of
/// `f*`.
#[derive(Debug, Clone)]
pub struct Biconjugate {
    vertices: Vec<(Vec<f64>, f64)>,
}

impl Biconjugate {
    pub fn value(&self, x: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|(p, v)| dot(x, p) - v)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Exact Legendre conjugate of a PL convex function.
pub fn legendre_pl(f: &PlConvexFunction) -> ConjugatePl {
    let n = f.dim();
    let slopes = f.slopes();
    let heights: Vec<f64> = f.pieces().iter().map(|p| -p.intercept).collect();
    if affine_rank(&slopes, 1e-12) == n {
        if let Some(facets) = hull_facets(&slopes) {
            let verts = f.vertices();
            if !verts.is_empty() {
                let pieces = verts.iter().map(|v| Piece::new(v.point.clone(), -v.value)).collect();
                if let Ok(g) = PlConvexFunction::new(n, pieces) {
                    return ConjugatePl {
                        dim: n,
                        pieces: Some(g),
                        facets,
                        slopes,
                        heights,
                    };
                }
            }
        }
    }
    ConjugatePl {
        dim: n,
        pieces: None,
        facets: Vec::new(),
        slopes,
        heights,
    }
}

/// Default test points for [`biconjugate_check`]: a cube grid enclosing every
/// vertex of `f` with margin.
pub fn default_test_grid(f: &PlConvexFunction) -> Vec<Vec<f64>> {
    let n = f.dim();
    let reach = f
        .vertices()
        .iter()
        .flat_map(|v| v.point.clone())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let r = 2.0 * (1.0 + reach);
    let res: usize = match n {
        1 => 101,
        2 => 21,
        _ => 9,
    };
    let axis: Vec<f64> = (0..res).map(|i| -r + 2.0 * r * i as f64 / (res - 1) as f64).collect();
    let mut pts = vec![Vec::new()];
    for _ in 0..n {
        pts = pts
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                axis.iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    pts
}

/// `sup |f - f**|` over the default test grid.
pub fn biconjugate_check(f: &PlConvexFunction) -> f64 {
    biconjugate_check_on(f, &default_test_grid(f))
}

pub fn biconjugate_check_on(f: &PlConvexFunction, points: &[Vec<f64>]) -> f64 {
    let bi = legendre_pl(f).conjugate();
    points
        .iter()
        .map(|x| (f.value(x) - bi.value(x)).abs())
        .fold(0.0, f64::max)
}
