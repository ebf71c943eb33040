//! Convex hulls of small point sets in one to three dimensions.

use crate::linalg::{affine_rank, dot, for_each_combination, solve, sub};

/// A closed halfspace `<normal, p> <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    /// Signed violation scaled by the normal length (positive means outside).
    pub fn violation(&self, p: &[f64]) -> f64 {
        let n = dot(&self.normal, &self.normal).sqrt();
        (dot(&self.normal, p) - self.offset) / n
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain. Returns the hull in counter-clockwise order with
/// collinear points removed. Degenerate inputs give one or two points.
pub fn convex_hull_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let scale = pts.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let tol = 1e-12 * scale;
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol);
    if pts.len() <= 2 {
        return pts;
    }
    let area_tol = 1e-13 * scale * scale;
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= area_tol {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= area_tol {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Signed area of a polygon (positive for counter-clockwise order).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut a = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        a += p[0] * q[1] - p[1] * q[0];
    }
    0.5 * a
}

/// Facet halfspaces of `conv(points)` for a full-dimensional point set in
/// dimension 1, 2 or 3. Returns `None` when the hull is not full-dimensional.
pub fn hull_facets(points: &[Vec<f64>]) -> Option<Vec<Halfspace>> {
    let n = points.first()?.len();
    if affine_rank(points, 1e-12) < n {
        return None;
    }
    match n {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            Some(vec![Halfspace::new(vec![-1.0], -lo), Halfspace::new(vec![1.0], hi)])
        }
        2 => {
            let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            let hull = convex_hull_2d(&pts);
            let m = hull.len();
            let mut out = Vec::with_capacity(m);
            for i in 0..m {
                let a = hull[i];
                let b = hull[(i + 1) % m];
                let normal = vec![b[1] - a[1], a[0] - b[0]];
                let offset = normal[0] * a[0] + normal[1] * a[1];
                out.push(Halfspace::new(normal, offset));
            }
            Some(out)
        }
        3 => {
            let scale = points.iter().flat_map(|p| p.iter()).fold(1.0f64, |m, v| m.max(v.abs()));
            let tol = 1e-10 * scale;
            let mut out: Vec<Halfspace> = Vec::new();
            for_each_combination(points.len(), 3, |c| {
                let a = &points[c[0]];
                let u = sub(&points[c[1]], a);
                let v = sub(&points[c[2]], a);
                let mut normal = vec![
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                let len = dot(&normal, &normal).sqrt();
                if len <= 1e-12 * scale * scale {
                    return;
                }
                normal.iter_mut().for_each(|x| *x /= len);
                let offset = dot(&normal, a);
                let (mut above, mut below) = (false, false);
                for p in points {
                    let s = dot(&normal, p) - offset;
                    above |= s > tol;
                    below |= s < -tol;
                }
                if above && below {
                    return;
                }
                if above {
                    normal.iter_mut().for_each(|x| *x = -*x);
                }
                let offset = dot(&normal, a);
                let dup = out
                    .iter()
                    .any(|h| h.normal.iter().zip(&normal).all(|(x, y)| (x - y).abs() <= 1e-9));
                if !dup {
                    out.push(Halfspace::new(normal, offset));
                }
            });
            Some(out)
        }
        _ => None,
    }
}

/// Barycentric test: value of the lower convex envelope of the lifted points
/// `(points[k], heights[k])` at `p`, or `None` if `p` is outside `conv(points)`.
///
/// Enumerates every affinely independent subset of at most `n + 1` points and
/// keeps the cheapest convex combination reaching `p`. Exponential in `n`, only
/// meant for small inputs and as an independent check.
pub fn lower_envelope_value(points: &[Vec<f64>], heights: &[f64], p: &[f64], tol: f64) -> Option<f64> {
    let n = p.len();
    let mut best: Option<f64> = None;
    for k in 1..=(n + 1).min(points.len()) {
        for_each_combination(points.len(), k, |c| {
            let base = &points[c[0]];
            let rhs = sub(p, base);
            let lambda: Vec<f64> = if k == 1 {
                if rhs.iter().any(|v| v.abs() > tol) {
                    return;
                }
                vec![1.0]
            } else {
                // least squares via normal equations on the (k-1) edge vectors
                let edges: Vec<Vec<f64>> = c[1..].iter().map(|&j| sub(&points[j], base)).collect();
                let m = k - 1;
                let mut gram = vec![0.0; m * m];
                let mut b = vec![0.0; m];
                for i in 0..m {
                    for j in 0..m {
                        gram[i * m + j] = dot(&edges[i], &edges[j]);
                    }
                    b[i] = dot(&edges[i], &rhs);
                }
                let Some(mu) = solve(&gram, &b) else { return };
                let mut recon = base.clone();
                for (e, &m) in edges.iter().zip(&mu) {
                    for (r, ei) in recon.iter_mut().zip(e) {
                        *r += m * ei;
                    }
                }
                if recon.iter().zip(p).any(|(a, b)| (a - b).abs() > tol) {
                    return;
                }
                let mut lam = vec![1.0 - mu.iter().sum::<f64>()];
                lam.extend(mu);
                lam
            };
            if lambda.iter().any(|&l| l < -tol) {
                return;
            }
            let v: f64 = c.iter().zip(&lambda).map(|(&j, l)| l * heights[j]).sum();
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        });
    }
    best
}
