use serde::Serialize;

use super::Polytope;
use crate::error::{Error, Result};

/// Per-vertex outcome of the Delzant test.
#[derive(Debug, Clone, Serialize)]
pub struct VertexCheck {
    pub vertex: [f64; 2],
    /// Primitive outward integer normals of the two incident facets.
    pub normals: [[i64; 2]; 2],
    pub det: i64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DelzantReport {
    pub delzant: bool,
    pub vertices: Vec<VertexCheck>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Best rational `p/q` for `x` with `q <= max_den` via continued fractions.
fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e12 {
            return None;
        }
        let a = a as i64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    ((x - h1 as f64 / k1 as f64).abs() <= tol).then_some((h1, k1))
}

/// Primitive integer vector parallel to `v` (same orientation).
fn primitive(v: [f64; 2]) -> Option<[i64; 2]> {
    let (ax, ay) = (v[0].abs(), v[1].abs());
    let m = ax.max(ay);
    if m == 0.0 {
        return None;
    }
    let (small, big_is_x) = if ax >= ay {
        (v[1] / v[0], true)
    } else {
        (v[0] / v[1], false)
    };
    let (p, q) = rationalize(small, 1000, 1e-10)?;
    let (x, y) = if big_is_x { (q, p) } else { (p, q) };
    let g = gcd(x, y).max(1);
    let (mut x, mut y) = (x / g, y / g);
    // restore the orientation of v
    let sign = if big_is_x { v[0].signum() } else { v[1].signum() } as i64;
    let lead = if big_is_x { x } else { y };
    if lead.signum() != sign {
        x = -x;
        y = -y;
    }
    Some([x, y])
}

/// Delzant test for a polygon: every pair of facet normals meeting at a vertex
/// must be a basis of `Z^2`.
pub fn delzant_check_2d(p: &Polytope) -> Result<DelzantReport> {
    let poly = p
        .polygon_vertices()
        .ok_or_else(|| Error::Unsupported("the Delzant check is two-dimensional".into()))?;
    let n = poly.len();
    let mut normals = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b) = (poly[k], poly[(k + 1) % n]);
        let normal = [b[1] - a[1], a[0] - b[0]];
        normals.push(
            primitive(normal).ok_or_else(|| Error::NotCheckable(format!("facet normal {normal:?} is not rational")))?,
        );
    }
    let mut vertices = Vec::with_capacity(n);
    for k in 0..n {
        let prev = normals[(k + n - 1) % n];
        let next = normals[k];
        let det = prev[0] * next[1] - prev[1] * next[0];
        vertices.push(VertexCheck {
            vertex: poly[k],
            normals: [prev, next],
            det,
            ok: det.abs() == 1,
        });
    }
    Ok(DelzantReport {
        delzant: vertices.iter().all(|v| v.ok),
        vertices,
    })
}
