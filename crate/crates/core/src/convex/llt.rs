//! Linear-time discrete Legendre transforms on grids.
//!
//! A sample on a grid is read as its piecewise-linear interpolant, extended
//! affinely past the grid with the boundary slopes. Its conjugate is then the
//! max over nodes of `<x, p> - f(x)` on the box of slopes, and `+inf` outside.
//! In 1D the box is exactly `conv(slopes)`; in higher dimension the box is the
//! per-axis range of boundary slopes.

use super::sampled::{Grid, SampledFunction};
use crate::error::{invalid, Error, Result};

/// `max_i (p x_i - f_i)` for every `p` in ascending `ps`. Nodes with `f = +inf`
/// are skipped; no finite node gives `-inf`. Runs in `O(len(xs) + len(ps))`.
pub fn discrete_conjugate_1d(xs: &[f64], fs: &[f64], ps: &[f64]) -> Vec<f64> {
    // lower convex hull of the finite points (xs ascending)
    let mut hx: Vec<f64> = Vec::with_capacity(xs.len());
    let mut hf: Vec<f64> = Vec::with_capacity(xs.len());
    for (&x, &f) in xs.iter().zip(fs) {
        if !f.is_finite() {
            continue;
        }
        while hx.len() >= 2 {
            let m = hx.len();
            let (x0, f0, x1, f1) = (hx[m - 2], hf[m - 2], hx[m - 1], hf[m - 1]);
            // drop the middle point if it lies on or above the chord
            if (f1 - f0) * (x - x0) >= (f - f0) * (x1 - x0) {
                hx.pop();
                hf.pop();
            } else {
                break;
            }
        }
        hx.push(x);
        hf.push(f);
    }
    if hx.is_empty() {
        return vec![f64::NEG_INFINITY; ps.len()];
    }
    let mut out = Vec::with_capacity(ps.len());
    let mut j = 0;
    for &p in ps {
        while j + 1 < hx.len() && (hf[j + 1] - hf[j]) < p * (hx[j + 1] - hx[j]) {
            j += 1;
        }
        // a decreasing p sequence restarts the walk
        while j > 0 && (hf[j] - hf[j - 1]) > p * (hx[j] - hx[j - 1]) {
            j -= 1;
        }
        out.push(p * hx[j] - hf[j]);
    }
    out
}

fn slope_tol(c: f64) -> f64 {
    1e-9 * (1.0 + c.abs())
}

/// Conjugate of a convex 1D sample on the caller's dual grid.
pub fn llt_1d(s: &SampledFunction, dual: &Grid) -> Result<SampledFunction> {
    if s.dim() != 1 || dual.dim() != 1 {
        return invalid("llt_1d needs one-dimensional grids");
    }
    if !s.is_tagged_convex() {
        if let Some(msg) = s.convexity_violation(super::sampled::TOL_CONVEX) {
            return Err(Error::NonConvex(msg));
        }
    }
    let xs = s.grid().axis(0);
    let fs = s.values();
    let finite: Vec<usize> = (0..fs.len()).filter(|&i| fs[i].is_finite()).collect();
    if finite.len() < 2 {
        return invalid("need at least two finite nodes");
    }
    let (a, b) = (finite[0], finite[finite.len() - 1]);
    if b - a + 1 != finite.len() {
        return Err(Error::NonConvex("effective domain is not an interval".into()));
    }
    let c_lo = (fs[a + 1] - fs[a]) / (xs[a + 1] - xs[a]);
    let c_hi = (fs[b] - fs[b - 1]) / (xs[b] - xs[b - 1]);
    let ps = dual.axis(0);
    let mut vals = discrete_conjugate_1d(&xs, fs, &ps);
    for (v, &p) in vals.iter_mut().zip(&ps) {
        if p < c_lo - slope_tol(c_lo) || p > c_hi + slope_tol(c_hi) {
            *v = f64::INFINITY;
        }
    }
    let out = SampledFunction::new(dual.clone(), vals)?;
    Ok(out)
}

/// Discrete conjugate `max_nodes <x, p> - f(x)` on an nD dual grid, computed
/// axis by axis with [`discrete_conjugate_1d`]. No domain marking.
pub fn discrete_conjugate(s: &SampledFunction, dual: &Grid) -> Result<SampledFunction> {
    let n = s.dim();
    if dual.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: dual.dim(),
        });
    }
    let mut shape: Vec<usize> = s.grid().counts().to_vec();
    // a = -f, so that each pass is b(p_k) = max_{x_k} x_k p_k + a(x_k)
    let mut a: Vec<f64> = s.values().iter().map(|v| -v).collect();
    for k in (0..n).rev() {
        let xs = s.grid().axis(k);
        let ps = dual.axis(k);
        let outer: usize = shape[..k].iter().product();
        let inner: usize = shape[k + 1..].iter().product();
        let (len_in, len_out) = (shape[k], ps.len());
        let mut b = vec![0.0; outer * len_out * inner];
        let mut line = vec![0.0; len_in];
        for o in 0..outer {
            for r in 0..inner {
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = -a[o * len_in * inner + i * inner + r];
                }
                let conj = discrete_conjugate_1d(&xs, &line, &ps);
                for (j, v) in conj.into_iter().enumerate() {
                    b[o * len_out * inner + j * inner + r] = v;
                }
            }
        }
        shape[k] = len_out;
        a = b;
    }
    // fully infinite inputs give -inf; report those as +inf (empty domain)
    let vals = a
        .into_iter()
        .map(|v| if v == f64::NEG_INFINITY { f64::INFINITY } else { v })
        .collect();
    SampledFunction::new(dual.clone(), vals)
}

/// Per-axis range of boundary slopes of a sample (its conjugate's domain box).
pub fn slope_box(s: &SampledFunction) -> Vec<(f64, f64)> {
    let g = s.grid();
    let n = g.dim();
    let strides = g.strides();
    let vals = s.values();
    let mut out = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    for (k, bounds) in out.iter_mut().enumerate() {
        let h = g.spacing()[k];
        for flat in 0..vals.len() {
            let idx = g.multi_index(flat);
            if idx[k] != 0 {
                continue;
            }
            // walk the line along axis k
            let line: Vec<f64> = (0..g.counts()[k]).map(|i| vals[flat + i * strides[k]]).collect();
            let fin: Vec<usize> = (0..line.len()).filter(|&i| line[i].is_finite()).collect();
            if fin.len() < 2 {
                continue;
            }
            let (a, b) = (fin[0], fin[fin.len() - 1]);
            let lo = (line[a + 1] - line[a]) / h;
            let hi = (line[b] - line[b - 1]) / h;
            bounds.0 = bounds.0.min(lo);
            bounds.1 = bounds.1.max(hi);
        }
    }
    out
}

/// Conjugate of a convex nD sample on the caller's dual grid, `+inf` outside
/// the slope box.
pub fn legendre_grid(s: &SampledFunction, dual: &Grid) -> Result<SampledFunction> {
    if !s.is_tagged_convex() {
        if let Some(msg) = s.convexity_violation(super::sampled::TOL_CONVEX) {
            return Err(Error::NonConvex(msg));
        }
    }
    let conj = discrete_conjugate(s, dual)?;
    let bounds = slope_box(s);
    conj.map(|p, v| {
        let outside = p
            .iter()
            .zip(&bounds)
            .any(|(&pk, &(lo, hi))| pk < lo - slope_tol(lo) || pk > hi + slope_tol(hi));
        if outside {
            f64::INFINITY
        } else {
            v
        }
    })
}

/// Default dual grid for a PL conjugate: the box of `conv(slopes)` inflated
/// by 5% on every side.
pub fn default_dual_grid(slopes: &[Vec<f64>], res: usize) -> Result<Grid> {
    let n = slopes.first().map_or(0, |s| s.len());
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for s in slopes {
        for k in 0..n {
            lo[k] = lo[k].min(s[k]);
            hi[k] = hi[k].max(s[k]);
        }
    }
    for k in 0..n {
        let pad = 0.05 * (hi[k] - lo[k]).max(1e-3);
        lo[k] -= pad;
        hi[k] += pad;
    }
    Grid::spanning(&lo, &hi, res)
}
