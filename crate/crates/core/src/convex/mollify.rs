use super::sampled::SampledFunction;
use crate::error::{invalid, Result};

/// Unnormalised standard bump `exp(-1 / (1 - r^2))` for `r < 1`.
pub fn bump(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r * r)).exp()
    }
}

/// Discrete convolution with the standard mollifier of radius `eps`.
///
/// The stencil is the set of grid offsets strictly inside the ball of radius
/// `eps`; weights are normalised to sum to one. A node keeps a finite value
/// only if its whole stencil is inside the grid and finite (the eroded
/// domain); everything else becomes `+inf`. When `eps` is below the grid
/// spacing the stencil is the node itself.
pub fn mollify(s: &SampledFunction, eps: f64) -> Result<SampledFunction> {
    if !(eps > 0.0) || !eps.is_finite() {
        return invalid("mollifier radius must be positive");
    }
    let g = s.grid();
    let n = g.dim();
    let h = g.spacing();
    let reach: Vec<usize> = h.iter().map(|&hk| (eps / hk).ceil() as usize).collect();
    let strides = g.strides();
    let widths: Vec<usize> = reach.iter().map(|&r| 2 * r + 1).collect();
    let mut offsets: Vec<(Vec<isize>, f64)> = Vec::new();
    for t in 0..widths.iter().product::<usize>() {
        let mut rest = t;
        let mut off = vec![0isize; n];
        for k in (0..n).rev() {
            off[k] = (rest % widths[k]) as isize - reach[k] as isize;
            rest /= widths[k];
        }
        let r2: f64 = off.iter().zip(h).map(|(&o, &hk)| (o as f64 * hk).powi(2)).sum();
        let w = bump(r2.sqrt() / eps);
        if w > 0.0 {
            offsets.push((off, w));
        }
    }
    let reach: Vec<usize> = (0..n)
        .map(|k| offsets.iter().map(|(o, _)| o[k].unsigned_abs()).max().unwrap_or(0))
        .collect();
    let total: f64 = offsets.iter().map(|(_, w)| w).sum();
    for o in &mut offsets {
        o.1 /= total;
    }
    let vals = s.values();
    let mut out = vec![f64::INFINITY; vals.len()];
    let mut any = false;
    'node: for (flat, slot) in out.iter_mut().enumerate() {
        let idx = g.multi_index(flat);
        for k in 0..n {
            if idx[k] < reach[k] || idx[k] + reach[k] >= g.counts()[k] {
                continue 'node;
            }
        }
        let mut acc = 0.0;
        for (off, w) in &offsets {
            let mut j = flat as isize;
            for k in 0..n {
                j += off[k] * strides[k] as isize;
            }
            let v = vals[j as usize];
            if !v.is_finite() {
                continue 'node;
            }
            acc += w * v;
        }
        *slot = acc;
        any = true;
    }
    if !any {
        return invalid(format!("mollifier radius {eps} leaves no interior nodes"));
    }
    let out = SampledFunction::new(g.clone(), out)?;
    if s.is_tagged_convex() {
        out.tagged_convex()
    } else {
        Ok(out)
    }
}
