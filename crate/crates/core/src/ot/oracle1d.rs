use crate::convex::{Piece, PlConvexFunction};
use crate::error::{invalid, Result};
use crate::ma::DiscreteMeasure;
use crate::polytope::{Density, Polytope};

/// Closed-form one-dimensional solution by inversion of the cumulative
/// distribution of `g`.
#[derive(Debug, Clone)]
pub struct Oracle1d {
    pub u: PlConvexFunction,
    /// Weights in the order of the input atoms, `min w = 0`.
    pub weights: Vec<f64>,
    /// Cell `[lo, hi]` of each atom, input order.
    pub cells: Vec<(f64, f64)>,
}

pub fn oracle_1d(p: &Polytope, g: &Density, mu: &DiscreteMeasure) -> Result<Oracle1d> {
    let (lo, hi) = match p.interval_bounds() {
        Some(b) if p.dim() == 1 && mu.dim() == 1 && g.dim() == 1 => b,
        _ => return invalid("the one-dimensional oracle needs an interval and atoms on the line"),
    };
    let n = mu.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| mu.points()[i][0].total_cmp(&mu.points()[j][0]));
    let cdf = |t: f64| g.integrate_interval(lo, t, |_| 1.0);
    let total = cdf(hi);
    let mut cuts = vec![lo];
    let mut acc = 0.0;
    for &i in &order[..n - 1] {
        acc += mu.masses()[i];
        let target = acc * total;
        let (mut a, mut b) = (*cuts.last().unwrap(), hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if cdf(m) < target {
                a = m;
            } else {
                b = m;
            }
        }
        cuts.push(0.5 * (a + b));
    }
    cuts.push(hi);
    // phi continuous at t_k: z_k t - w_k = z_{k+1} t - w_{k+1}
    let z: Vec<f64> = order.iter().map(|&i| mu.points()[i][0]).collect();
    let mut ws = vec![0.0; n];
    for k in 1..n {
        ws[k] = ws[k - 1] + cuts[k] * (z[k] - z[k - 1]);
    }
    let m = ws.iter().copied().fold(f64::INFINITY, f64::min);
    let mut weights = vec![0.0; n];
    let mut cells = vec![(0.0, 0.0); n];
    let mut pieces = Vec::with_capacity(2 * n);
    for (k, &i) in order.iter().enumerate() {
        let w = ws[k] - m;
        weights[i] = w;
        cells[i] = (cuts[k], cuts[k + 1]);
        for v in [cuts[k], cuts[k + 1]] {
            pieces.push(Piece::new(vec![v], w - z[k] * v));
        }
    }
    Ok(Oracle1d {
        u: PlConvexFunction::new(1, pieces)?,
        weights,
        cells,
    })
}
