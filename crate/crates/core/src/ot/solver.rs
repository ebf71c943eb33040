use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::laguerre::{cell_masses, laguerre_cells, Cell, LaguerreDiagram};
use crate::convex::{Piece, PlConvexFunction};
use crate::error::{invalid, Error, Result};
use crate::linalg::{compensated_sum, dot, solve};
use crate::ma::DiscreteMeasure;
use crate::polytope::{Density, Polytope};

/// Newton solver settings.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Stop when `max_i |int_{L_i} g - a_i| <= tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Starting weights; the default is the power diagram of a shrunken copy
    /// of the targets, whose cells are all nonempty.
    pub initial_weights: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 100,
            initial_weights: None,
        }
    }
}

impl SolverOptions {
    /// Default tolerance matched to the density's quadrature accuracy.
    pub fn for_density(g: &Density) -> Self {
        Self {
            tol: if g.is_exact() { 1e-9 } else { 1e-6 },
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Final `max_i |mass_i - a_i|`.
    pub residual: f64,
    pub residual_history: Vec<f64>,
    /// Dual objective at every accepted iterate; nondecreasing.
    pub dual_values: Vec<f64>,
    /// `max |sum_i mass_i - 1|` over the accepted iterates.
    pub mass_drift: f64,
    /// Step halvings performed by the line search.
    pub damping_events: usize,
    /// Iterations that fell back to a diagonal step.
    pub gradient_steps: usize,
}

/// Output of [`solve_dual`].
#[derive(Debug, Clone)]
pub struct Solution {
    /// The Monge-Ampère solution, normalised by `min w = 0`.
    pub u: PlConvexFunction,
    /// Weights with `min_i w_i = 0`.
    pub weights: Vec<f64>,
    pub targets: Vec<Vec<f64>>,
    pub masses: Vec<f64>,
    pub diagram: LaguerreDiagram,
    pub diagnostics: Diagnostics,
}

impl Solution {
    /// `phi(p) = max_i <p, y_i> - w_i`, the dual potential on `P`.
    pub fn phi(&self) -> PlConvexFunction {
        PlConvexFunction::new(
            self.targets[0].len(),
            self.targets
                .iter()
                .zip(&self.weights)
                .map(|(y, w)| Piece::new(y.clone(), -w))
                .collect(),
        )
        .expect("targets share a dimension")
    }
}

/// Weights making every Laguerre cell nonempty: the power diagram of
/// `z_i = c + s (y_i - ybar)` is the Voronoi diagram of the `z_i`, which lie
/// inside `P` when `s` is small.
pub fn initial_weights(p: &Polytope, targets: &[Vec<f64>]) -> Vec<f64> {
    let n = targets.len();
    let dim = p.dim();
    let c = p.centroid();
    let mut ybar = vec![0.0; dim];
    for y in targets {
        for k in 0..dim {
            ybar[k] += y[k] / n as f64;
        }
    }
    let spread = targets
        .iter()
        .map(|y| crate::linalg::dist(y, &ybar))
        .fold(0.0, f64::max);
    let depth = p.depth(&c);
    let s = if spread > 0.0 { 0.5 * depth / spread } else { 1.0 };
    targets
        .iter()
        .map(|y| {
            let z: Vec<f64> = (0..dim).map(|k| c[k] + s * (y[k] - ybar[k])).collect();
            dot(&z, &z) / (2.0 * s)
        })
        .collect()
}

fn dual_value(d: &LaguerreDiagram, g: &Density, a: &[f64]) -> f64 {
    // K(w) = -sum a_i w_i - int_P max_j (<p, y_j> - w_j) g(p) dp
    let w = d.weights();
    let ys = d.targets();
    let mut parts = Vec::with_capacity(2 * w.len());
    for (i, cell) in d.cells().iter().enumerate() {
        parts.push(-a[i] * w[i]);
        let f = |p: &[f64]| dot(p, &ys[i]) - w[i];
        parts.push(-match cell {
            Cell::Empty => 0.0,
            Cell::Interval { lo, hi, .. } => g.integrate_interval(*lo, *hi, f),
            Cell::Polygon(poly) => g.integrate_polygon(&poly.vertices, f),
        });
    }
    compensated_sum(parts)
}

fn max_dev(m: &[f64], a: &[f64]) -> f64 {
    m.iter().zip(a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn l2_dev(m: &[f64], a: &[f64]) -> f64 {
    m.iter().zip(a).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn validate(p: &Polytope, g: &Density, mu: &DiscreteMeasure) -> Result<()> {
    if p.dim() > 2 {
        return Err(Error::Unsupported(format!("the solver in dimension {}", p.dim())));
    }
    if mu.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: mu.dim(),
        });
    }
    if g.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: g.dim(),
        });
    }
    if (mu.total_mass() - 1.0).abs() > 1e-9 {
        return invalid(format!("target measure has total mass {}", mu.total_mass()));
    }
    if mu.points().iter().flatten().any(|v| v.abs() > 1e8) {
        return invalid("atoms must satisfy |y| <= 1e8");
    }
    let total = g.mass(p);
    if (total - 1.0).abs() > g.tol_mass() {
        return invalid(format!("density has mass {total} on P"));
    }
    Ok(())
}

/// Maximises the concave dual `K(w) = -sum a_i w_i - int_P phi_w g` by damped
/// Newton iteration. On success the Laguerre cell masses match `mu` to
/// `opts.tol`.
pub fn solve_dual(p: &Polytope, g: &Density, mu: &DiscreteMeasure, opts: &SolverOptions) -> Result<Solution> {
    validate(p, g, mu)?;
    let ys = mu.points().to_vec();
    let a = mu.masses();
    let n = ys.len();
    let mut w = match &opts.initial_weights {
        Some(w0) if w0.len() == n => w0.clone(),
        Some(w0) => return invalid(format!("{} initial weights for {n} atoms", w0.len())),
        None => initial_weights(p, &ys),
    };
    let mut diagram = laguerre_cells(p, &ys, &w)?;
    let mut masses = cell_masses(&diagram, g);
    let min_a = a.iter().copied().fold(f64::INFINITY, f64::min);
    let min_m0 = masses.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_m0 > 0.0) {
        return invalid("initial weights leave a Laguerre cell without mass");
    }
    let floor = 0.5 * min_a.min(min_m0);
    let mut diag = Diagnostics::default();
    let mut k_val = dual_value(&diagram, g, a);
    let record = |diag: &mut Diagnostics, m: &[f64], k: f64| {
        diag.residual_history.push(max_dev(m, a));
        diag.dual_values.push(k);
        diag.mass_drift = diag.mass_drift.max((compensated_sum(m.iter().copied()) - 1.0).abs());
    };
    record(&mut diag, &masses, k_val);

    let mut stalled = false;
    while max_dev(&masses, a) > opts.tol && diag.iterations < opts.max_iter {
        diag.iterations += 1;
        let grad: Vec<f64> = masses.iter().zip(a).map(|(m, ai)| m - ai).collect();
        let h = diagram.hessian(g);
        // fix w_0 to remove the constant mode
        let r = n - 1;
        let mut ar = vec![0.0; r * r];
        for i in 0..r {
            for j in 0..r {
                ar[i * r + j] = h[(i + 1) * n + j + 1];
            }
        }
        let mut dir = vec![0.0; n];
        match solve(&ar, &grad[1..]) {
            Some(dr) if dr.iter().all(|v| v.is_finite()) => dir[1..].copy_from_slice(&dr),
            _ => {
                diag.gradient_steps += 1;
                let scale = (0..n).map(|i| h[i * n + i]).fold(0.0, f64::max).max(1e-12);
                for i in 0..n {
                    let hii = h[i * n + i];
                    dir[i] = grad[i] / if hii > 1e-12 { hii } else { scale };
                }
            }
        }
        let g0 = l2_dev(&masses, a);
        let mut tau = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = w.iter().zip(&dir).map(|(wi, di)| wi + tau * di).collect();
            let td = laguerre_cells(p, &ys, &trial)?;
            let tm = cell_masses(&td, g);
            let tk = dual_value(&td, g, a);
            let min_t = tm.iter().copied().fold(f64::INFINITY, f64::min);
            if min_t >= floor && l2_dev(&tm, a) <= (1.0 - 0.5 * tau) * g0 && tk >= k_val - 1e-13 * (1.0 + k_val.abs()) {
                w = trial;
                diagram = td;
                masses = tm;
                k_val = tk;
                accepted = true;
                break;
            }
            tau *= 0.5;
            diag.damping_events += 1;
        }
        if !accepted {
            stalled = true;
            break;
        }
        record(&mut diag, &masses, k_val);
    }
    diag.residual = max_dev(&masses, a);
    let shift = w.iter().copied().fold(f64::INFINITY, f64::min);
    w.iter_mut().for_each(|v| *v -= shift);
    let diagram = laguerre_cells(p, &ys, &w)?;
    let masses = cell_masses(&diagram, g);
    let u = solution_u(&diagram)?;
    let sol = Solution {
        u,
        weights: w,
        targets: ys,
        masses,
        diagram,
        diagnostics: diag,
    };
    if sol.diagnostics.residual > opts.tol || stalled {
        return Err(Error::NoConvergence {
            iterations: sol.diagnostics.iterations,
            residual: sol.diagnostics.residual,
            best: Box::new(sol),
        });
    }
    Ok(sol)
}

/// `u(x) = max_i [w_i + h_{L_i}(x - y_i)]`, the conjugate of
/// `max_i <p, y_i> - w_i` restricted to `P`. Every cell must be nonempty.
pub fn solution_u(d: &LaguerreDiagram) -> Result<PlConvexFunction> {
    let mut pieces = Vec::new();
    for (i, cell) in d.cells().iter().enumerate() {
        if cell.is_empty() {
            return Err(Error::InconsistentState(format!("Laguerre cell {i} is empty")));
        }
        let (y, w) = (&d.targets()[i], d.weights()[i]);
        for v in cell.vertices() {
            let b = w - dot(y, &v);
            pieces.push(Piece::new(v, b));
        }
    }
    PlConvexFunction::new(d.source().dim(), pieces)
}

/// Solves from several randomly perturbed starting weights and returns the
/// largest sup-distance between the resulting potentials on a test grid.
pub fn uniqueness_probe(
    p: &Polytope,
    g: &Density,
    mu: &DiscreteMeasure,
    seeds: &[u64],
    opts: &SolverOptions,
) -> Result<f64> {
    validate(p, g, mu)?;
    let base = initial_weights(p, mu.points());
    let spread =
        base.iter().copied().fold(f64::NEG_INFINITY, f64::max) - base.iter().copied().fold(f64::INFINITY, f64::min);
    let mut us = Vec::new();
    for &seed in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut delta = 0.25 * spread.max(1e-3);
        let w0 = loop {
            let w: Vec<f64> = base.iter().map(|b| b + delta * rng.random_range(-1.0..1.0)).collect();
            let d = laguerre_cells(p, mu.points(), &w)?;
            if cell_masses(&d, g).iter().all(|m| *m > 0.0) {
                break w;
            }
            delta *= 0.5;
        };
        let o = SolverOptions {
            initial_weights: Some(w0),
            ..opts.clone()
        };
        us.push(solve_dual(p, g, mu, &o)?.u);
    }
    let r = 2.0 * (1.0 + p.diameter() + mu.points().iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())));
    let res = if p.dim() == 1 { 401 } else { 41 };
    let grid = crate::convex::Grid::cube(p.dim(), r, res)?;
    let mut worst: f64 = 0.0;
    for (i, a) in us.iter().enumerate() {
        for b in &us[..i] {
            for x in grid.points() {
                worst = worst.max((a.value(&x) - b.value(&x)).abs());
            }
        }
    }
    Ok(worst)
}
