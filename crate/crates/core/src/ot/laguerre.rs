use crate::error::{invalid, Error, Result};
use crate::linalg::{dist, dot, sub};
use crate::polytope::{clip_labeled, Density, LabeledPolygon, Polytope};

/// One Laguerre cell. Polygon edges are labelled with the neighbouring atom,
/// or `None` on the boundary of `P`.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Interval {
        lo: f64,
        hi: f64,
        below: Option<usize>,
        above: Option<usize>,
    },
    Polygon(LabeledPolygon<Option<usize>>),
}

impl Cell {
    pub fn is_empty(&self) -> bool {
        matches!(self, Cell::Empty)
    }

    pub fn polytope(&self) -> Option<Polytope> {
        match self {
            Cell::Empty => None,
            Cell::Interval { lo, hi, .. } => Polytope::interval(*lo, *hi).ok(),
            Cell::Polygon(p) => Polytope::polygon(&p.vertices).ok(),
        }
    }

    /// Vertices: interval endpoints or polygon corners.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        match self {
            Cell::Empty => Vec::new(),
            Cell::Interval { lo, hi, .. } => vec![vec![*lo], vec![*hi]],
            Cell::Polygon(p) => p.vertices.iter().map(|v| v.to_vec()).collect(),
        }
    }
}

/// Power diagram of `P` for targets `y_i` and weights `w_i`:
/// `L_i = { p in P : <p, y_i> - w_i >= <p, y_j> - w_j for all j }`.
#[derive(Debug, Clone)]
pub struct LaguerreDiagram {
    source: Polytope,
    targets: Vec<Vec<f64>>,
    weights: Vec<f64>,
    cells: Vec<Cell>,
}

impl LaguerreDiagram {
    pub fn source(&self) -> &Polytope {
        &self.source
    }
    pub fn targets(&self) -> &[Vec<f64>] {
        &self.targets
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }
    pub fn len(&self) -> usize {
        self.cells.len()
    }
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Index of the cell containing `p` (the maximiser of `<p, y_i> - w_i`).
    pub fn locate(&self, p: &[f64]) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, (y, w)) in self.targets.iter().zip(&self.weights).enumerate() {
            let v = dot(p, y) - w;
            if v > best.1 {
                best = (i, v);
            }
        }
        best.0
    }

    /// `-H` of the dual: `A_ij = -int_{L_i ∩ L_j} g / |y_i - y_j|` off the
    /// diagonal and `A_ii = -sum_j A_ij`. Row-major, `n x n`.
    pub fn hessian(&self, g: &Density) -> Vec<f64> {
        let n = self.len();
        let mut a = vec![0.0; n * n];
        for (i, cell) in self.cells.iter().enumerate() {
            let mut add = |j: usize, flux: f64| {
                let c = flux / dist(&self.targets[i], &self.targets[j]);
                a[i * n + j] -= c;
                a[i * n + i] += c;
            };
            match cell {
                Cell::Empty => {}
                Cell::Interval { lo, hi, below, above } => {
                    if let Some(j) = *below {
                        add(j, g.eval(&[*lo]));
                    }
                    if let Some(j) = *above {
                        add(j, g.eval(&[*hi]));
                    }
                }
                Cell::Polygon(p) => {
                    for (s, e, label) in p.edges() {
                        if let Some(j) = label {
                            add(j, g.line_integral(s, e));
                        }
                    }
                }
            }
        }
        a
    }
}

/// Builds the Laguerre diagram of `P` (dimension 1 or 2).
pub fn laguerre_cells(p: &Polytope, targets: &[Vec<f64>], weights: &[f64]) -> Result<LaguerreDiagram> {
    let dim = p.dim();
    if dim > 2 {
        return Err(Error::Unsupported(format!("Laguerre diagrams in dimension {dim}")));
    }
    if targets.is_empty() {
        return invalid("no targets");
    }
    if targets.len() != weights.len() {
        return invalid(format!("{} targets but {} weights", targets.len(), weights.len()));
    }
    for (i, y) in targets.iter().enumerate() {
        if y.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) || !weights[i].is_finite() {
            return invalid("targets and weights must be finite");
        }
        for z in &targets[..i] {
            if dist(y, z) == 0.0 {
                return invalid(format!("duplicate target {y:?}"));
            }
        }
    }
    let cells = (0..targets.len())
        .map(|i| match dim {
            1 => interval_cell(p, targets, weights, i),
            _ => polygon_cell(p, targets, weights, i),
        })
        .collect();
    Ok(LaguerreDiagram {
        source: p.clone(),
        targets: targets.to_vec(),
        weights: weights.to_vec(),
        cells,
    })
}

fn interval_cell(p: &Polytope, targets: &[Vec<f64>], weights: &[f64], i: usize) -> Cell {
    let (mut lo, mut hi) = p.interval_bounds().expect("one-dimensional polytope");
    let (mut below, mut above) = (None, None);
    for j in 0..targets.len() {
        if j == i {
            continue;
        }
        let a = targets[j][0] - targets[i][0];
        let t = (weights[j] - weights[i]) / a;
        if a > 0.0 && t < hi {
            hi = t;
            above = Some(j);
        } else if a < 0.0 && t > lo {
            lo = t;
            below = Some(j);
        }
    }
    if hi > lo {
        Cell::Interval { lo, hi, below, above }
    } else {
        Cell::Empty
    }
}

fn polygon_cell(p: &Polytope, targets: &[Vec<f64>], weights: &[f64], i: usize) -> Cell {
    let mut poly = LabeledPolygon::uniform(p.polygon_vertices().expect("two-dimensional polytope"), None);
    let yi = &targets[i];
    for j in 0..targets.len() {
        if j == i {
            continue;
        }
        let n = sub(&targets[j], yi);
        poly = clip_labeled(&poly, [n[0], n[1]], weights[j] - weights[i], Some(j));
        if poly.is_empty() {
            return Cell::Empty;
        }
    }
    Cell::Polygon(poly)
}

/// `int_{L_i} g` for every cell.
pub fn cell_masses(d: &LaguerreDiagram, g: &Density) -> Vec<f64> {
    d.cells
        .iter()
        .map(|c| match c {
            Cell::Empty => 0.0,
            Cell::Interval { lo, hi, .. } => g.integrate_interval(*lo, *hi, |_| 1.0),
            Cell::Polygon(p) => g.integrate_polygon(&p.vertices, |_| 1.0),
        })
        .collect()
}
