//! Real and transported Monge-Ampère measures of piecewise-linear convex
//! functions, and the weak-solution residual against a target measure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convex::{legendre_pl, subgradient_pl, PlConvexFunction};
use crate::error::{invalid, Error, Result};
use crate::linalg::{compensated_sum, dist};
use crate::polytope::{Density, Polytope};

/// Atomic measure `sum a_i delta_{y_i}` with strictly positive masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureJson", into = "MeasureJson")]
pub struct DiscreteMeasure {
    points: Vec<Vec<f64>>,
    masses: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct AtomJson {
    point: Vec<f64>,
    mass: f64,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    atoms: Vec<AtomJson>,
}

impl TryFrom<MeasureJson> for DiscreteMeasure {
    type Error = Error;
    fn try_from(j: MeasureJson) -> Result<Self> {
        DiscreteMeasure::new(j.atoms.into_iter().map(|a| (a.point, a.mass)).collect())
    }
}

impl From<DiscreteMeasure> for MeasureJson {
    fn from(m: DiscreteMeasure) -> Self {
        MeasureJson {
            atoms: m
                .points
                .into_iter()
                .zip(m.masses)
                .map(|(point, mass)| AtomJson { point, mass })
                .collect(),
        }
    }
}

impl DiscreteMeasure {
    /// Builds the measure, merging atoms that coincide (masses summed).
    pub fn new(atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let dim = match atoms.first() {
            Some((p, _)) if !p.is_empty() => p.len(),
            Some(_) => return invalid("atoms need a positive dimension"),
            None => return invalid("a discrete measure needs at least one atom"),
        };
        let mut points: Vec<Vec<f64>> = Vec::with_capacity(atoms.len());
        let mut masses: Vec<f64> = Vec::with_capacity(atoms.len());
        for (p, m) in atoms {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return invalid("atom coordinates must be finite");
            }
            if !(m > 0.0) || !m.is_finite() {
                return invalid(format!("atom masses must be positive, got {m}"));
            }
            let scale = 1.0 + p.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            match points.iter().position(|q| dist(q, &p) <= 1e-12 * scale) {
                Some(i) => masses[i] += m,
                None => {
                    points.push(p);
                    masses.push(m);
                }
            }
        }
        Ok(Self { points, masses })
    }

    /// Like [`DiscreteMeasure::new`] but requires total mass `1 +- 1e-9` and
    /// renormalises exactly.
    pub fn probability(atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let mut m = Self::new(atoms)?;
        let total = m.total_mass();
        if (total - 1.0).abs() > 1e-9 {
            return invalid(format!("probability measure has total mass {total}"));
        }
        m.masses.iter_mut().for_each(|a| *a /= total);
        Ok(m)
    }

    pub fn dirac(point: Vec<f64>) -> Self {
        Self {
            points: vec![point],
            masses: vec![1.0],
        }
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.masses.iter().copied())
    }

    /// `int f dmu`.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        compensated_sum(self.points.iter().zip(&self.masses).map(|(p, m)| m * f(p)))
    }

    /// Mass of the atom at `point`, or 0.
    pub fn mass_at(&self, point: &[f64], tol: f64) -> f64 {
        self.points
            .iter()
            .zip(&self.masses)
            .filter(|(p, _)| dist(p, point) <= tol)
            .map(|(_, m)| m)
            .sum()
    }
}

/// Atomic decomposition of a Monge-Ampère measure: each atom carries the
/// subgradient cell at its base point.
#[derive(Debug, Clone)]
pub struct MaResult {
    pub atoms: Vec<(Vec<f64>, f64)>,
    pub cells: Vec<Polytope>,
}

impl MaResult {
    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.atoms.iter().map(|a| a.1))
    }

    pub fn as_measure(&self) -> Result<DiscreteMeasure> {
        DiscreteMeasure::new(self.atoms.clone())
    }
}

fn subgradient_cells(f: &PlConvexFunction) -> Result<Vec<(Vec<f64>, Polytope)>> {
    if f.dim() > 2 {
        return Err(Error::Unsupported(format!(
            "Monge-Ampère measures in dimension {}",
            f.dim()
        )));
    }
    if f.pieces().len() < 2 {
        return invalid("all slopes are equal; the Monge-Ampère measure vanishes");
    }
    let mut out = Vec::new();
    for v in f.vertices() {
        let cell = subgradient_pl(f, &v.point)?;
        if cell.volume() <= 1e-14 {
            continue;
        }
        if let Ok(p) = Polytope::from_vertices(&cell.vertices) {
            out.push((v.point, p));
        }
    }
    Ok(out)
}

/// `MA(F)[B] = |∂F(B)|` for PL `F` in dimension 1 or 2. Atoms sit at the
/// vertices of the graph; zero-volume cells are dropped.
pub fn ma_real_pl(f: &PlConvexFunction) -> Result<MaResult> {
    let cells = subgradient_cells(f)?;
    let atoms = cells.iter().map(|(x, c)| (x.clone(), c.volume())).collect();
    Ok(MaResult {
        atoms,
        cells: cells.into_iter().map(|(_, c)| c).collect(),
    })
}

/// Checks `conv(slopes of F) ⊆ P`.
pub fn check_class(f: &PlConvexFunction, p: &Polytope) -> Result<()> {
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: f.dim(),
        });
    }
    let scale = 1.0 + p.diameter();
    for piece in f.pieces() {
        let v = p.violation(&piece.slope);
        if v > 1e-9 * scale {
            return Err(Error::ClassViolation(format!(
                "slope {:?} lies outside P by {v:e}",
                piece.slope
            )));
        }
    }
    Ok(())
}

/// The transported measure `g(grad F) MA(F)`: same atoms as [`ma_real_pl`],
/// masses `int_cell g`.
pub fn ma_transported_pl(f: &PlConvexFunction, g: &Density, p: &Polytope) -> Result<MaResult> {
    check_class(f, p)?;
    let cells = subgradient_cells(f)?;
    let mut atoms = Vec::with_capacity(cells.len());
    let mut kept = Vec::with_capacity(cells.len());
    for (x, c) in cells {
        let m = g.mass(&c);
        if m > 0.0 {
            atoms.push((x, m));
            kept.push(c);
        }
    }
    Ok(MaResult { atoms, cells: kept })
}

/// Bounded continuous test functions for weak-solution checks.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Monomial(Vec<u32>),
    /// `max(0, <a, x> + b)`.
    Hinge {
        a: Vec<f64>,
        b: f64,
    },
}

impl TestFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Monomial(e) => e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product(),
            TestFunction::Hinge { a, b } => (crate::linalg::dot(a, x) + b).max(0.0),
        }
    }

    /// Monomials of degree <= 3 plus `hinges` random hinge functions.
    pub fn battery(dim: usize, hinges: usize, seed: u64) -> Vec<TestFunction> {
        let mut out = Vec::new();
        let mut exps = vec![Vec::new()];
        for _ in 0..dim {
            exps = exps
                .into_iter()
                .flat_map(|e: Vec<u32>| {
                    (0..=3u32).map(move |k| {
                        let mut f = e.clone();
                        f.push(k);
                        f
                    })
                })
                .collect();
        }
        for e in exps {
            if e.iter().sum::<u32>() <= 3 {
                out.push(TestFunction::Monomial(e));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..hinges {
            let a = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b = rng.random_range(-1.0..1.0);
            out.push(TestFunction::Hinge { a, b });
        }
        out
    }
}

/// `max_f | int_P f(grad u*(p)) g(p) dp - int f dmu |` over the test
/// functions. `grad u*` is constant on each subgradient cell of `u`, equal to
/// the cell's base point, so each integral is a finite sum.
pub fn pushforward_residual(
    u: &PlConvexFunction,
    g: &Density,
    p: &Polytope,
    mu: &DiscreteMeasure,
    tests: &[TestFunction],
) -> Result<f64> {
    let ma = ma_transported_pl(u, g, p)?;
    Ok(tests
        .iter()
        .map(|f| {
            let lhs = compensated_sum(ma.atoms.iter().map(|(x, m)| m * f.eval(x)));
            (lhs - mu.integrate(|y| f.eval(y))).abs()
        })
        .fold(0.0, f64::max))
}

/// Conjugate of `u` at the atom points, for diagnostics.
pub fn conjugate_values(u: &PlConvexFunction, points: &[Vec<f64>]) -> Vec<f64> {
    let c = legendre_pl(u);
    points.iter().map(|p| c.value(p)).collect()
}
