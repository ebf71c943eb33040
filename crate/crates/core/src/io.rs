//! JSON and CSV file formats. Floats are written with 17 significant digits
//! so that output is byte-reproducible and round-trips exactly.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::convex::{Halfspace, Piece, PlConvexFunction, SampledFunction};
use crate::error::{invalid, Error, Result};
use crate::ma::{DiscreteMeasure, MaResult};
use crate::ot::Solution;
use crate::polytope::{Density, Polynomial, Polytope};

/// Pretty JSON with every float in `%.16e` form.
struct Fixed17<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        // no negative zero
        let v = if v == 0.0 { 0.0 } else { v };
        write!(w, "{v:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> std::io::Result<()> {
        self.write_f64(w, f64::from(v))
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| Error::Parse(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalfspaceJson {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolytopeJson {
    Vertices { vertices: Vec<Vec<f64>> },
    Halfspaces { halfspaces: Vec<HalfspaceJson> },
}

impl PolytopeJson {
    pub fn build(&self) -> Result<Polytope> {
        match self {
            PolytopeJson::Vertices { vertices } => Polytope::from_vertices(vertices),
            PolytopeJson::Halfspaces { halfspaces } => Polytope::from_halfspaces(
                &halfspaces
                    .iter()
                    .map(|h| Halfspace::new(h.normal.clone(), h.offset))
                    .collect::<Vec<_>>(),
            ),
        }
    }

    pub fn from_polytope(p: &Polytope) -> Self {
        PolytopeJson::Vertices {
            vertices: p.vertices().to_vec(),
        }
    }
}

pub fn parse_polytope(text: &str) -> Result<Polytope> {
    let j: PolytopeJson = serde_json::from_str(text).map_err(|e| Error::Parse(format!("polytope: {e}")))?;
    j.build()
}

pub fn read_polytope(path: &Path) -> Result<Polytope> {
    read_json::<PolytopeJson>(path)?.build()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DensityJson {
    Uniform,
    Polynomial {
        coeffs: BTreeMap<String, f64>,
        #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
    },
    Grid {
        file: String,
        #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
    },
}

impl DensityJson {
    /// Builds the density on `p`; grid files are resolved against `base_dir`.
    pub fn build(&self, p: &Polytope, base_dir: &Path) -> Result<Density> {
        match self {
            DensityJson::Uniform => Density::uniform(p),
            DensityJson::Polynomial { coeffs, c } => {
                Density::polynomial(p, Polynomial::from_keyed(p.dim(), coeffs)?, *c)
            }
            DensityJson::Grid { file, c } => {
                let s = SampledFunction::read_csv(&base_dir.join(file))?;
                Density::grid(p, s, *c)
            }
        }
    }
}

pub fn read_density(path: &Path, p: &Polytope) -> Result<Density> {
    let j: DensityJson = read_json(path)?;
    j.build(p, path.parent().unwrap_or(Path::new(".")))
}

/// Reads `measure.json`. Totals within `1e-9` of one are renormalised exactly.
pub fn read_measure(path: &Path) -> Result<DiscreteMeasure> {
    let m: DiscreteMeasure = read_json(path)?;
    if (m.total_mass() - 1.0).abs() <= 1e-9 {
        let atoms = m.points().iter().cloned().zip(m.masses().iter().copied()).collect();
        return DiscreteMeasure::probability(atoms);
    }
    Ok(m)
}

pub fn parse_measure(text: &str) -> Result<DiscreteMeasure> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("measure: {e}")))
}

pub fn read_pl(path: &Path) -> Result<PlConvexFunction> {
    read_json(path)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceJson {
    pub slope: Vec<f64>,
    pub intercept: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsJson {
    pub iters: usize,
    pub residual: f64,
    #[serde(default)]
    pub damping_events: usize,
    #[serde(default)]
    pub gradient_steps: usize,
    #[serde(default)]
    pub mass_drift: f64,
    #[serde(default)]
    pub dual_values: Vec<f64>,
}

/// `solution.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionJson {
    pub weights: Vec<f64>,
    pub targets: Vec<Vec<f64>>,
    pub masses: Vec<f64>,
    pub cells: Vec<Vec<Vec<f64>>>,
    pub u_pieces: Vec<PieceJson>,
    pub diagnostics: DiagnosticsJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SolutionJson {
    pub fn from_solution(s: &Solution) -> Self {
        let d = &s.diagnostics;
        Self {
            weights: s.weights.clone(),
            targets: s.targets.clone(),
            masses: s.masses.clone(),
            cells: s.diagram.cells().iter().map(|c| c.vertices()).collect(),
            u_pieces: s
                .u
                .pieces()
                .iter()
                .map(|p| PieceJson {
                    slope: p.slope.clone(),
                    intercept: p.intercept,
                })
                .collect(),
            diagnostics: DiagnosticsJson {
                iters: d.iterations,
                residual: d.residual,
                damping_events: d.damping_events,
                gradient_steps: d.gradient_steps,
                mass_drift: d.mass_drift,
                dual_values: d.dual_values.clone(),
            },
            seed: None,
        }
    }

    pub fn u(&self) -> Result<PlConvexFunction> {
        let dim = match self.u_pieces.first() {
            Some(p) => p.slope.len(),
            None => return invalid("solution has no pieces"),
        };
        PlConvexFunction::new(
            dim,
            self.u_pieces
                .iter()
                .map(|p| Piece::new(p.slope.clone(), p.intercept))
                .collect(),
        )
    }

    pub fn measure(&self) -> Result<DiscreteMeasure> {
        let total: f64 = self.masses.iter().sum();
        DiscreteMeasure::new(
            self.targets
                .iter()
                .cloned()
                .zip(self.masses.iter().map(|m| m / total))
                .collect(),
        )
    }
}

pub fn read_solution(path: &Path) -> Result<SolutionJson> {
    read_json(path)
}

#[derive(Debug, Clone, Serialize)]
pub struct AtomJson {
    pub point: Vec<f64>,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaResultJson {
    pub atoms: Vec<AtomJson>,
    pub cells: Vec<Vec<Vec<f64>>>,
}

impl From<&MaResult> for MaResultJson {
    fn from(r: &MaResult) -> Self {
        Self {
            atoms: r
                .atoms
                .iter()
                .map(|(point, mass)| AtomJson {
                    point: point.clone(),
                    mass: *mass,
                })
                .collect(),
            cells: r.cells.iter().map(|c| c.vertices().to_vec()).collect(),
        }
    }
}

/// Samples `f` on a cube grid and writes the CSV.
pub fn write_sampled(path: &Path, s: &SampledFunction) -> Result<()> {
    std::fs::write(path, s.to_csv())?;
    Ok(())
}

pub fn require_dim(p: &Polytope, dim: usize, what: &str) -> Result<()> {
    if p.dim() != dim {
        return invalid(format!("{what} needs a {dim}-dimensional polytope, got {}", p.dim()));
    }
    Ok(())
}
