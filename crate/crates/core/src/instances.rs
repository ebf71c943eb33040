//! Bundled example instances with known answers.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::{invalid, Result};
use crate::io::{to_json, DensityJson, PolytopeJson};
use crate::ma::DiscreteMeasure;

pub struct Instance {
    pub name: &'static str,
    pub summary: &'static str,
    pub polytope: Option<PolytopeJson>,
    pub density: Option<DensityJson>,
    pub measure: Option<DiscreteMeasure>,
    pub expected: Option<Value>,
    pub readme: Option<&'static str>,
}

pub const NAMES: [&str; 4] = ["delta-center", "cp1-two-atoms", "linear-density-1d", "singular-source"];

const SINGULAR_README: &str = "\
# singular-source

Source: the Lebesgue measure on the segment {0} x [-1, 1] in the plane.
Target: any measure charging an open set away from the x-axis.

No solve is attempted. A subgradient map defined only on a segment cannot
push a measure living on that segment onto a measure with two-dimensional
support. Writing u for a convex function whose subgradient image is the
segment, u(x, y) = |y| is the only candidate up to constants, and its
transported Monge-Ampère measure is concentrated on the x-axis.

The solver only accepts sources of the form g(p) dp on a polytope with
nonempty interior, so this situation cannot be expressed: a polytope.json
with the segment's vertices is rejected as having empty interior.
";

pub fn instance(name: &str) -> Result<Instance> {
    let vertices = |v: &[&[f64]]| PolytopeJson::Vertices {
        vertices: v.iter().map(|p| p.to_vec()).collect(),
    };
    Ok(match name {
        "delta-center" => Instance {
            name: "delta-center",
            summary: "square [-1,1]^2, uniform density, Dirac mass at the origin; u is the support function",
            polytope: Some(vertices(&[&[-1.0, -1.0], &[1.0, -1.0], &[1.0, 1.0], &[-1.0, 1.0]])),
            density: Some(DensityJson::Uniform),
            measure: Some(DiscreteMeasure::dirac(vec![0.0, 0.0])),
            expected: Some(json!({
                "u": "support function of P",
                "u_pieces": [
                    {"slope": [-1.0, -1.0], "intercept": 0.0},
                    {"slope": [1.0, -1.0], "intercept": 0.0},
                    {"slope": [1.0, 1.0], "intercept": 0.0},
                    {"slope": [-1.0, 1.0], "intercept": 0.0}
                ],
                "weights": [0.0]
            })),
            readme: None,
        },
        "cp1-two-atoms" => Instance {
            name: "cp1-two-atoms",
            summary: "P = [0,1], uniform density, half masses at 0 and 1; breakpoint 1/2",
            polytope: Some(vertices(&[&[0.0], &[1.0]])),
            density: Some(DensityJson::Uniform),
            measure: Some(DiscreteMeasure::probability(vec![(vec![0.0], 0.5), (vec![1.0], 0.5)])?),
            expected: Some(json!({
                "breakpoints": [0.5],
                "weights": [0.0, 0.5],
                "u_at": {"0": 0.0, "1": 0.5}
            })),
            readme: None,
        },
        "linear-density-1d" => Instance {
            name: "linear-density-1d",
            summary: "P = [0,1], density 2p, half masses at 0 and 1; breakpoint 1/sqrt(2)",
            polytope: Some(vertices(&[&[0.0], &[1.0]])),
            density: Some(DensityJson::Polynomial {
                coeffs: BTreeMap::from([("1".to_string(), 2.0)]),
                c: None,
            }),
            measure: Some(DiscreteMeasure::probability(vec![(vec![0.0], 0.5), (vec![1.0], 0.5)])?),
            expected: Some(json!({
                "breakpoints": [std::f64::consts::FRAC_1_SQRT_2],
                "weights": [0.0, std::f64::consts::FRAC_1_SQRT_2]
            })),
            readme: None,
        },
        "singular-source" => Instance {
            name: "singular-source",
            summary: "a measure on a segment as source: no solution exists, documentation only",
            polytope: None,
            density: None,
            measure: None,
            expected: None,
            readme: Some(SINGULAR_README),
        },
        other => return invalid(format!("unknown example {other:?}; available: {}", NAMES.join(", "))),
    })
}

impl Instance {
    /// Writes the instance files into `dir` and returns their paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        let mut put = |file: &str, text: String| -> Result<()> {
            let path = dir.join(file);
            std::fs::write(&path, text)?;
            out.push(path);
            Ok(())
        };
        if let Some(p) = &self.polytope {
            put("polytope.json", to_json(p)?)?;
        }
        if let Some(d) = &self.density {
            put("density.json", to_json(d)?)?;
        }
        if let Some(m) = &self.measure {
            put("measure.json", to_json(m)?)?;
        }
        if let Some(e) = &self.expected {
            put("EXPECTED.json", to_json(e)?)?;
        }
        if let Some(r) = self.readme {
            put("README.md", r.to_string())?;
        }
        Ok(out)
    }
}
