//! Browser bindings: a Laguerre solve, a 1D Legendre transform and the
//! Delzant check. Inputs and outputs are JSON strings in the CLI file formats.

use serde::Serialize;
use toric_ot::io::{parse_measure, parse_polytope, to_json, DensityJson, SolutionJson};
use toric_ot::polytope::delzant_check_2d;
use toric_ot::{legendre_grid, solve_dual, Grid, SampledFunction, SolverOptions};
use wasm_bindgen::prelude::*;

type Api<T> = Result<T, String>;

/// Solves on the polytope with the given density and target, returning
/// `solution.json`.
pub fn solve(polytope: &str, density: &str, measure: &str) -> Api<String> {
    let p = parse_polytope(polytope).map_err(|e| e.to_string())?;
    let d: DensityJson = serde_json::from_str(density).map_err(|e| format!("density: {e}"))?;
    if matches!(d, DensityJson::Grid { .. }) {
        return Err("grid densities need a file and are not available here".into());
    }
    let g = d.build(&p, std::path::Path::new(".")).map_err(|e| e.to_string())?;
    let mu = parse_measure(measure).map_err(|e| e.to_string())?;
    let s = solve_dual(&p, &g, &mu, &SolverOptions::for_density(&g)).map_err(|e| e.to_string())?;
    to_json(&SolutionJson::from_solution(&s)).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Conjugate {
    p: Vec<f64>,
    value: Vec<Option<f64>>,
}

/// Conjugate of samples `values` on an even grid over `[lo, hi]`, evaluated
/// at `res` slopes spanning `[plo, phi]`. `null` marks `+inf`.
pub fn legendre_1d(lo: f64, hi: f64, values: &[f64], plo: f64, phi: f64, res: usize) -> Api<String> {
    if values.len() < 2 {
        return Err("need at least two samples".into());
    }
    let grid = Grid::spanning(&[lo], &[hi], values.len()).map_err(|e| e.to_string())?;
    let s = SampledFunction::new(grid, values.to_vec()).map_err(|e| e.to_string())?;
    let dual = Grid::spanning(&[plo], &[phi], res).map_err(|e| e.to_string())?;
    let c = legendre_grid(&s, &dual).map_err(|e| e.to_string())?;
    let out = Conjugate {
        p: dual.axis(0),
        value: c.values().iter().map(|v| v.is_finite().then_some(*v)).collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// Delzant report of a polygon given as `polytope.json`.
pub fn delzant(polytope: &str) -> Api<String> {
    let p = parse_polytope(polytope).map_err(|e| e.to_string())?;
    let r = delzant_check_2d(&p).map_err(|e| e.to_string())?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = solveLaguerre)]
pub fn solve_js(polytope: &str, density: &str, measure: &str) -> Result<String, JsError> {
    solve(polytope, density, measure).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = legendre1d)]
pub fn legendre_1d_js(lo: f64, hi: f64, values: Vec<f64>, plo: f64, phi: f64, res: usize) -> Result<String, JsError> {
    legendre_1d(lo, hi, &values, plo, phi, res).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = delzantCheck)]
pub fn delzant_js(polytope: &str) -> Result<String, JsError> {
    delzant(polytope).map_err(|e| JsError::new(&e))
}
