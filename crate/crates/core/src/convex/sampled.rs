use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, Error, Result};

/// Discrete convexity tolerance for per-axis midpoint checks.
pub const TOL_CONVEX: f64 = 1e-8;

/// Uniform rectangular grid. Nodes are stored row-major with the last axis
/// varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    counts: Vec<usize>,
}

impl Grid {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let n = origin.len();
        if n == 0 || spacing.len() != n || counts.len() != n {
            return invalid("grid origin, spacing and counts must share a positive dimension");
        }
        if spacing.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return invalid("grid spacing must be positive on every axis");
        }
        if counts.iter().any(|&c| c == 0) {
            return invalid("grid counts must be positive");
        }
        Ok(Self {
            origin,
            spacing,
            counts,
        })
    }

    /// Grid with `res` nodes per axis spanning `[lo_k, hi_k]`.
    pub fn spanning(lo: &[f64], hi: &[f64], res: usize) -> Result<Self> {
        if res < 2 {
            return invalid("need at least two nodes per axis");
        }
        let spacing = lo.iter().zip(hi).map(|(a, b)| (b - a) / (res - 1) as f64).collect();
        Self::new(lo.to_vec(), spacing, vec![res; lo.len()])
    }

    /// Cube `[-r, r]^dim` with `res` nodes per axis.
    pub fn cube(dim: usize, r: f64, res: usize) -> Result<Self> {
        Self::spanning(&vec![-r; dim], &vec![r; dim], res)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }
    pub fn origin(&self) -> &[f64] {
        &self.origin
    }
    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }
    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis(&self, k: usize) -> Vec<f64> {
        (0..self.counts[k])
            .map(|i| self.origin[k] + i as f64 * self.spacing[k])
            .collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|k| self.origin[k] + (self.counts[k] - 1) as f64 * self.spacing[k])
            .collect()
    }

    pub fn strides(&self) -> Vec<usize> {
        let n = self.dim();
        let mut s = vec![1; n];
        for k in (0..n.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.counts[k + 1];
        }
        s
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            idx[k] = flat % self.counts[k];
            flat /= self.counts[k];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(k, &i)| self.origin[k] + i as f64 * self.spacing[k])
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }
}

/// Values on a [`Grid`], with `+inf` marking nodes outside the effective domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
    convex: bool,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!(
                "expected {} values for the grid, got {}",
                grid.len(),
                values.len()
            ));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return invalid("sampled values must be finite or +inf");
        }
        Ok(Self {
            grid,
            values,
            convex: false,
        })
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = grid.points().map(|p| f(&p)).collect();
        Self::new(grid, values)
    }

    /// Tags the sample as convex after a per-axis midpoint check.
    pub fn tagged_convex(mut self) -> Result<Self> {
        if let Some(msg) = self.convexity_violation(TOL_CONVEX) {
            return Err(Error::NonConvex(msg));
        }
        self.convex = true;
        Ok(self)
    }

    pub fn is_tagged_convex(&self) -> bool {
        self.convex
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Describes the first per-axis midpoint convexity failure, if any. The
    /// tolerance is relative to the magnitude of the three values involved.
    pub fn convexity_violation(&self, tol: f64) -> Option<String> {
        let strides = self.grid.strides();
        for flat in 0..self.values.len() {
            let idx = self.grid.multi_index(flat);
            for k in 0..self.dim() {
                if idx[k] == 0 || idx[k] + 1 >= self.grid.counts[k] {
                    continue;
                }
                let (a, b, c) = (
                    self.values[flat - strides[k]],
                    self.values[flat],
                    self.values[flat + strides[k]],
                );
                if b.is_infinite() {
                    // inside the effective domain the finite nodes must be convex;
                    // an infinite node between two finite ones breaks convexity
                    if a.is_finite() && c.is_finite() {
                        return Some(format!("+inf between finite nodes at {idx:?}"));
                    }
                    continue;
                }
                if a.is_infinite() || c.is_infinite() {
                    continue;
                }
                let scale = 1.0 + a.abs().max(b.abs()).max(c.abs());
                if a + c - 2.0 * b < -tol * scale {
                    return Some(format!(
                        "second difference {:e} along axis {k} at {idx:?}",
                        a + c - 2.0 * b
                    ));
                }
            }
        }
        None
    }

    /// Multilinear interpolation; `+inf` outside the grid box or if any corner
    /// is infinite.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0; n];
        for k in 0..n {
            let t = (x[k] - self.grid.origin[k]) / self.grid.spacing[k];
            let last = (self.grid.counts[k] - 1) as f64;
            if t < -1e-12 || t > last + 1e-12 {
                return f64::INFINITY;
            }
            let t = t.clamp(0.0, last);
            let i = (t.floor() as usize).min(self.grid.counts[k].saturating_sub(2));
            base[k] = i;
            frac[k] = if self.grid.counts[k] == 1 { 0.0 } else { t - i as f64 };
        }
        let strides = self.grid.strides();
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut flat = 0;
            for k in 0..n {
                let bit = (corner >> k) & 1;
                if bit == 1 && self.grid.counts[k] == 1 {
                    w = 0.0;
                    break;
                }
                w *= if bit == 1 { frac[k] } else { 1.0 - frac[k] };
                flat += (base[k] + bit) * strides[k];
            }
            if w == 0.0 {
                continue;
            }
            let v = self.values[flat];
            if v.is_infinite() {
                return f64::INFINITY;
            }
            acc += w * v;
        }
        acc
    }

    /// Central-difference gradient at a node using a step of `step` nodes.
    /// `None` near the boundary or when a stencil value is infinite.
    pub fn central_gradient(&self, flat: usize, step: usize) -> Option<Vec<f64>> {
        let idx = self.grid.multi_index(flat);
        let strides = self.grid.strides();
        let mut g = Vec::with_capacity(self.dim());
        for k in 0..self.dim() {
            if idx[k] < step || idx[k] + step >= self.grid.counts[k] {
                return None;
            }
            let a = self.values[flat - step * strides[k]];
            let b = self.values[flat + step * strides[k]];
            if !a.is_finite() || !b.is_finite() {
                return None;
            }
            g.push((b - a) / (2.0 * step as f64 * self.grid.spacing[k]));
        }
        Some(g)
    }

    /// Pointwise combination on a shared grid.
    pub fn zip_with(&self, other: &SampledFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return invalid("sampled functions live on different grids");
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn map(&self, f: impl Fn(&[f64], f64) -> f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(&self.grid.point(i), v))
            .collect();
        Self::new(self.grid.clone(), values)
    }

    /// CSV with header `x1,...,xn,value`, one row per node, `inf` for `+inf`.
    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut s = String::new();
        let header: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
        let _ = writeln!(s, "{},value", header.join(","));
        for (i, v) in self.values.iter().enumerate() {
            for c in self.grid.point(i) {
                let _ = write!(s, "{},", fmt17(c));
            }
            if v.is_infinite() {
                let _ = writeln!(s, "inf");
            } else {
                let _ = writeln!(s, "{}", fmt17(*v));
            }
        }
        s
    }

    /// Parses the CSV format of [`SampledFunction::to_csv`]. Rows may come in
    /// any order; the grid is inferred from the distinct coordinates.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 2 || cols.last() != Some(&"value") {
            return Err(Error::Parse("CSV header must be x1,...,xn,value".into()));
        }
        let n = cols.len() - 1;
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        for (ln, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != n + 1 {
                return Err(Error::Parse(format!("row {} has {} fields", ln + 2, fields.len())));
            }
            let parse = |s: &str| -> Result<f64> {
                match s {
                    "inf" | "+inf" | "Infinity" => Ok(f64::INFINITY),
                    _ => s
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("row {}: {e}", ln + 2))),
                }
            };
            let coords = fields[..n].iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
            rows.push((coords, parse(fields[n])?));
        }
        let mut origin = Vec::with_capacity(n);
        let mut spacing = Vec::with_capacity(n);
        let mut counts = Vec::with_capacity(n);
        for k in 0..n {
            let mut axis: Vec<f64> = rows.iter().map(|r| r.0[k]).collect();
            axis.sort_by(f64::total_cmp);
            axis.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
            let h = if axis.len() > 1 {
                (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64
            } else {
                1.0
            };
            origin.push(axis[0]);
            spacing.push(h);
            counts.push(axis.len());
        }
        let grid = Grid::new(origin, spacing, counts)?;
        if rows.len() != grid.len() {
            return Err(Error::Parse(format!(
                "{} rows do not fill a {:?} grid",
                rows.len(),
                grid.counts()
            )));
        }
        let mut values = vec![f64::NAN; grid.len()];
        for (coords, v) in rows {
            let mut idx = Vec::with_capacity(n);
            for k in 0..n {
                let t = (coords[k] - grid.origin[k]) / grid.spacing[k];
                let i = t.round();
                if (t - i).abs() > 1e-6 {
                    return Err(Error::Parse("grid coordinates are not uniformly spaced".into()));
                }
                idx.push(i as usize);
            }
            values[grid.flat_index(&idx)] = v;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse("duplicate grid rows".into()));
        }
        Self::new(grid, values)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// 17 significant digits, the fixed float format of every artifact.
pub fn fmt17(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{v:.16e}")
}
