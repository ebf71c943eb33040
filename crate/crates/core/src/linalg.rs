//! Small dense helpers shared by the geometry and solver code.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Neumaier-compensated sum. Order-dependent only through the input order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Solves the square system `a x = b`, `a` given row-major. `None` if singular
/// to working precision.
pub fn solve(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let m = DMatrix::from_row_slice(n, n, a);
    let scale = m.amax().max(1e-300);
    let lu = m.lu();
    let x = lu.solve(&DVector::from_column_slice(b))?;
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    // reject near-singular systems: check the residual against the matrix scale
    let resid = DMatrix::from_row_slice(n, n, a) * &x - DVector::from_column_slice(b);
    let bnorm = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if resid.amax() > 1e-8 * (scale * x.amax() + bnorm).max(1e-300) {
        return None;
    }
    Some(x.iter().copied().collect())
}

/// Dimension of the affine hull of `points`.
pub fn affine_rank(points: &[Vec<f64>], tol: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let n = points[0].len();
    let rows: Vec<f64> = points[1..].iter().flat_map(|p| sub(p, &points[0])).collect();
    let m = DMatrix::from_row_slice(points.len() - 1, n, &rows);
    let sv = m.singular_values();
    let top = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top.max(1.0)).count()
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    'outer: loop {
        f(&idx);
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                continue 'outer;
            }
        }
        return;
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] (5 points, exact to degree 9).
pub const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_enumerate_all_subsets() {
        let mut seen = Vec::new();
        for_each_combination(5, 3, |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[0], vec![0, 1, 2]);
        assert_eq!(seen[9], vec![2, 3, 4]);
        let mut one = 0;
        for_each_combination(3, 3, |_| one += 1);
        assert_eq!(one, 1);
        let mut none = 0;
        for_each_combination(2, 3, |_| none += 1);
        assert_eq!(none, 0);
    }

    #[test]
    fn gauss5_integrates_degree_nine() {
        let q: f64 = GAUSS5.iter().map(|(x, w)| w * x.powi(8)).sum();
        assert!((q - 2.0 / 9.0).abs() < 1e-15);
        let s: f64 = GAUSS5.iter().map(|(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_system_rejected() {
        assert!(solve(&[1.0, 2.0, 2.0, 4.0], &[1.0, 2.0]).is_none());
        let x = solve(&[2.0, 0.0, 0.0, 4.0], &[1.0, 2.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && (x[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn affine_rank_of_collinear_points() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert_eq!(affine_rank(&pts, 1e-12), 1);
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(affine_rank(&tri, 1e-12), 2);
    }
}
