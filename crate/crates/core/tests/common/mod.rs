#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_ot::convex::Piece;
use toric_ot::polytope::Polynomial;
use toric_ot::{Density, DiscreteMeasure, PlConvexFunction, Polytope};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn square() -> Polytope {
    Polytope::boxed(&[-1.0, -1.0], &[1.0, 1.0]).unwrap()
}

pub fn hexagon() -> Polytope {
    let pts: Vec<[f64; 2]> = (0..6)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 3.0;
            [t.cos(), t.sin()]
        })
        .collect();
    Polytope::polygon(&pts).unwrap()
}

pub fn random_measure(r: &mut ChaCha8Rng, dim: usize, count: usize, spread: f64) -> DiscreteMeasure {
    let mut atoms: Vec<(Vec<f64>, f64)> = Vec::new();
    while atoms.len() < count {
        let y: Vec<f64> = (0..dim).map(|_| r.random_range(-spread..spread)).collect();
        if atoms.iter().all(|(z, _)| toric_ot::linalg::dist(z, &y) > 1e-3) {
            atoms.push((y, r.random_range(0.2..1.0)));
        }
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    DiscreteMeasure::probability(atoms.into_iter().map(|(y, m)| (y, m / total)).collect()).unwrap()
}

/// 1D density: 0 uniform, 1 linear, 2 quadratic; strictly positive on `[a, b]`.
pub fn density_1d(r: &mut ChaCha8Rng, p: &Polytope, kind: usize) -> Density {
    let (a, b) = p.interval_bounds().unwrap();
    match kind {
        0 => Density::uniform(p).unwrap(),
        1 => {
            // 1 + t (x - a) / (b - a), t in (-0.9, 2)
            let t = r.random_range(-0.9..2.0);
            let poly = Polynomial::new(1, vec![(vec![0], 1.0 - t * a / (b - a)), (vec![1], t / (b - a))]).unwrap();
            Density::polynomial(p, poly, None).unwrap()
        }
        _ => {
            // 0.2 + ((x - m) / L)^2
            let m = r.random_range(a..b);
            let l = b - a;
            let poly = Polynomial::new(
                1,
                vec![
                    (vec![0], 0.2 + m * m / (l * l)),
                    (vec![1], -2.0 * m / (l * l)),
                    (vec![2], 1.0 / (l * l)),
                ],
            )
            .unwrap();
            Density::polynomial(p, poly, None).unwrap()
        }
    }
}

/// 2D density on `p`: uniform or `1 + c1 x + c2 y + c3 x y` (positive on the unit disc box).
pub fn density_2d(r: &mut ChaCha8Rng, p: &Polytope) -> Density {
    if r.random_bool(0.5) {
        return Density::uniform(p).unwrap();
    }
    let c: Vec<f64> = (0..3).map(|_| r.random_range(-0.3..0.3)).collect();
    let poly = Polynomial::new(
        2,
        vec![
            (vec![0, 0], 1.0),
            (vec![1, 0], c[0]),
            (vec![0, 1], c[1]),
            (vec![1, 1], c[2]),
        ],
    )
    .unwrap();
    Density::polynomial(p, poly, None).unwrap()
}

pub fn random_pl(r: &mut ChaCha8Rng, dim: usize, max_pieces: usize) -> PlConvexFunction {
    let n = r.random_range(dim + 1..=max_pieces);
    let pieces = (0..n)
        .map(|_| {
            Piece::new(
                (0..dim).map(|_| r.random_range(-2.0..2.0)).collect(),
                r.random_range(-1.0..1.0),
            )
        })
        .collect();
    PlConvexFunction::new(dim, pieces).unwrap()
}

/// Cube grid points of radius `r`, `res` per axis.
pub fn grid_points(dim: usize, r: f64, res: usize) -> Vec<Vec<f64>> {
    toric_ot::Grid::cube(dim, r, res).unwrap().points().collect()
}
