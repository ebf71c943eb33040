mod common;

use proptest::prelude::*;
use toric_ot::convex::{discrete_conjugate_1d, legendre_pl, subgradient_pl, Piece};
use toric_ot::linalg::dot;
use toric_ot::polytope::{clip_halfplane, support_function};
use toric_ot::{
    cell_masses, laguerre_cells, ma_real_pl, mollify, solve_dual, Density, DiscreteMeasure, Grid, PlConvexFunction,
    Polytope, SampledFunction, SolverOptions,
};

fn pieces_2d(max: usize) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, -1.0..1.0f64), 3..max)
}

fn pl(raw: &[(f64, f64, f64)]) -> PlConvexFunction {
    let pieces = raw.iter().map(|&(a, b, c)| Piece::new(vec![a, b], c)).collect();
    PlConvexFunction::new(2, pieces).unwrap()
}

fn polygon_pts() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 4..10)
}

fn hull_polygon(pts: &[(f64, f64)]) -> Option<Polytope> {
    let v: Vec<Vec<f64>> = pts.iter().map(|&(x, y)| vec![x, y]).collect();
    let p = Polytope::from_vertices(&v).ok()?;
    (p.volume() > 0.1).then_some(p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fenchel_young_equality_at_active_pairs(raw in pieces_2d(20), x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let f = pl(&raw);
        let c = legendre_pl(&f);
        let pt = [x, y];
        for p in subgradient_pl(&f, &pt).unwrap().vertices {
            let gap = dot(&pt, &p) - f.value(&pt) - c.value(&p);
            prop_assert!(gap.abs() <= 1e-9, "gap {gap}");
        }
        for v in f.vertices() {
            for p in subgradient_pl(&f, &v.point).unwrap().vertices {
                let gap = dot(&v.point, &p) - v.value - c.value(&p);
                prop_assert!(gap.abs() <= 1e-9 * (1.0 + v.value.abs()), "vertex gap {gap}");
            }
        }
    }

    #[test]
    fn fenchel_young_inequality(raw in pieces_2d(20), x in -3.0..3.0f64, y in -3.0..3.0f64, px in -2.0..2.0f64, py in -2.0..2.0f64) {
        let f = pl(&raw);
        let c = legendre_pl(&f);
        let (pt, p) = ([x, y], [px, py]);
        prop_assert!(f.value(&pt) + c.value(&p) >= dot(&pt, &p) - 1e-9);
    }

    #[test]
    fn conjugation_reverses_order(raw in pieces_2d(12), extra in pieces_2d(6), px in -2.5..2.5f64, py in -2.5..2.5f64) {
        let f = pl(&raw);
        let mut all = raw.clone();
        all.extend(extra);
        let g = pl(&all);
        let p = [px, py];
        let (fs, gs) = (legendre_pl(&f).value(&p), legendre_pl(&g).value(&p));
        prop_assert!(gs <= fs + 1e-9, "g* {gs} > f* {fs}");
    }

    #[test]
    fn subgradient_graph_is_closed(raw in pieces_2d(12), x in -2.0..2.0f64, y in -2.0..2.0f64, dx in -1.0..1.0f64, dy in -1.0..1.0f64) {
        let f = pl(&raw);
        let limit = subgradient_pl(&f, &[x, y]).unwrap();
        for k in 6..=9 {
            let t = 10f64.powi(-k);
            for p in subgradient_pl(&f, &[x + t * dx, y + t * dy]).unwrap().vertices {
                prop_assert!(limit.contains(&p, 1e-7), "{p:?} not in {:?}", limit.vertices);
            }
        }
    }

    #[test]
    fn support_function_is_homogeneous_and_subadditive(pts in polygon_pts(), x in (-5.0..5.0f64, -5.0..5.0f64), y in (-5.0..5.0f64, -5.0..5.0f64), t in 0.0..10.0f64) {
        let Some(p) = hull_polygon(&pts) else { return Ok(()) };
        let (x, y) = ([x.0, x.1], [y.0, y.1]);
        let hx = support_function(&p, &x);
        let tx = [t * x[0], t * x[1]];
        prop_assert!((support_function(&p, &tx) - t * hx).abs() <= 1e-9 * (1.0 + t * hx.abs()));
        let s = [x[0] + y[0], x[1] + y[1]];
        prop_assert!(support_function(&p, &s) <= hx + support_function(&p, &y) + 1e-9);
    }

    #[test]
    fn clip_stays_inside_both_sides(pts in polygon_pts(), nx in -1.0..1.0f64, ny in -1.0..1.0f64, off in -1.0..1.0f64) {
        let Some(p) = hull_polygon(&pts) else { return Ok(()) };
        if nx.abs() + ny.abs() < 1e-3 { return Ok(()) }
        let Some(c) = clip_halfplane(&p, &[nx, ny], off) else { return Ok(()) };
        for v in c.vertices() {
            prop_assert!(nx * v[0] + ny * v[1] - off <= 1e-12 * (1.0 + off.abs()) + 1e-12);
            prop_assert!(p.violation(v) <= 1e-12 * (1.0 + p.diameter()));
        }
        let rest = clip_halfplane(&p, &[-nx, -ny], -off).map_or(0.0, |r| r.volume());
        prop_assert!((c.volume() + rest - p.volume()).abs() <= 1e-10 * p.volume());
    }

    #[test]
    fn laguerre_masses_sum_to_one(
        targets in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..10),
        weights in prop::collection::vec(-1.0..1.0f64, 10),
        c in (-0.3..0.3f64, -0.3..0.3f64),
        hex in any::<bool>(),
    ) {
        let p = if hex { common::hexagon() } else { common::square() };
        let poly = toric_ot::polytope::Polynomial::new(2, vec![(vec![0, 0], 1.0), (vec![1, 0], c.0), (vec![0, 1], c.1)]).unwrap();
        let g = Density::polynomial(&p, poly, None).unwrap();
        let ys: Vec<Vec<f64>> = targets.iter().map(|&(a, b)| vec![a, b]).collect();
        let mut uniq: Vec<Vec<f64>> = Vec::new();
        for y in ys {
            if uniq.iter().all(|u| toric_ot::linalg::dist(u, &y) > 1e-6) { uniq.push(y) }
        }
        let d = laguerre_cells(&p, &uniq, &weights[..uniq.len()]).unwrap();
        let total: f64 = cell_masses(&d, &g).iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-10, "total {total}");
        let area: f64 = d.cells().iter().filter_map(|c| c.polytope()).map(|c| c.volume()).sum();
        prop_assert!((area - p.volume()).abs() <= 1e-10 * p.volume());
    }

    #[test]
    fn llt_matches_brute_force(
        fs in prop::collection::vec(-1.0..1.0f64, 5..40),
        curv in 0.0..2.0f64,
        ps in prop::collection::vec(-5.0..5.0f64, 1..30),
    ) {
        let n = fs.len();
        let xs: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        // a convex sample: quadratic plus a sorted-increment perturbation
        let mut incs: Vec<f64> = fs[1..].to_vec();
        incs.sort_by(f64::total_cmp);
        let mut vals = vec![curv * xs[0] * xs[0]];
        for (i, d) in incs.iter().enumerate() {
            let v = vals[i] + d * (xs[i + 1] - xs[i]) + curv * (xs[i + 1] * xs[i + 1] - xs[i] * xs[i]);
            vals.push(v);
        }
        let mut sorted = ps.clone();
        sorted.sort_by(f64::total_cmp);
        let fast = discrete_conjugate_1d(&xs, &vals, &sorted);
        for (p, got) in sorted.iter().zip(&fast) {
            let brute = xs.iter().zip(&vals).map(|(x, v)| p * x - v).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((got - brute).abs() <= 1e-12 * (1.0 + brute.abs()), "p {p}: {got} vs {brute}");
        }
    }

    #[test]
    fn redundant_piece_leaves_ma_unchanged(raw in pieces_2d(10), shift in 0.1..2.0f64, pick in 0usize..100) {
        let f = pl(&raw);
        let base = &f.pieces()[pick % f.pieces().len()];
        let mut with = raw.clone();
        with.push((base.slope[0], base.slope[1], base.intercept - shift));
        let (a, b) = (ma_real_pl(&f).unwrap(), ma_real_pl(&pl(&with)).unwrap());
        prop_assert_eq!(a.atoms.len(), b.atoms.len());
        for ((xa, ma), (xb, mb)) in a.atoms.iter().zip(&b.atoms) {
            prop_assert!(toric_ot::linalg::dist(xa, xb) <= 1e-9);
            prop_assert!((ma - mb).abs() <= 1e-10);
        }
    }

    #[test]
    fn mollify_preserves_convexity(a in 0.1..2.0f64, b in -1.0..1.0f64, c in -1.0..1.0f64, eps in 0.05..0.3f64) {
        let grid = Grid::cube(2, 1.0, 41).unwrap();
        let s = SampledFunction::from_fn(grid, |x| a * x[0] * x[0] + (b * x[0] + c * x[1]).abs() + x[1].abs()).unwrap();
        let m = mollify(&s, eps).unwrap();
        prop_assert!(m.convexity_violation(1e-8).is_none());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solution_is_invariant_under_atom_order(seed in 0u64..1000, rot in 1usize..6) {
        let mut r = common::rng(seed);
        let p = common::square();
        let g = Density::uniform(&p).unwrap();
        let mu = common::random_measure(&mut r, 2, 6, 1.5);
        let atoms: Vec<(Vec<f64>, f64)> = mu.points().iter().cloned().zip(mu.masses().iter().copied()).collect();
        let mut turned = atoms.clone();
        turned.rotate_left(rot % atoms.len());
        let nu = DiscreteMeasure::probability(turned).unwrap();
        let opts = SolverOptions::default();
        let (a, b) = (solve_dual(&p, &g, &mu, &opts).unwrap(), solve_dual(&p, &g, &nu, &opts).unwrap());
        for x in common::grid_points(2, 3.0, 21) {
            prop_assert!((a.u.value(&x) - b.u.value(&x)).abs() <= 1e-8);
        }
    }
}
