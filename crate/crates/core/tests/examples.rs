//! Worked examples with closed-form answers, one group per module.

mod common;

use common::square;
use toric_ot::convergence::{check_ae_gradient_uniqueness, make_decreasing_sequence};
use toric_ot::convex::{legendre_grid, subgradient_pl, Piece};
use toric_ot::ot::{solution_u, Cell};
use toric_ot::polytope::{clip_halfplane, delzant_check_2d, sample, support_function, Polynomial};
use toric_ot::toric::{
    class_membership, complex_real_factor_check, moment_image_check, moment_map, MomentValue, SmoothPotential, Verdict,
};
use toric_ot::{
    biconjugate_check, cell_masses, laguerre_cells, legendre_pl, ma_real_pl, ma_transported_pl, mollify, oracle_1d,
    pushforward_residual, solve_dual, uniqueness_probe, Density, DiscreteMeasure, Error, Grid, PlConvexFunction,
    Polytope, SampledFunction, SolverOptions, TestFunction,
};

fn pl1(pieces: &[(f64, f64)]) -> PlConvexFunction {
    PlConvexFunction::new(1, pieces.iter().map(|&(a, b)| Piece::new(vec![a], b)).collect()).unwrap()
}

fn abs1() -> PlConvexFunction {
    pl1(&[(1.0, 0.0), (-1.0, 0.0)])
}

fn phi_square() -> PlConvexFunction {
    PlConvexFunction::support_function(square().vertices()).unwrap()
}

fn unit() -> Polytope {
    Polytope::interval(0.0, 1.0).unwrap()
}

fn linear_density() -> Density {
    Density::polynomial(&unit(), Polynomial::new(1, vec![(vec![1], 2.0)]).unwrap(), None).unwrap()
}

fn halves() -> DiscreteMeasure {
    DiscreteMeasure::probability(vec![(vec![0.0], 0.5), (vec![1.0], 0.5)]).unwrap()
}

// convex_core

#[test]
fn pl_evaluation() {
    assert_eq!(abs1().evaluate(&[3.0]).unwrap(), 3.0);
    assert_eq!(pl1(&[(0.0, 2.5)]).evaluate(&[-7.0]).unwrap(), 2.5);
    assert_eq!(phi_square().evaluate(&[1.0, 0.0]).unwrap(), 1.0);
}

#[test]
fn exact_conjugates() {
    let c = legendre_pl(&abs1());
    for p in [-1.0, -0.3, 0.0, 1.0] {
        assert!(c.value(&[p]).abs() < 1e-12);
    }
    assert_eq!(c.value(&[1.5]), f64::INFINITY);

    let c = legendre_pl(&phi_square());
    assert!(c.value(&[0.2, -0.9]).abs() < 1e-12);
    assert_eq!(c.value(&[1.2, 0.0]), f64::INFINITY);

    // max(0, x - 1): the sup over x gives p on [0, 1]
    let c = legendre_pl(&pl1(&[(0.0, 0.0), (1.0, -1.0)]));
    for p in [0.0, 0.25, 0.5, 1.0] {
        let brute = (-4000..=4000)
            .map(|k| k as f64 * 1e-3)
            .map(|x| p * x - (x - 1.0f64).max(0.0))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((c.value(&[p]) - p).abs() < 1e-12);
        assert!((brute - p).abs() < 1e-9);
    }
}

#[test]
fn grid_conjugates() {
    let grid = Grid::spanning(&[-5.0], &[5.0], 1001).unwrap();
    let dual = Grid::spanning(&[-4.0], &[4.0], 81).unwrap();
    let h = 0.01;

    let s = SampledFunction::from_fn(grid.clone(), |x| 0.5 * x[0] * x[0]).unwrap();
    let c = legendre_grid(&s, &dual).unwrap();
    for (p, v) in dual.points().zip(c.values()) {
        assert!((v - 0.5 * p[0] * p[0]).abs() <= h * h, "{p:?}: {v}");
    }

    let s = SampledFunction::from_fn(grid.clone(), |x| x[0].abs()).unwrap();
    let c = legendre_grid(&s, &Grid::spanning(&[-1.0], &[1.0], 21).unwrap()).unwrap();
    assert!(c.values().iter().all(|v| v.abs() < 1e-12));

    let s = SampledFunction::from_fn(grid, |x| x[0].max(0.0)).unwrap();
    let dual = Grid::spanning(&[-0.5], &[1.5], 41).unwrap();
    let c = legendre_grid(&s, &dual).unwrap();
    for (p, v) in dual.points().zip(c.values()) {
        if (0.0..=1.0).contains(&p[0]) {
            assert!(v.abs() < 1e-12);
        } else {
            assert_eq!(*v, f64::INFINITY);
        }
    }
}

#[test]
fn grid_conjugates_2d() {
    let grid = Grid::cube(2, 3.0, 121).unwrap();
    let dual = Grid::cube(2, 2.0, 41).unwrap();
    let s = SampledFunction::from_fn(grid.clone(), |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
    let c = legendre_grid(&s, &dual).unwrap();
    let h: f64 = 0.05;
    for (p, v) in dual.points().zip(c.values()) {
        assert!((v - 0.5 * (p[0] * p[0] + p[1] * p[1])).abs() <= h * h);
    }

    let f = phi_square();
    let s = SampledFunction::from_fn(grid.clone(), |x| f.value(x)).unwrap();
    let dual = Grid::cube(2, 1.5, 31).unwrap();
    let c = legendre_grid(&s, &dual).unwrap();
    for (p, v) in dual.points().zip(c.values()) {
        if p.iter().all(|x| x.abs() <= 1.0) {
            assert!(v.abs() < 1e-12);
        } else {
            assert_eq!(*v, f64::INFINITY);
        }
    }

    // a random PL sample against the exact conjugate; the grid holds every vertex
    let mut r = common::rng(5);
    for _ in 0..5 {
        let f = common::random_pl(&mut r, 2, 8);
        let reach = f
            .vertices()
            .iter()
            .flat_map(|v| v.point.clone())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if reach > 2.5 {
            continue;
        }
        let s = SampledFunction::from_fn(Grid::cube(2, 3.0, 121).unwrap(), |x| f.value(x)).unwrap();
        let exact = legendre_pl(&f);
        let dual = Grid::cube(2, 2.0, 21).unwrap();
        let c = legendre_grid(&s, &dual).unwrap();
        for (p, v) in dual.points().zip(c.values()) {
            let e = exact.value(&p);
            if e.is_finite() && v.is_finite() {
                // the sample's conjugate is below the exact one and misses at most the vertex offsets
                assert!(*v <= e + 1e-9);
                assert!(e - v <= 0.05 * 4.0 * 2.0, "{p:?}: {v} vs {e}");
            }
        }
    }
}

#[test]
fn subgradients() {
    let s = subgradient_pl(&abs1(), &[0.0]).unwrap();
    assert!(s.contains(&[-1.0], 1e-12) && s.contains(&[1.0], 1e-12) && !s.contains(&[1.1], 1e-12));
    assert_eq!(subgradient_pl(&abs1(), &[2.0]).unwrap().vertices, vec![vec![1.0]]);
    let s = subgradient_pl(&phi_square(), &[0.0, 0.0]).unwrap();
    assert!((s.volume() - 4.0).abs() < 1e-12);
}

#[test]
fn mollifier_examples() {
    let grid = Grid::spanning(&[-1.0], &[1.0], 401).unwrap();
    let c = mollify(&SampledFunction::from_fn(grid.clone(), |_| 3.0).unwrap(), 0.1).unwrap();
    assert!(c
        .values()
        .iter()
        .filter(|v| v.is_finite())
        .all(|v| (v - 3.0).abs() < 1e-12));

    let l = mollify(&SampledFunction::from_fn(grid.clone(), |x| 2.0 * x[0]).unwrap(), 0.1).unwrap();
    for (x, v) in l.grid().points().zip(l.values()) {
        if v.is_finite() {
            assert!((v - 2.0 * x[0]).abs() < 1e-12);
        }
    }

    let a = mollify(&SampledFunction::from_fn(grid, |x| x[0].abs()).unwrap(), 0.1).unwrap();
    for (x, v) in a.grid().points().zip(a.values()) {
        if v.is_finite() && x[0].abs() >= 0.1 + 1e-9 {
            assert!((v - x[0].abs()).abs() < 1e-12);
        }
    }
    let at0 = a.interpolate(&[0.0]);
    assert!(at0 > 0.0 && at0 < 0.1);
    assert!(a.convexity_violation(1e-8).is_none());
}

#[test]
fn biconjugates() {
    assert!(biconjugate_check(&abs1()) < 1e-12);
    assert!(biconjugate_check(&phi_square()) < 1e-12);
    let mut r = common::rng(20);
    for _ in 0..10 {
        let f = common::random_pl(&mut r, 2, 21);
        assert!(biconjugate_check(&f) <= 1e-9);
    }
}

// polytope

#[test]
fn support_functions() {
    assert_eq!(support_function(&square(), &[1.0, 0.0]), 1.0);
    assert_eq!(support_function(&unit(), &[-3.0]), 0.0);
    let tri = Polytope::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
    assert_eq!(support_function(&tri, &[1.0, 1.0]), 1.0);
}

#[test]
fn clipping() {
    let left = clip_halfplane(&square(), &[1.0, 0.0], 0.0).unwrap();
    assert!((left.volume() - 2.0).abs() < 1e-12);
    assert_eq!(left.bounding_box(), (vec![-1.0, -1.0], vec![0.0, 1.0]));
    assert!((clip_halfplane(&square(), &[1.0, 0.0], 2.0).unwrap().volume() - 4.0).abs() < 1e-12);
    assert!(clip_halfplane(&square(), &[1.0, 0.0], -2.0).is_none());
}

#[test]
fn density_masses() {
    let g = Density::uniform(&square()).unwrap();
    let left = [[-1.0, -1.0], [0.0, -1.0], [0.0, 1.0], [-1.0, 1.0]];
    assert!((g.integrate_polygon(&left, |_| 1.0) - 0.5).abs() < 1e-14);

    assert!((linear_density().integrate_interval(0.0, 0.5, |_| 1.0) - 0.25).abs() < 1e-14);

    let tri = Polytope::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
    let plus = Polynomial::new(2, vec![(vec![1, 0], 1.0), (vec![0, 1], 1.0)]).unwrap();
    let raw = plus.clone();
    let g = Density::polynomial(&tri, plus, None).unwrap();
    // the normalising constant of p1 + p2 on the triangle is 1/3
    let mass = g.integrate_polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], |p| 1.0 / raw.eval(p));
    assert!((g.mass(&tri) - 1.0).abs() < 1e-12);
    assert!((1.0 / mass * 0.5 - 1.0 / 3.0).abs() < 1e-12, "{mass}");
    // cross-check by Monte Carlo
    let pts = sample(&tri, &Density::uniform(&tri).unwrap(), 200_000, 3);
    let mc = 0.5 * pts.iter().map(|p| p[0] + p[1]).sum::<f64>() / pts.len() as f64;
    assert!((mc - 1.0 / 3.0).abs() < 3e-3, "{mc}");
}

#[test]
fn delzant_examples() {
    assert!(
        delzant_check_2d(&Polytope::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap())
            .unwrap()
            .delzant
    );
    assert!(
        delzant_check_2d(&Polytope::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap())
            .unwrap()
            .delzant
    );
    let r = delzant_check_2d(&Polytope::polygon(&[[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]]).unwrap()).unwrap();
    assert!(!r.delzant);
}

#[test]
fn rejection_sampling() {
    let p = square();
    let pts = sample(&p, &Density::uniform(&p).unwrap(), 100_000, 11);
    let sigma = (1.0f64 / 3.0 / 100_000.0).sqrt();
    for k in 0..2 {
        let mean = pts.iter().map(|x| x[k]).sum::<f64>() / pts.len() as f64;
        assert!(mean.abs() <= 3.0 * sigma, "{mean}");
    }
    let one = sample(&p, &Density::uniform(&p).unwrap(), 1, 0);
    assert_eq!(one.len(), 1);
    assert!(p.contains(&one[0], 0.0));
}

// ma_measure

#[test]
fn real_ma_examples() {
    let m = ma_real_pl(&phi_square()).unwrap();
    assert_eq!(m.atoms.len(), 1);
    assert!(m.atoms[0].0.iter().all(|v| v.abs() < 1e-12));
    assert!((m.atoms[0].1 - 4.0).abs() < 1e-12);

    let m = ma_real_pl(&abs1()).unwrap();
    assert_eq!(m.atoms, vec![(vec![0.0], 2.0)]);

    let m = ma_real_pl(&pl1(&[(0.0, 0.0), (1.0, -1.0), (-1.0, -1.0)])).unwrap();
    let mut atoms = m.atoms.clone();
    atoms.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]));
    assert_eq!(atoms, vec![(vec![-1.0], 1.0), (vec![1.0], 1.0)]);
}

#[test]
fn transported_ma_examples() {
    let g = Density::uniform(&square()).unwrap();
    let m = ma_transported_pl(&phi_square(), &g, &square()).unwrap();
    assert_eq!(m.atoms.len(), 1);
    assert!((m.atoms[0].1 - 1.0).abs() < 1e-12);

    // slopes {0, 1} switching at 1/2
    let f = pl1(&[(0.0, 0.0), (1.0, -0.5)]);
    let m = ma_transported_pl(&f, &linear_density(), &unit()).unwrap();
    assert_eq!(m.atoms.len(), 1);
    assert!((m.atoms[0].0[0] - 0.5).abs() < 1e-12);
    assert!((m.atoms[0].1 - 1.0).abs() < 1e-12);
}

#[test]
fn pushforward_examples() {
    let p = square();
    let g = Density::uniform(&p).unwrap();
    let tests = TestFunction::battery(2, 8, 1);
    let delta = DiscreteMeasure::dirac(vec![0.0, 0.0]);
    assert_eq!(
        pushforward_residual(&phi_square(), &g, &p, &delta, &tests).unwrap(),
        0.0
    );

    // phi_P is the wrong candidate for delta at y; f = |x - y| exposes it
    let y = [0.5, 0.0];
    let wrong = DiscreteMeasure::dirac(y.to_vec());
    let ma = ma_transported_pl(&phi_square(), &g, &p).unwrap();
    let dist: f64 = ma.atoms.iter().map(|(x, m)| m * toric_ot::linalg::dist(x, &y)).sum();
    assert!((dist - 0.5).abs() < 1e-12);
    assert!(pushforward_residual(&phi_square(), &g, &p, &wrong, &tests).unwrap() > 0.0);
}

// ot_solver

#[test]
fn laguerre_examples() {
    let p = square();
    let d = laguerre_cells(&p, &[vec![-1.0, 0.0], vec![1.0, 0.0]], &[0.0, 0.0]).unwrap();
    let boxes: Vec<_> = d.cells().iter().map(|c| c.polytope().unwrap().bounding_box()).collect();
    assert_eq!(boxes[0], (vec![-1.0, -1.0], vec![0.0, 1.0]));
    assert_eq!(boxes[1], (vec![0.0, -1.0], vec![1.0, 1.0]));
    let masses = cell_masses(&d, &Density::uniform(&p).unwrap());
    assert!((masses[0] - 0.5).abs() < 1e-14 && (masses[1] - 0.5).abs() < 1e-14);

    let d = laguerre_cells(&p, &[vec![0.3, 0.3]], &[0.0]).unwrap();
    assert!((d.cells()[0].polytope().unwrap().volume() - 4.0).abs() < 1e-12);
    assert_eq!(cell_masses(&d, &Density::uniform(&p).unwrap()), vec![1.0]);

    let d = laguerre_cells(&unit(), &[vec![0.0], vec![1.0]], &[0.0, 0.5]).unwrap();
    let bounds: Vec<(f64, f64)> = d
        .cells()
        .iter()
        .map(|c| match c {
            Cell::Interval { lo, hi, .. } => (*lo, *hi),
            _ => panic!("expected an interval"),
        })
        .collect();
    assert_eq!(bounds, vec![(0.0, 0.5), (0.5, 1.0)]);
    let m = cell_masses(&d, &linear_density());
    assert!((m[0] - 0.25).abs() < 1e-14 && (m[1] - 0.75).abs() < 1e-14);
}

#[test]
fn solver_examples() {
    let p = square();
    let g = Density::uniform(&p).unwrap();
    let opts = SolverOptions::default();
    let s = solve_dual(&p, &g, &DiscreteMeasure::dirac(vec![0.0, 0.0]), &opts).unwrap();
    for x in common::grid_points(2, 2.0, 21) {
        assert!((s.u.value(&x) - support_function(&p, &x)).abs() < 1e-12);
    }

    let s = solve_dual(&unit(), &Density::uniform(&unit()).unwrap(), &halves(), &opts).unwrap();
    assert!(s.weights[0].abs() < 1e-12 && (s.weights[1] - 0.5).abs() < 1e-9);
    assert!((s.u.value(&[0.0])).abs() < 1e-9 && (s.u.value(&[1.0]) - 0.5).abs() < 1e-9);
    for x in [-2.0f64, -0.3, 0.4, 1.7, 3.0] {
        let expected = (0.5 * x).max(0.0).max(0.5 + x - 1.0).max(0.5 + 0.5 * (x - 1.0));
        assert!((s.u.value(&[x]) - expected).abs() < 1e-9, "u({x})");
    }

    let mu = DiscreteMeasure::probability(vec![(vec![-1.0, 0.0], 0.5), (vec![1.0, 0.0], 0.5)]).unwrap();
    let s = solve_dual(&p, &g, &mu, &opts).unwrap();
    assert!(s.weights.iter().all(|w| w.abs() < 1e-9));
    assert!((s.masses[0] - 0.5).abs() < 1e-12);
}

#[test]
fn solution_u_of_a_single_cell_is_the_support_function() {
    let d = laguerre_cells(&square(), &[vec![0.0, 0.0]], &[0.0]).unwrap();
    let u = solution_u(&d).unwrap();
    for x in common::grid_points(2, 2.0, 11) {
        assert!((u.value(&x) - support_function(&square(), &x)).abs() < 1e-14);
    }
}

#[test]
fn oracle_examples() {
    let o = oracle_1d(&unit(), &Density::uniform(&unit()).unwrap(), &halves()).unwrap();
    assert!((o.cells[0].1 - 0.5).abs() < 1e-12);
    let o = oracle_1d(&unit(), &linear_density(), &halves()).unwrap();
    assert!((o.cells[0].1 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    let o = oracle_1d(&unit(), &linear_density(), &DiscreteMeasure::dirac(vec![0.3])).unwrap();
    assert_eq!(o.cells, vec![(0.0, 1.0)]);
    for x in [-1.0f64, 0.0, 0.3, 2.0] {
        assert!((o.u.value(&[x]) - (x - 0.3).max(0.0)).abs() < 1e-12);
    }
}

#[test]
fn uniqueness_examples() {
    let p = square();
    let g = Density::uniform(&p).unwrap();
    let opts = SolverOptions::default();
    let delta = DiscreteMeasure::dirac(vec![0.0, 0.0]);
    assert_eq!(uniqueness_probe(&p, &g, &delta, &[1, 2, 3], &opts).unwrap(), 0.0);
    let mut r = common::rng(3);
    let mu = common::random_measure(&mut r, 2, 5, 1.0);
    assert!(uniqueness_probe(&p, &g, &mu, &[4, 5, 6], &opts).unwrap() <= 1e-8);
}

#[test]
fn invalid_inputs_are_rejected() {
    let p = square();
    let g = Density::uniform(&p).unwrap();
    let heavy = DiscreteMeasure::new(vec![(vec![0.0, 0.0], 2.0)]).unwrap();
    assert!(matches!(
        solve_dual(&p, &g, &heavy, &SolverOptions::default()),
        Err(Error::InvalidInput(_))
    ));
    let line = DiscreteMeasure::dirac(vec![0.0]);
    assert!(solve_dual(&p, &g, &line, &SolverOptions::default()).is_err());
    assert!(Polytope::from_vertices(&[vec![0.0, -1.0], vec![0.0, 1.0]]).is_err());
}

// toric_bridge

#[test]
fn moment_map_examples() {
    let MomentValue::Point(v) = moment_map(&SmoothPotential::logistic(), &[0.0], None).unwrap() else {
        panic!("logistic potential is smooth")
    };
    assert!((v[0] - 0.5).abs() < 1e-15);
    let phi = pl1(&[(0.0, 0.0), (1.0, 0.0)]);
    assert_eq!(moment_map(&phi, &[5.0], None).unwrap(), MomentValue::Point(vec![1.0]));
    let MomentValue::Point(v) = moment_map(&SmoothPotential::quadratic(2), &[1.0, 2.0], None).unwrap() else {
        panic!("quadratic is smooth")
    };
    assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 2.0).abs() < 1e-12);
}

#[test]
fn moment_image_examples() {
    let pts: Vec<Vec<f64>> = (-50..=50).map(|k| vec![k as f64 * 0.4]).collect();
    assert!(
        moment_image_check(&SmoothPotential::logistic(), &unit(), &pts)
            .unwrap()
            .contained
    );
    let pts2 = common::grid_points(2, 3.0, 13);
    assert!(moment_image_check(&phi_square(), &square(), &pts2).unwrap().contained);

    let p = Polytope::polygon(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
    let twice = PlConvexFunction::support_function(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
    let r = moment_image_check(&twice, &p, &pts2).unwrap();
    assert!(!r.contained);
    assert!((r.max_violation - 1.0 / 2f64.sqrt()).abs() < 1e-9 || (r.max_violation - 1.0).abs() < 1e-9);
}

#[test]
fn class_examples() {
    let shifted = PlConvexFunction::support_function(square().vertices())
        .unwrap()
        .shifted(1.0);
    let c = class_membership(&shifted, &square(), None).unwrap();
    assert_eq!((c.in_p, c.in_p_plus), (Verdict::Yes, Verdict::Yes));
    let c = class_membership(&SmoothPotential::logistic(), &unit(), None).unwrap();
    assert_eq!((c.in_p, c.in_p_plus), (Verdict::Yes, Verdict::Yes));
    let c = class_membership(&SmoothPotential::quadratic(2), &square(), None).unwrap();
    assert_eq!((c.in_p, c.in_p_plus), (Verdict::No, Verdict::No));
}

#[test]
fn factor_examples() {
    let r = complex_real_factor_check(&SmoothPotential::logistic(), |_| 1.0, (-20.0, 20.0)).unwrap();
    assert!((r.ratio - 1.0).abs() < 1e-6);
    assert!((r.real_side - 1.0).abs() < 1e-6);
    let r = complex_real_factor_check(&SmoothPotential::quadratic(1), |_| 1.0, (-3.0, 2.0)).unwrap();
    assert!((r.ratio - 1.0).abs() < 1e-6);
    assert!((r.real_side - 5.0).abs() < 1e-9);
    let bump = |x: f64| toric_ot::toric::sigmoid(x) * (1.0 - toric_ot::toric::sigmoid(x));
    let r = complex_real_factor_check(&SmoothPotential::logistic(), bump, (-30.0, 30.0)).unwrap();
    assert!((r.ratio - 1.0).abs() < 1e-6);
    let concave = SmoothPotential::new(1, |x| -x[0] * x[0]);
    assert!(complex_real_factor_check(&concave, |_| 1.0, (-1.0, 1.0)).is_err());
}

// convergence_lab

#[test]
fn decreasing_sequence_examples() {
    let p = square();
    let grid = Grid::cube(2, 2.0, 81).unwrap();
    let f = phi_square();
    let base = SampledFunction::from_fn(grid.clone(), |x| f.value(x)).unwrap();
    let schedule: Vec<f64> = (1..=5).map(|k| 0.5f64.powi(k)).collect();
    let seq = make_decreasing_sequence(&base, &p, &schedule).unwrap();
    let (step, total) = seq.monotonicity_gaps();
    assert!(step >= -1e-12 && total >= -1e-12);
    let (first, last) = (&seq.members[0], &seq.members[4]);
    for i in 0..base.values().len() {
        let (a, b, c) = (first.values()[i], last.values()[i], base.values()[i]);
        if a.is_finite() && b.is_finite() {
            assert!(b - c <= a - c + 1e-12);
        }
    }
    assert!(make_decreasing_sequence(&base, &p, &[0.1, 0.2]).is_err());
}

#[test]
fn gradient_uniqueness_examples() {
    let grid = Grid::cube(2, 1.0, 41).unwrap();
    let u = SampledFunction::from_fn(grid.clone(), |x| x[0] * x[0] + (x[0] + x[1]).abs()).unwrap();
    let c = Polytope::boxed(&[-0.8, -0.8], &[0.8, 0.8]).unwrap();
    let v = u.map(|_, y| y + 7.0).unwrap();
    let r = check_ae_gradient_uniqueness(&u, &v, &c).unwrap();
    assert!(r.hypothesis && r.equal_mod_constant);
    let tilt = u.map(|x, y| y + 0.3 * x[0]).unwrap();
    let r = check_ae_gradient_uniqueness(&u, &tilt, &c).unwrap();
    assert!(!r.hypothesis && !r.differing_nodes.is_empty());
}
