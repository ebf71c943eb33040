//! Three atoms on the square with a tilted density.

use toric_ot::polytope::Polynomial;
use toric_ot::{ma_transported_pl, solve_dual, Density, DiscreteMeasure, Polytope, SolverOptions};

fn main() -> toric_ot::Result<()> {
    let p = Polytope::boxed(&[-1.0, -1.0], &[1.0, 1.0])?;
    let tilt = Polynomial::new(2, vec![(vec![0, 0], 1.0), (vec![1, 0], 0.4)])?;
    let g = Density::polynomial(&p, tilt, None)?;
    let mu = DiscreteMeasure::probability(vec![
        (vec![0.5, 0.5], 0.2),
        (vec![-0.8, 0.1], 0.5),
        (vec![0.3, -1.2], 0.3),
    ])?;
    let s = solve_dual(&p, &g, &mu, &SolverOptions::default())?;
    println!(
        "iterations {}, residual {:.2e}",
        s.diagnostics.iterations, s.diagnostics.residual
    );
    for ((y, w), m) in s.targets.iter().zip(&s.weights).zip(&s.masses) {
        println!("atom {y:?}: weight {w:.6}, mass {m:.12}");
    }
    let ma = ma_transported_pl(&s.u, &g, &p)?;
    println!(
        "g(grad u) MA(u) has {} atoms, total mass {:.12}",
        ma.atoms.len(),
        ma.total_mass()
    );
    for piece in s.u.pieces() {
        println!("  u >= <{:?}, x> + {:.6}", piece.slope, piece.intercept);
    }
    Ok(())
}
