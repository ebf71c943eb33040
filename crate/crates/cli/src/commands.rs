use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use toric_ot::convergence::run_suite;
use toric_ot::convex::{default_dual_grid, slope_box};
use toric_ot::instances::{instance, NAMES};
use toric_ot::io::{
    read_density, read_measure, read_pl, read_polytope, read_solution, to_json, write_sampled, HalfspaceJson,
    SolutionJson,
};
use toric_ot::linalg::dist;
use toric_ot::toric::{
    class_membership, complex_real_factor_check, moment_image_check_grid, ConvexPotential, SmoothPotential, Verdict,
};
use toric_ot::{
    legendre_grid, legendre_pl, ma_transported_pl, oracle_1d, pushforward_residual, solve_dual, Density,
    DiscreteMeasure, Error, Grid, PlConvexFunction, Polytope, SampledFunction, SolverOptions, TestFunction,
};

use crate::{Builtin, Cli, Command, Failure, GridFlags, Instance, SolverFlags, ToricCommand};

type Outcome = std::result::Result<(), Failure>;

const HINGES: usize = 16;

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Solve(a) => solve(cli, a),
        Command::Oracle1d(a) => oracle(cli, a),
        Command::Legendre(a) => legendre(cli, &a.function, a.grid),
        Command::Verify(a) => match (&a.suite, &a.solution) {
            (Some(s), _) => verify_suite(cli, s),
            (None, Some(sol)) => verify_solution(cli, sol, a),
            (None, None) => Err(invalid("verify needs --suite or --solution")),
        },
        Command::Toric(ToricCommand::Check(a)) => toric_check(cli, a),
        Command::Example(a) => example(cli, a.name.as_deref(), a.list),
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Lib(Error::InvalidInput(msg.into()))
}

fn emit(cli: &Cli, text: &str) -> Outcome {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Lib(e.into())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(cli: &Cli, value: &T) -> Outcome {
    emit(cli, &to_json(value)?)
}

/// Path of the CSV written next to the JSON output.
fn csv_path(cli: &Cli) -> std::result::Result<PathBuf, Failure> {
    cli.out
        .as_ref()
        .map(|p| p.with_extension("csv"))
        .ok_or_else(|| invalid("sampled output needs --out"))
}

fn check_grid(g: GridFlags) -> Outcome {
    if let Some(r) = g.grid_radius {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid("--grid-radius must be positive"));
        }
    }
    if let Some(n) = g.grid_res {
        if n < 8 {
            return Err(invalid("--grid-res must be at least 8"));
        }
    }
    Ok(())
}

fn load_instance(a: &Instance) -> std::result::Result<(Polytope, Density, DiscreteMeasure), Failure> {
    let p = read_polytope(&a.polytope)?;
    let g = read_density(&a.density, &p)?;
    let mu = read_measure(&a.target)?;
    Ok((p, g, mu))
}

fn solver_options(g: &Density, flags: SolverFlags) -> std::result::Result<SolverOptions, Failure> {
    let mut opts = SolverOptions::for_density(g);
    if let Some(t) = flags.tol {
        if !(t > 0.0) {
            return Err(invalid("--tol must be positive"));
        }
        opts.tol = t;
    }
    if let Some(m) = flags.max_iter {
        opts.max_iter = m;
    }
    Ok(opts)
}

fn default_radius(p: &Polytope, mu: &DiscreteMeasure) -> f64 {
    let reach = mu.points().iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    2.0 * (1.0 + p.diameter() + reach)
}

fn solve(cli: &Cli, a: &Instance) -> Outcome {
    check_grid(a.grid)?;
    let (p, g, mu) = load_instance(a)?;
    let opts = solver_options(&g, a.solver)?;
    let (sol, failure) = match solve_dual(&p, &g, &mu, &opts) {
        Ok(s) => (s, None),
        Err(Error::NoConvergence {
            iterations,
            residual,
            best,
        }) => {
            let best = *best;
            let err = Error::NoConvergence {
                iterations,
                residual,
                best: Box::new(best.clone()),
            };
            (best, Some(err))
        }
        Err(e) => return Err(e.into()),
    };
    let mut out = SolutionJson::from_solution(&sol);
    out.seed = Some(cli.seed);
    emit_json(cli, &out)?;
    if let Some(res) = a.grid.grid_res {
        let r = a.grid.grid_radius.unwrap_or_else(|| default_radius(&p, &mu));
        let grid = Grid::cube(p.dim(), r, res)?;
        let s = SampledFunction::from_fn(grid, |x| sol.u.value(x))?;
        write_sampled(&csv_path(cli)?, &s)?;
    }
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct OracleJson {
    breakpoints: Vec<f64>,
    weights: Vec<f64>,
    cells: Vec<[f64; 2]>,
    u_pieces: Vec<toric_ot::io::PieceJson>,
    seed: u64,
}

fn oracle(cli: &Cli, a: &Instance) -> Outcome {
    let (p, g, mu) = load_instance(a)?;
    let o = oracle_1d(&p, &g, &mu)?;
    let mut cells: Vec<(f64, f64)> = o.cells.iter().copied().filter(|(lo, hi)| hi > lo).collect();
    cells.sort_by(|x, y| x.0.total_cmp(&y.0));
    let breakpoints = cells.iter().rev().skip(1).rev().map(|c| c.1).collect();
    let out = OracleJson {
        breakpoints,
        weights: o.weights.clone(),
        cells: o.cells.iter().map(|&(lo, hi)| [lo, hi]).collect(),
        u_pieces: pieces_json(&o.u),
        seed: cli.seed,
    };
    emit_json(cli, &out)
}

fn pieces_json(u: &PlConvexFunction) -> Vec<toric_ot::io::PieceJson> {
    u.pieces()
        .iter()
        .map(|p| toric_ot::io::PieceJson {
            slope: p.slope.clone(),
            intercept: p.intercept,
        })
        .collect()
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn legendre(cli: &Cli, path: &Path, grid: GridFlags) -> Outcome {
    check_grid(grid)?;
    if is_csv(path) {
        let s = SampledFunction::read_csv(path)?;
        let n = s.dim();
        let res = grid.grid_res.unwrap_or(if n == 1 { 201 } else { 41 });
        let dual = match grid.grid_radius {
            Some(r) => Grid::cube(n, r, res)?,
            None => {
                let corners: Vec<Vec<f64>> = vec![
                    slope_box(&s).iter().map(|b| b.0).collect(),
                    slope_box(&s).iter().map(|b| b.1).collect(),
                ];
                default_dual_grid(&corners, res)?
            }
        };
        let c = legendre_grid(&s, &dual)?;
        return emit(cli, c.to_csv().trim_end());
    }
    let f = read_pl(path)?;
    let c = legendre_pl(&f);
    let domain: Vec<HalfspaceJson> = c
        .domain_facets()
        .iter()
        .map(|h| HalfspaceJson {
            normal: h.normal.clone(),
            offset: h.offset,
        })
        .collect();
    let (slopes, heights) = c.lifted_points();
    let out = json!({
        "dim": c.dim(),
        "pieces": c.pieces().map(pieces_json).map(|p| serde_json::to_value(p).unwrap_or(Value::Null)),
        "domain": domain,
        "lifted_points": slopes.iter().zip(heights).map(|(s, h)| json!({"point": s, "height": h})).collect::<Vec<_>>(),
        "seed": cli.seed,
    });
    emit_json(cli, &out)?;
    if let Some(res) = grid.grid_res {
        let dual = match grid.grid_radius {
            Some(r) => Grid::cube(f.dim(), r, res)?,
            None => default_dual_grid(&f.slopes(), res)?,
        };
        let s = SampledFunction::from_fn(dual, |p| c.value(p))?;
        write_sampled(&csv_path(cli)?, &s)?;
    }
    Ok(())
}

fn verify_suite(cli: &Cli, name: &str) -> Outcome {
    let report = run_suite(name, cli.seed)?;
    emit_json(cli, &report)?;
    if report.pass {
        Ok(())
    } else {
        let failing: Vec<&str> = report
            .properties
            .iter()
            .filter(|(_, v)| !v.pass)
            .map(|(k, _)| k.as_str())
            .collect();
        Err(Failure::Verification(format!(
            "suite {name} failed: {}",
            failing.join(", ")
        )))
    }
}

fn verify_solution(cli: &Cli, path: &Path, a: &crate::VerifyArgs) -> Outcome {
    let (Some(pp), Some(dp)) = (&a.polytope, &a.density) else {
        return Err(invalid("--solution needs --polytope and --density"));
    };
    let p = read_polytope(pp)?;
    let g = read_density(dp, &p)?;
    let sol = read_solution(path)?;
    let u = sol.u()?;
    let mu = match &a.target {
        Some(t) => read_measure(t)?,
        None => sol.measure()?,
    };
    let tol = a.tol.unwrap_or_else(|| SolverOptions::for_density(&g).tol);
    let tol_push = 10.0 * tol;
    let tests = TestFunction::battery(p.dim(), HINGES, cli.seed);
    let residual = pushforward_residual(&u, &g, &p, &mu, &tests)?;
    let ma = ma_transported_pl(&u, &g, &p)?;
    let mut atom_error: f64 = 0.0;
    for (y, m) in mu.points().iter().zip(mu.masses()) {
        let got: f64 = ma
            .atoms
            .iter()
            .filter(|(x, _)| dist(x, y) <= 1e-9)
            .map(|(_, w)| w)
            .sum();
        atom_error = atom_error.max((got - m).abs());
    }
    let pass = residual <= tol_push && atom_error <= tol_push;
    emit_json(
        cli,
        &json!({
            "pushforward_residual": residual,
            "ma_atom_error": atom_error,
            "tol_push": tol_push,
            "pass": pass,
            "seed": cli.seed,
        }),
    )?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "pushforward residual {residual:e} or atom error {atom_error:e} exceeds {tol_push:e}"
        )))
    }
}

fn verdict_json(v: Verdict) -> Value {
    v.as_bool().map_or(Value::Null, Value::Bool)
}

fn toric_check(cli: &Cli, a: &crate::ToricArgs) -> Outcome {
    check_grid(a.grid)?;
    let p = read_polytope(&a.polytope)?;
    let f: Box<dyn ConvexPotential> = match (&a.potential, a.builtin) {
        (_, Some(Builtin::Logistic)) => Box::new(SmoothPotential::logistic()),
        (_, Some(Builtin::Quadratic)) => Box::new(SmoothPotential::quadratic(p.dim())),
        (Some(path), None) if is_csv(path) => Box::new(SampledFunction::read_csv(path)?),
        (Some(path), None) => Box::new(read_pl(path)?),
        (None, None) => return Err(invalid("toric check needs --potential or --builtin")),
    };
    let n = f.dim();
    if n != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: n,
        }
        .into());
    }
    let class = class_membership(f.as_ref(), &p, a.grid.grid_radius)?;
    let res = a.grid.grid_res.unwrap_or(if n == 1 { 2001 } else { 101 });
    let grid = match f.extent() {
        Some((c, half)) => {
            let lo: Vec<f64> = c.iter().map(|v| v - half).collect();
            let hi: Vec<f64> = c.iter().map(|v| v + half).collect();
            Grid::spanning(&lo, &hi, res)?
        }
        None => Grid::cube(n, a.grid.grid_radius.unwrap_or(10.0 * p.diameter()), res)?,
    };
    let moment = moment_image_check_grid(f.as_ref(), &p, &grid)?;
    let factor = match (n, a.builtin) {
        (1, Some(_)) => {
            let r = a.grid.grid_radius.unwrap_or(40.0);
            Some(complex_real_factor_check(f.as_ref(), |_| 1.0, (-r, r))?.ratio)
        }
        _ => None,
    };
    let report = json!({
        "in_P": verdict_json(class.in_p),
        "in_Pplus": verdict_json(class.in_p_plus),
        "moment_violation": moment.max_violation,
        "factor_ratio": factor,
        "class": class,
        "moment": moment,
        "seed": cli.seed,
    });
    emit_json(cli, &report)?;
    if !moment.contained || class.in_p == Verdict::No {
        return Err(Failure::Verification(format!(
            "potential is not in the class of the polytope (moment violation {:e})",
            moment.max_violation
        )));
    }
    Ok(())
}

fn example(cli: &Cli, name: Option<&str>, list: bool) -> Outcome {
    if list {
        for n in NAMES {
            println!("{n}\t{}", instance(n)?.summary);
        }
        return Ok(());
    }
    let name = name.ok_or_else(|| invalid("example needs a name"))?;
    let inst = instance(name)?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(name));
    for path in inst.write(&dir)? {
        println!("{}", path.display());
    }
    Ok(())
}
