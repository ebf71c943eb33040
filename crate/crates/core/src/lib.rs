//! Transported real Monge-Ampère equations on convex polytopes.
//!
//! Given a convex polytope `P`, a bounded density `g` on `P` and an atomic
//! probability measure `mu`, the library finds the convex function `u`,
//! unique up to an additive constant among functions dominated by the support
//! function of `P`, whose transported Monge-Ampère measure `g(grad u) MA(u)`
//! equals `mu`. The construction goes through semi-discrete optimal transport:
//! a Laguerre diagram of `P` realises the gradient of the dual potential
//! `phi = u*`, and `u` is recovered by exact Legendre conjugation.
//!
//! Around the solver sit the pieces needed to check it: exact conjugates of
//! piecewise-linear convex functions, linear-time discrete conjugates on grids,
//! Monge-Ampère measures of piecewise-linear functions, toric moment-map
//! checks, and a harness for convergence of conjugates along decreasing
//! smooth approximations.

pub mod convergence;
pub mod convex;
pub mod error;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod ma;
pub mod ot;
pub mod polytope;
pub mod toric;

pub use convex::{
    biconjugate_check, legendre_grid, legendre_pl, llt_1d, mollify, ConjugatePl, Grid, PlConvexFunction,
    SampledFunction, SubgradientSet,
};
pub use error::{Error, Result};
pub use ma::{ma_real_pl, ma_transported_pl, pushforward_residual, DiscreteMeasure, MaResult, TestFunction};
pub use ot::{
    cell_masses, laguerre_cells, oracle_1d, solution_u, solve_dual, uniqueness_probe, LaguerreDiagram, Solution,
    SolverOptions,
};
pub use polytope::{Density, Polytope};
