//! Semi-discrete optimal transport from a density on `P` to an atomic measure,
//! and the Monge-Ampère solution it yields.

mod laguerre;
mod oracle1d;
mod solver;

pub use laguerre::{cell_masses, laguerre_cells, Cell, LaguerreDiagram};
pub use oracle1d::{oracle_1d, Oracle1d};
pub use solver::{initial_weights, solution_u, solve_dual, uniqueness_probe, Diagnostics, Solution, SolverOptions};
