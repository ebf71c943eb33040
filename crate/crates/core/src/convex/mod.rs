//! Convex functions: exact piecewise-linear representatives, grid samples,
//! and the Legendre and subgradient calculus on both.

pub mod hull;
mod llt;
mod mollify;
mod pl;
mod sampled;

pub use hull::{convex_hull_2d, hull_facets, lower_envelope_value, polygon_area, Halfspace};
pub use llt::{default_dual_grid, discrete_conjugate, discrete_conjugate_1d, legendre_grid, llt_1d, slope_box};
pub use mollify::{bump, mollify};
pub use pl::{
    biconjugate_check, biconjugate_check_on, default_test_grid, legendre_pl, subgradient_pl, tie_tol, Biconjugate,
    ConjugatePl, Piece, PlConvexFunction, PlVertex, SubgradientSet,
};
pub use sampled::{fmt17, Grid, SampledFunction, TOL_CONVEX};
