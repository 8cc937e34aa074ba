//! Numerical kernels: a dense revised simplex and a min-cost-flow solver.

mod flow;
mod lp;

pub use flow::{bipartite_edges, min_cost_flow, Edge, Flow};
pub use lp::{
    farkas_value, residuals, solve_lp, Constraint, FarkasCertificate, ImprovingRay,
    LinearProgram, LpSolution, LpStatus, Optimum, Pricing, Relation, Residuals, Sense, Simplex,
    SimplexOptions, VarBound,
};
