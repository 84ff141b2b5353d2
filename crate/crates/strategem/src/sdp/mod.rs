//! Semidefinite programming layer.
//!
//! The stack has three levels. [`embed`] holds the real embedding of
//! complex Hermitian matrices and the symmetric vectorization used by cone
//! backends. [`problem`] defines the backend-neutral conic form (equality
//! rows over a parameter vector with PSD and nonnegative cones) together
//! with independent certification of returned solutions. [`builder`] is the
//! typed front end the rest of the crate uses: Hermitian variables, linear
//! matrix constraints, and duals, lowered onto the conic form.
//!
//! Backend selection reads the `STRATEGEM_SOLVER` environment variable;
//! `clarabel` is the default and currently the only backend.

pub mod builder;
pub mod embed;
pub mod problem;

mod clarabel_backend;

pub use builder::{
    op_identity, op_neg, op_scalar_identity, op_scale, MatOp, ObjCoef, ProgramBuilder,
    ScalarCoef, Sense, Solution, Var,
};
pub use problem::{ConicProblem, ConicSolution, SolveOptions, SolveStatus};

use crate::error::{Error, Result};

/// Solves a conic problem with the backend named by `STRATEGEM_SOLVER`.
pub fn solve_conic(problem: &ConicProblem, opts: &SolveOptions) -> Result<ConicSolution> {
    let name = std::env::var("STRATEGEM_SOLVER").unwrap_or_else(|_| "clarabel".to_string());
    match name.as_str() {
        "clarabel" => clarabel_backend::solve(problem, opts),
        other => Err(Error::Solver(format!(
            "unknown solver backend {other:?} (available: clarabel)"
        ))),
    }
}
