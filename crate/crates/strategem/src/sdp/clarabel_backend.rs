//! Conic backend built on the Clarabel interior-point solver.
//!
//! The mapping into Clarabel's `min c·x  s.t.  Ax + s = b, s ∈ K` form:
//! equality rows become a zero cone block, each nonnegative coordinate and
//! each PSD segment of `x` gets identity rows into the matching cone
//! (`-x_seg + s = 0` puts `s = x_seg` inside the cone). Clarabel's scaled
//! triangular convention for PSD cones is the same column-major, √2-scaled
//! layout as [`super::embed::svec`].

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use crate::error::{Error, Result};
use crate::sdp::problem::{certify, ConicProblem, ConicSolution, SolveOptions};

pub fn solve(problem: &ConicProblem, opts: &SolveOptions) -> Result<ConicSolution> {
    let n = problem.num_vars;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();

    for row in &problem.rows {
        let r = b.len();
        for &(col, v) in &row.coeffs {
            triplets.push((r, col, v));
        }
        b.push(row.rhs);
    }
    let eq_rows = b.len();
    if eq_rows > 0 {
        cones.push(SupportedConeT::ZeroConeT(eq_rows));
    }

    if !problem.nonneg.is_empty() {
        for &col in &problem.nonneg {
            triplets.push((b.len(), col, -1.0));
            b.push(0.0);
        }
        cones.push(SupportedConeT::NonnegativeConeT(problem.nonneg.len()));
    }

    for block in &problem.psd_blocks {
        for k in 0..block.len() {
            triplets.push((b.len(), block.offset + k, -1.0));
            b.push(0.0);
        }
        cones.push(SupportedConeT::PSDTriangleConeT(block.side));
    }

    let a = csc_from_triplets(b.len(), n, triplets);
    let p = CscMatrix::zeros((n, n));
    let settings = DefaultSettingsBuilder::default()
        .verbose(opts.verbose)
        .max_iter(opts.max_iter)
        .tol_gap_abs(1e-10)
        .tol_gap_rel(1e-10)
        .tol_feas(1e-10)
        .build()
        .map_err(|e| Error::Solver(format!("bad solver settings: {e}")))?;
    let mut solver = DefaultSolver::new(&p, &problem.objective, &a, &b, &cones, settings)
        .map_err(|e| Error::Solver(format!("problem rejected by backend: {e:?}")))?;
    solver.solve();

    let sol = &solver.solution;
    match sol.status {
        SolverStatus::Solved
        | SolverStatus::AlmostSolved
        | SolverStatus::InsufficientProgress
        | SolverStatus::MaxIterations
        | SolverStatus::MaxTime => {}
        other => {
            return Err(Error::Solver(format!(
                "backend stopped with status {other:?}"
            )))
        }
    }
    // Clarabel's stationarity reads Px + q + Aᵀz = 0, so y = -z are the
    // multipliers for the convention c·x + y·(b - Ax).
    let eq_duals: Vec<f64> = sol.z[..eq_rows].iter().map(|&z| -z).collect();
    Ok(certify(
        problem,
        opts,
        sol.x.clone(),
        sol.obj_val_dual,
        eq_duals,
        sol.iterations,
        "clarabel",
    ))
}

fn csc_from_triplets(
    rows: usize,
    cols: usize,
    triplets: Vec<(usize, usize, f64)>,
) -> CscMatrix<f64> {
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); cols];
    for (r, c, v) in triplets {
        by_col[c].push((r, v));
    }
    let mut colptr = Vec::with_capacity(cols + 1);
    colptr.push(0usize);
    let mut rowval = Vec::new();
    let mut nzval = Vec::new();
    for col in &mut by_col {
        col.sort_by_key(|&(r, _)| r);
        let mut last = usize::MAX;
        for &(r, v) in col.iter() {
            if r == last {
                let n = nzval.len();
                nzval[n - 1] += v;
            } else {
                rowval.push(r);
                nzval.push(v);
                last = r;
            }
        }
        colptr.push(rowval.len());
    }
    CscMatrix::new(rows, cols, colptr, rowval, nzval)
}
