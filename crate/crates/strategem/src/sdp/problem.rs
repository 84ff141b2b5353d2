//! Backend-agnostic conic problem and certified solution types.
//!
//! A [`ConicProblem`] is a linear minimization over a real variable vector
//! `x`: equality rows `a·x = b`, individual nonnegative coordinates, and
//! segments of `x` that must form positive semidefinite symmetric matrices
//! in scaled triangular ([`super::embed::svec`]) form. Backends solve it;
//! [`certify`] then re-checks feasibility and the duality gap directly on
//! the returned iterate, so a solution's status never rests on a solver's
//! self-reported convergence alone.

use crate::error::{Error, Result};
use crate::sdp::embed::{smat, svec_len};
use crate::tol;

/// One sparse equality row `Σ coeffs·x = rhs`.
#[derive(Clone, Debug)]
pub struct SparseRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// A segment of the variable vector holding the scaled triangular
/// vectorization of a `side×side` PSD matrix.
#[derive(Clone, Copy, Debug)]
pub struct PsdBlock {
    pub offset: usize,
    pub side: usize,
}

impl PsdBlock {
    pub fn len(&self) -> usize {
        svec_len(self.side)
    }

    pub fn is_empty(&self) -> bool {
        self.side == 0
    }
}

/// A conic linear program in minimization form.
#[derive(Clone, Debug, Default)]
pub struct ConicProblem {
    pub num_vars: usize,
    /// Minimized objective `c·x`.
    pub objective: Vec<f64>,
    pub rows: Vec<SparseRow>,
    pub psd_blocks: Vec<PsdBlock>,
    /// Variable indices constrained to be nonnegative.
    pub nonneg: Vec<usize>,
}

impl ConicProblem {
    /// One-line size description for logs and verbose output.
    pub fn summary(&self) -> String {
        format!(
            "{} variables, {} equality rows, {} psd blocks (sides {:?}), {} nonnegative",
            self.num_vars,
            self.rows.len(),
            self.psd_blocks.len(),
            self.psd_blocks.iter().map(|b| b.side).collect::<Vec<_>>(),
            self.nonneg.len()
        )
    }
}

/// Solver-independent quality verdict, assigned by [`certify`].
#[derive(Clone, Debug, PartialEq)]
pub enum SolveStatus {
    /// Feasibility and duality gap verified within the requested tolerances.
    Optimal,
    /// The solver returned an iterate that misses at least one tolerance;
    /// the message lists the worst offender.
    Inaccurate(String),
}

/// Numerical controls for one solve.
#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Certified duality gap, relative to `max(1, |objective|)`.
    pub gap_tol: f64,
    /// Certified feasibility tolerance for equality rows and cone membership.
    pub feas_tol: f64,
    /// Interior-point iteration cap.
    pub max_iter: u32,
    /// Prints solver progress when set.
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            gap_tol: tol::GAP_TOL.max(1e-9),
            feas_tol: tol::TOL_FEAS,
            max_iter: 200,
            verbose: false,
        }
    }
}

/// A solved and certified conic program.
#[derive(Clone, Debug)]
pub struct ConicSolution {
    pub x: Vec<f64>,
    /// Primal objective `c·x` of the minimization form.
    pub objective: f64,
    /// Dual objective reported by the backend.
    pub dual_objective: f64,
    /// Certified duality gap `|objective - dual_objective|`.
    pub gap: f64,
    /// Worst equality-row violation.
    pub eq_residual: f64,
    /// Most negative eigenvalue over all PSD blocks (0 when clean).
    pub psd_residual: f64,
    /// One dual value per equality row, normalized so that the Lagrangian
    /// reads `c·x + Σ y·(b - a·x)`.
    pub eq_duals: Vec<f64>,
    pub status: SolveStatus,
    pub iterations: u32,
    pub solver: &'static str,
}

impl ConicSolution {
    /// Errors unless the certification verdict is [`SolveStatus::Optimal`].
    pub fn require_optimal(&self, what: &str) -> Result<()> {
        match &self.status {
            SolveStatus::Optimal => Ok(()),
            SolveStatus::Inaccurate(msg) => Err(Error::Solver(format!(
                "{what}: solution failed certification: {msg}"
            ))),
        }
    }
}

/// Re-checks a raw iterate against the problem data and assigns the status.
///
/// Checks, with `scale = max(1, |objective|)`:
/// equality rows within `feas_tol·scale`, PSD block eigenvalues above
/// `-feas_tol·scale`, nonnegative coordinates above `-feas_tol·scale`, and
/// `|primal - dual| ≤ gap_tol·scale`.
pub fn certify(
    problem: &ConicProblem,
    opts: &SolveOptions,
    x: Vec<f64>,
    dual_objective: f64,
    eq_duals: Vec<f64>,
    iterations: u32,
    solver: &'static str,
) -> ConicSolution {
    let objective: f64 = problem
        .objective
        .iter()
        .zip(&x)
        .map(|(c, xi)| c * xi)
        .sum();
    let scale = objective.abs().max(1.0);

    let mut eq_residual = 0.0f64;
    for row in &problem.rows {
        let lhs: f64 = row.coeffs.iter().map(|&(i, a)| a * x[i]).sum();
        eq_residual = eq_residual.max((lhs - row.rhs).abs());
    }

    let mut psd_residual = 0.0f64;
    for block in &problem.psd_blocks {
        let seg = &x[block.offset..block.offset + block.len()];
        let m = smat(seg, block.side);
        let min = m
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        psd_residual = psd_residual.max((-min).max(0.0));
    }
    for &i in &problem.nonneg {
        psd_residual = psd_residual.max((-x[i]).max(0.0));
    }

    let gap = (objective - dual_objective).abs();
    let mut failures = Vec::new();
    if eq_residual > opts.feas_tol * scale {
        failures.push(format!("equality residual {eq_residual:.3e}"));
    }
    if psd_residual > opts.feas_tol * scale {
        failures.push(format!("cone residual {psd_residual:.3e}"));
    }
    if gap > opts.gap_tol * scale {
        failures.push(format!("duality gap {gap:.3e}"));
    }
    let status = if failures.is_empty() {
        SolveStatus::Optimal
    } else {
        SolveStatus::Inaccurate(failures.join(", "))
    };
    ConicSolution {
        x,
        objective,
        dual_objective,
        gap,
        eq_residual,
        psd_residual,
        eq_duals,
        status,
        iterations,
        solver,
    }
}

/// Dense matrix view of the equality rows, for small-problem tests.
#[cfg(test)]
pub fn dense_equalities(problem: &ConicProblem) -> (nalgebra::DMatrix<f64>, Vec<f64>) {
    let mut a = nalgebra::DMatrix::zeros(problem.rows.len(), problem.num_vars);
    let mut b = Vec::with_capacity(problem.rows.len());
    for (r, row) in problem.rows.iter().enumerate() {
        for &(i, v) in &row.coeffs {
            a[(r, i)] += v;
        }
        b.push(row.rhs);
    }
    (a, b)
}
