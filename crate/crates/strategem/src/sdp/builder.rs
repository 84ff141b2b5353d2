//! Builder for semidefinite programs over complex Hermitian variables.
//!
//! Programs are stated with three kinds of variables (free reals, free
//! Hermitian matrices, and PSD Hermitian matrices) tied together by linear
//! matrix equality constraints; inequalities enter by adding explicit PSD
//! slack variables. The builder lowers everything onto real symmetric cones
//! through [`super::embed`]: a PSD Hermitian variable of dimension `d`
//! becomes one real PSD block of side `2d` whose structured symmetrization
//! carries the Hermitian value, which keeps feasible sets and objective
//! values in exact correspondence without extra coupling rows.
//!
//! Every matrix constraint of dimension `n` expands into `n²` scalar rows:
//! the real part of each upper-triangle entry plus the imaginary part of
//! each strict upper-triangle entry. Terms are arbitrary linear maps
//! supplied as closures acting on Hermitian matrices; the builder feeds each
//! variable's Hermitian basis elements through the closure and records the
//! images' entries as row coefficients.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C_ONE};
use crate::sdp::embed::{hsym, real_embed, smat, svec, svec_len, RealMatrix};
use crate::sdp::problem::{ConicProblem, ConicSolution, PsdBlock, SolveOptions, SparseRow};

/// A linear map on Hermitian matrices, used as one term of a matrix
/// constraint. Free scalar variables are fed a 1×1 matrix holding the
/// scalar.
pub type MatOp = Box<dyn Fn(&ComplexMatrix) -> ComplexMatrix>;

/// The identity term `h ↦ h`.
pub fn op_identity() -> MatOp {
    Box::new(|h| h.clone())
}

/// The negation term `h ↦ -h`.
pub fn op_neg() -> MatOp {
    Box::new(|h| -h)
}

/// The scaling term `h ↦ a·h`.
pub fn op_scale(a: f64) -> MatOp {
    Box::new(move |h| h * Complex64::new(a, 0.0))
}

/// For scalar variables: `x ↦ a·x·I_d`.
pub fn op_scalar_identity(d: usize, a: f64) -> MatOp {
    Box::new(move |s| ComplexMatrix::identity(d, d) * (s[(0, 0)] * Complex64::new(a, 0.0)))
}

/// One objective contribution.
pub enum ObjCoef {
    /// `a·x` for a free scalar variable.
    Scalar(f64),
    /// `⟨G, h⟩ = Re tr(G†h)` for a matrix variable.
    Matrix(ComplexMatrix),
}

/// One term of a scalar constraint row.
pub enum ScalarCoef {
    /// `a·x` for a free scalar variable.
    Scalar(f64),
    /// `⟨G, h⟩` for a matrix variable.
    Matrix(ComplexMatrix),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Handle to a declared variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var(usize);

/// Handle to a declared constraint, for dual extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Constraint(usize);

#[derive(Clone, Debug)]
enum VarKind {
    FreeScalar,
    FreeHerm(usize),
    PsdHerm(usize),
}

#[derive(Clone, Debug)]
struct VarInfo {
    kind: VarKind,
    offset: usize,
    len: usize,
    name: String,
}

#[derive(Clone, Debug)]
struct ConstraintInfo {
    row_offset: usize,
    dim: usize,
}

pub struct ProgramBuilder {
    vars: Vec<VarInfo>,
    num_params: usize,
    rows: Vec<SparseRow>,
    constraints: Vec<ConstraintInfo>,
    psd_blocks: Vec<PsdBlock>,
    obj_terms: Vec<(Var, ObjCoef)>,
    sense: Sense,
}

impl Default for ProgramBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl ProgramBuilder {
    pub fn new() -> Self {
        Self {
            vars: Vec::new(),
            num_params: 0,
            rows: Vec::new(),
            constraints: Vec::new(),
            psd_blocks: Vec::new(),
            obj_terms: Vec::new(),
            sense: Sense::Minimize,
        }
    }

    /// Declares an unconstrained real scalar.
    pub fn free_scalar(&mut self, name: impl Into<String>) -> Var {
        self.push_var(VarKind::FreeScalar, 1, name.into())
    }

    /// Declares an unconstrained Hermitian matrix variable of dimension `d`.
    pub fn free_herm(&mut self, name: impl Into<String>, d: usize) -> Var {
        let name = name.into();
        assert!(d > 0, "zero-dimensional variable {name}");
        self.push_var(VarKind::FreeHerm(d), d * d, name)
    }

    /// Declares a positive semidefinite Hermitian variable of dimension `d`.
    pub fn psd_herm(&mut self, name: impl Into<String>, d: usize) -> Var {
        let name = name.into();
        assert!(d > 0, "zero-dimensional variable {name}");
        let len = svec_len(2 * d);
        let var = self.push_var(VarKind::PsdHerm(d), len, name);
        self.psd_blocks.push(PsdBlock {
            offset: self.vars[var.0].offset,
            side: 2 * d,
        });
        var
    }

    fn push_var(&mut self, kind: VarKind, len: usize, name: String) -> Var {
        let offset = self.num_params;
        self.num_params += len;
        self.vars.push(VarInfo {
            kind,
            offset,
            len,
            name,
        });
        Var(self.vars.len() - 1)
    }

    /// Adds the Hermitian matrix equality `Σ op_v(h_v) = rhs` of dimension
    /// `dim`. Every term's image must be Hermitian whenever its argument is.
    pub fn matrix_constraint(
        &mut self,
        dim: usize,
        terms: Vec<(Var, MatOp)>,
        rhs: &ComplexMatrix,
    ) -> Result<Constraint> {
        if rhs.nrows() != dim || rhs.ncols() != dim {
            return Err(Error::Dimension(format!(
                "constraint rhs is {}x{}, expected {dim}x{dim}",
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        let row_offset = self.rows.len();
        // Row layout: column-major upper triangle; diagonal entries get one
        // row (real part), strict entries two rows (real, then imaginary).
        let mut entry_rows: Vec<(usize, Option<usize>)> = Vec::with_capacity(svec_len(dim));
        let mut next = row_offset;
        for j in 0..dim {
            for i in 0..=j {
                if i == j {
                    entry_rows.push((next, None));
                    next += 1;
                } else {
                    entry_rows.push((next, Some(next + 1)));
                    next += 2;
                }
            }
        }
        for j in 0..dim {
            for i in 0..=j {
                let (re_row, im_row) = entry_rows[j * (j + 1) / 2 + i];
                self.rows.push(SparseRow {
                    coeffs: Vec::new(),
                    rhs: rhs[(i, j)].re,
                });
                debug_assert_eq!(self.rows.len() - 1, re_row);
                if let Some(im_row) = im_row {
                    self.rows.push(SparseRow {
                        coeffs: Vec::new(),
                        rhs: rhs[(i, j)].im,
                    });
                    debug_assert_eq!(self.rows.len() - 1, im_row);
                }
            }
        }
        for (var, op) in terms {
            let info = self.vars[var.0].clone();
            self.for_each_basis(&info, |slf, param, basis| {
                let img = op(basis);
                assert!(
                    img.nrows() == dim && img.ncols() == dim,
                    "term for {} produced a {}x{} image in a dim-{dim} constraint",
                    info.name,
                    img.nrows(),
                    img.ncols()
                );
                for j in 0..dim {
                    for i in 0..=j {
                        let v = img[(i, j)];
                        let (re_row, im_row) = entry_rows[j * (j + 1) / 2 + i];
                        if v.re != 0.0 {
                            slf.rows[re_row].coeffs.push((info.offset + param, v.re));
                        }
                        if let Some(im_row) = im_row {
                            if v.im != 0.0 {
                                slf.rows[im_row].coeffs.push((info.offset + param, v.im));
                            }
                        }
                    }
                }
            });
        }
        self.constraints.push(ConstraintInfo { row_offset, dim });
        Ok(Constraint(self.constraints.len() - 1))
    }

    /// Adds the scalar equality `Σ coef_v(x_v) = rhs`.
    pub fn scalar_constraint(
        &mut self,
        terms: Vec<(Var, ScalarCoef)>,
        rhs: f64,
    ) -> Result<Constraint> {
        let mapped = terms
            .into_iter()
            .map(|(var, coef)| {
                let op: MatOp = match coef {
                    ScalarCoef::Scalar(a) => {
                        Box::new(move |h: &ComplexMatrix| h * Complex64::new(a, 0.0))
                    }
                    ScalarCoef::Matrix(g) => Box::new(move |h: &ComplexMatrix| {
                        let pair = (g.adjoint() * h).trace().re;
                        ComplexMatrix::from_element(1, 1, Complex64::new(pair, 0.0))
                    }),
                };
                (var, op)
            })
            .collect();
        self.matrix_constraint(
            1,
            mapped,
            &ComplexMatrix::from_element(1, 1, Complex64::new(rhs, 0.0)),
        )
    }

    /// Declares the objective; later calls replace earlier ones.
    pub fn set_objective(&mut self, sense: Sense, terms: Vec<(Var, ObjCoef)>) {
        self.sense = sense;
        self.obj_terms = terms;
    }

    /// Iterates a variable's Hermitian basis elements, invoking `f` with the
    /// parameter index and basis matrix.
    fn for_each_basis<F: FnMut(&mut Self, usize, &ComplexMatrix)>(
        &mut self,
        info: &VarInfo,
        mut f: F,
    ) {
        match info.kind {
            VarKind::FreeScalar => {
                let one = ComplexMatrix::from_element(1, 1, C_ONE);
                f(self, 0, &one);
            }
            VarKind::FreeHerm(d) => {
                let mut basis = ComplexMatrix::zeros(d, d);
                for k in 0..d {
                    basis[(k, k)] = C_ONE;
                    f(self, k, &basis);
                    basis[(k, k)] = Complex64::new(0.0, 0.0);
                }
                let mut p = d;
                for l in 0..d {
                    for k in 0..l {
                        basis[(k, l)] = C_ONE;
                        basis[(l, k)] = C_ONE;
                        f(self, p, &basis);
                        basis[(k, l)] = Complex64::new(0.0, 1.0);
                        basis[(l, k)] = Complex64::new(0.0, -1.0);
                        f(self, p + 1, &basis);
                        basis[(k, l)] = Complex64::new(0.0, 0.0);
                        basis[(l, k)] = Complex64::new(0.0, 0.0);
                        p += 2;
                    }
                }
            }
            VarKind::PsdHerm(d) => {
                let side = 2 * d;
                let mut unit = vec![0.0f64; svec_len(side)];
                for p in 0..svec_len(side) {
                    unit[p] = 1.0;
                    let h = hsym(&smat(&unit, side));
                    f(self, p, &h);
                    unit[p] = 0.0;
                }
            }
        }
    }

    /// Objective coefficients for one variable given its contribution.
    fn objective_coeffs(&mut self, var: Var, coef: &ObjCoef, c: &mut [f64], sign: f64) {
        let info = self.vars[var.0].clone();
        match (coef, &info.kind) {
            (ObjCoef::Scalar(a), VarKind::FreeScalar) => {
                c[info.offset] += sign * a;
            }
            (ObjCoef::Matrix(g), VarKind::PsdHerm(_)) => {
                // ⟨G, hsym(M)⟩ = ½⟨real_embed(G), M⟩.
                let half = svec(&(real_embed(g) * 0.5));
                for (p, v) in half.into_iter().enumerate() {
                    c[info.offset + p] += sign * v;
                }
            }
            (ObjCoef::Matrix(g), VarKind::FreeHerm(_)) => {
                let g = g.clone();
                self.for_each_basis(&info, |_slf, p, basis| {
                    let pair = (g.adjoint() * basis).trace().re;
                    c[info.offset + p] += sign * pair;
                });
            }
            (ObjCoef::Scalar(a), _) => {
                // A scalar coefficient on a matrix variable means a·tr(h).
                let d = match info.kind {
                    VarKind::FreeHerm(d) | VarKind::PsdHerm(d) => d,
                    VarKind::FreeScalar => unreachable!(),
                };
                let g = ComplexMatrix::identity(d, d) * Complex64::new(*a, 0.0);
                self.objective_coeffs(var, &ObjCoef::Matrix(g), c, sign);
            }
            (ObjCoef::Matrix(_), VarKind::FreeScalar) => {
                panic!("matrix objective coefficient on scalar variable {}", info.name);
            }
        }
    }

    /// Lowers the program to conic form, solves it with the selected
    /// backend, and wraps the certified result for typed extraction.
    pub fn solve(mut self, opts: &SolveOptions) -> Result<Solution> {
        let sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut c = vec![0.0f64; self.num_params];
        let terms = std::mem::take(&mut self.obj_terms);
        for (var, coef) in &terms {
            self.objective_coeffs(*var, coef, &mut c, sign);
        }
        let problem = ConicProblem {
            num_vars: self.num_params,
            objective: c,
            rows: std::mem::take(&mut self.rows),
            psd_blocks: self.psd_blocks.clone(),
            nonneg: Vec::new(),
        };
        let conic = crate::sdp::solve_conic(&problem, opts)?;
        Ok(Solution {
            conic,
            vars: self.vars,
            constraints: self.constraints,
            sign,
        })
    }
}

/// A solved program with typed access to variable values and duals.
pub struct Solution {
    conic: ConicSolution,
    vars: Vec<VarInfo>,
    constraints: Vec<ConstraintInfo>,
    sign: f64,
}

impl Solution {
    /// The objective value in the declared sense.
    pub fn objective_value(&self) -> f64 {
        self.sign * self.conic.objective
    }

    /// The backend's dual objective, in the declared sense.
    pub fn dual_objective_value(&self) -> f64 {
        self.sign * self.conic.dual_objective
    }

    /// Certified duality gap.
    pub fn gap(&self) -> f64 {
        self.conic.gap
    }

    /// The underlying certified conic solution.
    pub fn conic(&self) -> &ConicSolution {
        &self.conic
    }

    /// Errors unless certification passed.
    pub fn require_optimal(&self, what: &str) -> Result<()> {
        self.conic.require_optimal(what)
    }

    /// Value of a free scalar variable.
    pub fn scalar(&self, var: Var) -> f64 {
        let info = &self.vars[var.0];
        match info.kind {
            VarKind::FreeScalar => self.conic.x[info.offset],
            _ => panic!("{} is not a scalar variable", info.name),
        }
    }

    /// Value of a Hermitian matrix variable.
    pub fn herm(&self, var: Var) -> ComplexMatrix {
        let info = &self.vars[var.0];
        let x = &self.conic.x[info.offset..info.offset + info.len];
        match info.kind {
            VarKind::FreeScalar => panic!("{} is a scalar variable", info.name),
            VarKind::FreeHerm(d) => {
                let mut h = ComplexMatrix::zeros(d, d);
                for k in 0..d {
                    h[(k, k)] = Complex64::new(x[k], 0.0);
                }
                let mut p = d;
                for l in 0..d {
                    for k in 0..l {
                        let v = Complex64::new(x[p], x[p + 1]);
                        h[(k, l)] = v;
                        h[(l, k)] = v.conj();
                        p += 2;
                    }
                }
                h
            }
            VarKind::PsdHerm(d) => hsym(&smat(x, 2 * d)),
        }
    }

    /// The Hermitian dual multiplier of a matrix constraint, normalized so
    /// that perturbing the constraint's right-hand side by `Δ` moves the
    /// optimal value by `⟨dual, Δ⟩` to first order.
    pub fn dual_matrix(&self, constraint: Constraint) -> ComplexMatrix {
        let info = &self.constraints[constraint.0];
        let dim = info.dim;
        let mut y = ComplexMatrix::zeros(dim, dim);
        let mut row = info.row_offset;
        for j in 0..dim {
            for i in 0..=j {
                if i == j {
                    y[(j, j)] = Complex64::new(self.sign * self.conic.eq_duals[row], 0.0);
                    row += 1;
                } else {
                    let re = self.sign * self.conic.eq_duals[row];
                    let im = self.sign * self.conic.eq_duals[row + 1];
                    let v = Complex64::new(re / 2.0, im / 2.0);
                    y[(i, j)] = v;
                    y[(j, i)] = v.conj();
                    row += 2;
                }
            }
        }
        y
    }

    /// The scalar dual multiplier of a scalar constraint.
    pub fn dual_scalar(&self, constraint: Constraint) -> f64 {
        let info = &self.constraints[constraint.0];
        assert_eq!(info.dim, 1, "not a scalar constraint");
        self.sign * self.conic.eq_duals[info.row_offset]
    }
}

/// Real symmetric view of a solved PSD block, for diagnostics.
#[allow(dead_code)]
pub fn real_block(sol: &Solution, var: Var) -> RealMatrix {
    let info = &sol.vars[var.0];
    match info.kind {
        VarKind::PsdHerm(d) => smat(&sol.conic.x[info.offset..info.offset + info.len], 2 * d),
        _ => panic!("{} is not a psd variable", info.name),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh_of, gaussian_matrix, min_eigenvalue_of, HermitianOperator};
    use crate::sdp::problem::SolveStatus;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let g = gaussian_matrix(n, n, &mut rng);
        HermitianOperator::new(&g + g.adjoint())
            .unwrap()
            .into_matrix()
    }

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn pinned_variable_reproduces_objective() {
        let rho = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.6, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.4, 0.0)],
        );
        let cost = random_hermitian(2, 3);
        let expect = (cost.adjoint() * &rho).trace().re;

        let mut pb = ProgramBuilder::new();
        let x = pb.psd_herm("X", 2);
        pb.matrix_constraint(2, vec![(x, op_identity())], &rho).unwrap();
        pb.set_objective(Sense::Minimize, vec![(x, ObjCoef::Matrix(cost))]);
        let sol = pb.solve(&opts()).unwrap();
        sol.require_optimal("pinned").unwrap();
        assert!((sol.objective_value() - expect).abs() < 1e-7);
        let got = sol.herm(x);
        assert!((&got - &rho).iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-6);
    }

    #[test]
    fn largest_eigenvalue_two_ways_with_kkt_duals() {
        // Primal form: max ⟨C, X⟩ over states X; dual form: min t with
        // t·I - S = C. Both equal λmax(C), and each problem's dual
        // multiplier is the other's optimizer.
        let cost = random_hermitian(3, 7);
        let (vals, _) = eigh_of(&cost).unwrap();
        let lmax = vals[2];

        let mut pb = ProgramBuilder::new();
        let x = pb.psd_herm("X", 3);
        let trace_row = pb
            .scalar_constraint(
                vec![(x, ScalarCoef::Matrix(ComplexMatrix::identity(3, 3)))],
                1.0,
            )
            .unwrap();
        pb.set_objective(Sense::Maximize, vec![(x, ObjCoef::Matrix(cost.clone()))]);
        let sol = pb.solve(&opts()).unwrap();
        sol.require_optimal("primal eig").unwrap();
        assert!((sol.objective_value() - lmax).abs() < 1e-7, "primal");
        // Shadow price of the trace budget is the optimal value itself.
        assert!((sol.dual_scalar(trace_row) - lmax).abs() < 1e-6);
        let xv = sol.herm(x);
        assert!((xv.trace().re - 1.0).abs() < 1e-7);
        assert!(min_eigenvalue_of(&xv).unwrap() > -1e-7);

        let mut pb = ProgramBuilder::new();
        let t = pb.free_scalar("t");
        let s = pb.psd_herm("S", 3);
        let lmi = pb
            .matrix_constraint(
                3,
                vec![(t, op_scalar_identity(3, 1.0)), (s, op_neg())],
                &cost,
            )
            .unwrap();
        pb.set_objective(Sense::Minimize, vec![(t, ObjCoef::Scalar(1.0))]);
        let sol = pb.solve(&opts()).unwrap();
        sol.require_optimal("dual eig").unwrap();
        assert!((sol.objective_value() - lmax).abs() < 1e-7, "dual");
        // KKT: the multiplier is a state achieving ⟨C, Y⟩ = λmax.
        let y = sol.dual_matrix(lmi);
        assert!((y.trace().re - 1.0).abs() < 1e-6);
        assert!(min_eigenvalue_of(&y).unwrap() > -1e-6);
        assert!(((cost.adjoint() * &y).trace().re - lmax).abs() < 1e-6);
    }

    #[test]
    fn complex_objective_reaches_spectral_bound() {
        // σ_y has purely imaginary off-diagonal entries; the optimum is
        // blind to complex phases done wrong.
        let sigma_y = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        );
        let mut pb = ProgramBuilder::new();
        let x = pb.psd_herm("X", 2);
        pb.scalar_constraint(
            vec![(x, ScalarCoef::Matrix(ComplexMatrix::identity(2, 2)))],
            1.0,
        )
        .unwrap();
        pb.set_objective(Sense::Maximize, vec![(x, ObjCoef::Matrix(sigma_y.clone()))]);
        let sol = pb.solve(&opts()).unwrap();
        sol.require_optimal("sigma_y").unwrap();
        assert!((sol.objective_value() - 1.0).abs() < 1e-7);
        let xv = sol.herm(x);
        // Optimizer is the +1 eigenprojector of σ_y: entries ±i/2 off-diagonal.
        assert!((xv[(0, 1)] - c(0.0, -0.5)).norm() < 1e-6);
    }

    #[test]
    fn free_hermitian_dominating_two_diagonals() {
        let c1 = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(-2.0, 0.0),
            c(0.5, 0.0),
        ]));
        let c2 = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.0, 0.0),
            c(3.0, 0.0),
            c(0.4, 0.0),
        ]));
        let expect = 1.0 + 3.0 + 0.5;

        let mut pb = ProgramBuilder::new();
        let r = pb.free_herm("R", 3);
        let s1 = pb.psd_herm("S1", 3);
        let s2 = pb.psd_herm("S2", 3);
        pb.matrix_constraint(3, vec![(r, op_identity()), (s1, op_neg())], &c1)
            .unwrap();
        pb.matrix_constraint(3, vec![(r, op_identity()), (s2, op_neg())], &c2)
            .unwrap();
        pb.set_objective(
            Sense::Minimize,
            vec![(r, ObjCoef::Matrix(ComplexMatrix::identity(3, 3)))],
        );
        let sol = pb.solve(&opts()).unwrap();
        sol.require_optimal("dominating").unwrap();
        assert!((sol.objective_value() - expect).abs() < 1e-6);
        let rv = sol.herm(r);
        assert!(min_eigenvalue_of(&(&rv - &c1)).unwrap() > -1e-6);
        assert!(min_eigenvalue_of(&(&rv - &c2)).unwrap() > -1e-6);
    }

    #[test]
    fn custom_operator_terms_transpose_map() {
        // Constrain X - Xᵀ-as-map ... use a partial-trace style custom op:
        // pin Tr(X)·I/2 - X = 0, whose only PSD solutions are multiples of
        // the identity; with tr X = 2 the unique solution is I.
        let mut pb = ProgramBuilder::new();
        let x = pb.psd_herm("X", 2);
        let op: MatOp = Box::new(|h: &ComplexMatrix| {
            ComplexMatrix::identity(2, 2) * (h.trace() / c(2.0, 0.0)) - h
        });
        pb.matrix_constraint(2, vec![(x, op)], &ComplexMatrix::zeros(2, 2))
            .unwrap();
        pb.scalar_constraint(
            vec![(x, ScalarCoef::Matrix(ComplexMatrix::identity(2, 2)))],
            2.0,
        )
        .unwrap();
        pb.set_objective(
            Sense::Minimize,
            vec![(x, ObjCoef::Matrix(random_hermitian(2, 11)))],
        );
        let sol = pb.solve(&opts()).unwrap();
        sol.require_optimal("custom op").unwrap();
        let xv = sol.herm(x);
        assert!(
            (&xv - ComplexMatrix::identity(2, 2))
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max)
                < 1e-6
        );
    }

    #[test]
    fn infeasible_program_is_rejected() {
        let mut pb = ProgramBuilder::new();
        let x = pb.psd_herm("X", 2);
        pb.scalar_constraint(
            vec![(x, ScalarCoef::Matrix(ComplexMatrix::identity(2, 2)))],
            -1.0,
        )
        .unwrap();
        pb.set_objective(Sense::Minimize, vec![(x, ObjCoef::Scalar(1.0))]);
        let out = pb.solve(&opts());
        match out {
            Err(Error::Solver(_)) => {}
            Ok(sol) => assert_ne!(sol.conic().status, SolveStatus::Optimal),
            Err(other) => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn sense_sign_is_consistent() {
        for (sense, expect) in [(Sense::Maximize, 3.0), (Sense::Minimize, 3.0)] {
            let mut pb = ProgramBuilder::new();
            let t = pb.free_scalar("t");
            pb.scalar_constraint(vec![(t, ScalarCoef::Scalar(1.0))], 3.0)
                .unwrap();
            pb.set_objective(sense, vec![(t, ObjCoef::Scalar(1.0))]);
            let sol = pb.solve(&opts()).unwrap();
            sol.require_optimal("pinned scalar").unwrap();
            assert!((sol.objective_value() - expect).abs() < 1e-8);
            assert!((sol.scalar(t) - 3.0).abs() < 1e-8);
            assert!(sol.gap() < 1e-6);
        }
    }
}
