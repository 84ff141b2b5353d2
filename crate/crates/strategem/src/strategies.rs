//! Strategies, co-strategies, and their Choi representations.
//!
//! A pure `r`-round strategy is a tuple of isometries, one per round, where
//! the round-`i` isometry consumes the incoming register `X(i)` together with
//! the private memory left by the previous round and produces the outgoing
//! register `Y(i)` plus updated memory. A pure co-strategy is the matching
//! object for the party that moves first: an initial state on `X(0)` and its
//! own memory, followed by isometries that consume each reply `Y(i)` and emit
//! the next message `X(i+1)`. The co-strategy keeps its memory `W` at the end
//! of the interaction; the strategy keeps `Z`.
//!
//! Everything a strategy does to the outside world is captured by a single
//! positive semidefinite Choi operator on the joint space
//! `Y(0)⊗…⊗Y(r-1)⊗X(0)⊗…⊗X(r-1)` (all outputs first, then all inputs). This
//! module builds those operators ([`strategy_choi`], [`costrategy_choi`]),
//! checks membership in the strategy and co-strategy sets by their marginal
//! chains ([`validate_strategy`], [`validate_costrategy`]), simulates full
//! interactions round by round ([`interact`]), and moves between Choi
//! operators and purifications in both directions.
//!
//! ## Index conventions
//!
//! Rounds and tensor factors are indexed from 0. The round-`i` strategy
//! isometry is a `(y_dim(i)·z_i) × (x_dim(i)·z_{i-1})` matrix whose row index
//! flattens `(y, z)` as `y·z_i + z` and whose column index flattens `(x, z)`
//! as `x·z_{i-1} + z`, with `z_{-1} = 1`. Co-strategy isometries follow the
//! same pattern with the roles of `X` and `Y` exchanged and memory dims
//! `w_0..w_r` (the initial state lives on `X(0)⊗W`, flattened `x·w_0 + w`).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, ensure_finite, isometry_defect, kron, kron_all, max_abs, min_eigenvalue, partial_trace,
    ComplexMatrix, ComplexVector, HermitianOperator, C_ONE,
};
use crate::registers::{embed_identity, permute_matrix_rows, permute_vector_factors};
use crate::tol;

pub use crate::registers::{Factor, RoundShape};

/// Relative eigenvalue cutoff below which purification directions are
/// considered numerically absent.
const RANK_CUTOFF: f64 = 1e-12;

/// A pure strategy: one isometry per round acting on the incoming register
/// and the private memory.
#[derive(Clone, Debug)]
pub struct PureStrategy {
    shape: RoundShape,
    memory_dims: Vec<usize>,
    isometries: Vec<ComplexMatrix>,
}

/// A pure co-strategy: an initial state on `X(0)` plus its memory, and one
/// isometry per round acting on the incoming reply and the memory.
#[derive(Clone, Debug)]
pub struct PureCoStrategy {
    shape: RoundShape,
    memory_dims: Vec<usize>,
    initial_state: ComplexVector,
    isometries: Vec<ComplexMatrix>,
}

impl PureStrategy {
    /// Builds a pure strategy, checking dimensions and that every round map
    /// is an isometry within [`tol::TOL_ISOMETRY`].
    pub fn new(
        shape: RoundShape,
        memory_dims: Vec<usize>,
        isometries: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let r = shape.rounds();
        if memory_dims.len() != r {
            return Err(Error::Shape(format!(
                "expected {r} memory dims, got {}",
                memory_dims.len()
            )));
        }
        if memory_dims.iter().any(|&z| z == 0) {
            return Err(Error::Shape("zero-dimensional memory".into()));
        }
        if isometries.len() != r {
            return Err(Error::Shape(format!(
                "expected {r} isometries, got {}",
                isometries.len()
            )));
        }
        for (i, a) in isometries.iter().enumerate() {
            let z_prev = if i == 0 { 1 } else { memory_dims[i - 1] };
            let rows = shape.y_dim(i) * memory_dims[i];
            let cols = shape.x_dim(i) * z_prev;
            if a.nrows() != rows || a.ncols() != cols {
                return Err(Error::Dimension(format!(
                    "round {i} isometry is {}x{}, expected {rows}x{cols}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            ensure_finite(a)?;
            let defect = isometry_defect(a);
            if defect > tol::TOL_ISOMETRY {
                return Err(Error::NotIsometry(defect));
            }
        }
        Ok(Self {
            shape,
            memory_dims,
            isometries,
        })
    }

    pub fn shape(&self) -> &RoundShape {
        &self.shape
    }

    /// Memory dimensions `z_0..z_{r-1}` (after each round).
    pub fn memory_dims(&self) -> &[usize] {
        &self.memory_dims
    }

    /// Dimension of the memory kept after the final round.
    pub fn final_memory_dim(&self) -> usize {
        *self.memory_dims.last().unwrap()
    }

    pub fn isometry(&self, round: usize) -> &ComplexMatrix {
        &self.isometries[round]
    }

    pub fn isometries(&self) -> &[ComplexMatrix] {
        &self.isometries
    }
}

impl PureCoStrategy {
    /// Builds a pure co-strategy, checking dimensions, unit norm of the
    /// initial state, and that every round map is an isometry within
    /// [`tol::TOL_ISOMETRY`].
    pub fn new(
        shape: RoundShape,
        memory_dims: Vec<usize>,
        initial_state: ComplexVector,
        isometries: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let r = shape.rounds();
        if memory_dims.len() != r + 1 {
            return Err(Error::Shape(format!(
                "expected {} memory dims, got {}",
                r + 1,
                memory_dims.len()
            )));
        }
        if memory_dims.iter().any(|&w| w == 0) {
            return Err(Error::Shape("zero-dimensional memory".into()));
        }
        if isometries.len() != r {
            return Err(Error::Shape(format!(
                "expected {r} isometries, got {}",
                isometries.len()
            )));
        }
        if initial_state.len() != shape.x_dim(0) * memory_dims[0] {
            return Err(Error::Dimension(format!(
                "initial state has length {}, expected {}",
                initial_state.len(),
                shape.x_dim(0) * memory_dims[0]
            )));
        }
        let norm_defect = (initial_state.norm() - 1.0).abs();
        if norm_defect > tol::TOL_ISOMETRY {
            return Err(Error::NotIsometry(norm_defect));
        }
        for (i, b) in isometries.iter().enumerate() {
            let x_next = if i + 1 < r { shape.x_dim(i + 1) } else { 1 };
            let rows = x_next * memory_dims[i + 1];
            let cols = shape.y_dim(i) * memory_dims[i];
            if b.nrows() != rows || b.ncols() != cols {
                return Err(Error::Dimension(format!(
                    "round {i} isometry is {}x{}, expected {rows}x{cols}",
                    b.nrows(),
                    b.ncols()
                )));
            }
            ensure_finite(b)?;
            let defect = isometry_defect(b);
            if defect > tol::TOL_ISOMETRY {
                return Err(Error::NotIsometry(defect));
            }
        }
        Ok(Self {
            shape,
            memory_dims,
            initial_state,
            isometries,
        })
    }

    pub fn shape(&self) -> &RoundShape {
        &self.shape
    }

    /// Memory dimensions `w_0..w_r` (before the first round and after each
    /// round).
    pub fn memory_dims(&self) -> &[usize] {
        &self.memory_dims
    }

    /// Dimension of the memory kept after the final round.
    pub fn final_memory_dim(&self) -> usize {
        *self.memory_dims.last().unwrap()
    }

    pub fn initial_state(&self) -> &ComplexVector {
        &self.initial_state
    }

    pub fn isometry(&self, round: usize) -> &ComplexMatrix {
        &self.isometries[round]
    }

    pub fn isometries(&self) -> &[ComplexMatrix] {
        &self.isometries
    }
}

/// The Choi operator of a strategy, on the canonical space
/// `Y(0)⊗…⊗Y(r-1)⊗X(0)⊗…⊗X(r-1)`.
#[derive(Clone, Debug)]
pub struct StrategyChoi {
    shape: RoundShape,
    matrix: HermitianOperator,
}

/// The Choi operator of a co-strategy, on the same canonical space as
/// [`StrategyChoi`].
#[derive(Clone, Debug)]
pub struct CoStrategyChoi {
    shape: RoundShape,
    matrix: HermitianOperator,
}

macro_rules! choi_common {
    ($name:ident) => {
        impl $name {
            /// Wraps a Hermitian operator of the right dimension. Membership
            /// in the strategy or co-strategy set is a separate check; see
            /// [`validate_strategy`] and [`validate_costrategy`].
            pub fn new(shape: RoundShape, matrix: HermitianOperator) -> Result<Self> {
                if matrix.dim() != shape.choi_dim() {
                    return Err(Error::Dimension(format!(
                        "Choi operator has dimension {}, shape requires {}",
                        matrix.dim(),
                        shape.choi_dim()
                    )));
                }
                Ok(Self { shape, matrix })
            }

            pub fn shape(&self) -> &RoundShape {
                &self.shape
            }

            pub fn matrix(&self) -> &ComplexMatrix {
                self.matrix.matrix()
            }

            pub fn hermitian(&self) -> &HermitianOperator {
                &self.matrix
            }

            pub fn dim(&self) -> usize {
                self.matrix.dim()
            }
        }
    };
}

choi_common!(StrategyChoi);
choi_common!(CoStrategyChoi);

/// Composes the round isometries of a strategy into the single isometry from
/// all inputs to all outputs plus final memory. Rows are indexed by
/// `Y(0)⊗…⊗Y(r-1)⊗Z`, columns by `X(0)⊗…⊗X(r-1)`.
pub fn compose_strategy_isometry(a: &PureStrategy) -> ComplexMatrix {
    let shape = a.shape();
    let r = shape.rounds();
    let x_total = shape.x_total();
    let mut m = ComplexMatrix::identity(x_total, x_total);
    let mut z_prev = 1usize;
    for i in 0..r {
        // Row factors: Y(0..i), Z (dim z_prev), X(i..r).
        let mut dims: Vec<usize> = Vec::with_capacity(i + 1 + (r - i));
        dims.extend((0..i).map(|j| shape.y_dim(j)));
        dims.push(z_prev);
        dims.extend((i..r).map(|j| shape.x_dim(j)));
        // Move X(i) in front of Z so the round isometry acts on a
        // contiguous block.
        let mut src: Vec<usize> = (0..i).collect();
        src.push(i + 1);
        src.push(i);
        src.extend(i + 2..dims.len());
        m = permute_matrix_rows(&m, &dims, &src).expect("internal permutation");
        let y_prefix: usize = (0..i).map(|j| shape.y_dim(j)).product();
        let x_suffix: usize = (i + 1..r).map(|j| shape.x_dim(j)).product();
        let pre = ComplexMatrix::identity(y_prefix, y_prefix);
        let suf = ComplexMatrix::identity(x_suffix, x_suffix);
        m = kron_all(&[&pre, a.isometry(i), &suf]) * m;
        z_prev = a.memory_dims()[i];
    }
    m
}

/// Composes a co-strategy into the single isometry from all replies to all
/// messages plus final memory. Rows are indexed by `X(0)⊗…⊗X(r-1)⊗W`,
/// columns by `Y(0)⊗…⊗Y(r-1)`.
pub fn compose_costrategy_isometry(b: &PureCoStrategy) -> ComplexMatrix {
    let shape = b.shape();
    let r = shape.rounds();
    let y_total = shape.y_total();
    let beta = ComplexMatrix::from_iterator(
        b.initial_state().len(),
        1,
        b.initial_state().iter().copied(),
    );
    // Row factors: X(0), W, Y(0..r).
    let mut m = kron(&beta, &ComplexMatrix::identity(y_total, y_total));
    for i in 0..r {
        // Row factors: X(0..=i), W (dim w_i), Y(i..r).
        let w = b.memory_dims()[i];
        let mut dims: Vec<usize> = Vec::new();
        dims.extend((0..=i).map(|j| shape.x_dim(j)));
        dims.push(w);
        dims.extend((i..r).map(|j| shape.y_dim(j)));
        // Move Y(i) in front of W.
        let mut src: Vec<usize> = (0..=i).collect();
        src.push(i + 2);
        src.push(i + 1);
        src.extend(i + 3..dims.len());
        m = permute_matrix_rows(&m, &dims, &src).expect("internal permutation");
        let x_prefix: usize = (0..=i).map(|j| shape.x_dim(j)).product();
        let y_suffix: usize = (i + 1..r).map(|j| shape.y_dim(j)).product();
        let pre = ComplexMatrix::identity(x_prefix, x_prefix);
        let suf = ComplexMatrix::identity(y_suffix, y_suffix);
        m = kron_all(&[&pre, b.isometry(i), &suf]) * m;
    }
    m
}

/// Runs the full interaction round by round and returns the joint final pure
/// state on `Z⊗W` (strategy memory, then co-strategy memory).
pub fn interact(a: &PureStrategy, b: &PureCoStrategy) -> Result<ComplexVector> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(
            "strategy and co-strategy have different round shapes".into(),
        ));
    }
    let shape = a.shape();
    let r = shape.rounds();
    let mut state = b.initial_state().clone();
    let mut z_prev = 1usize;
    for i in 0..r {
        // State factors: Z (z_prev), X(i), W (w_i); round 0 starts with the
        // implicit dim-1 memory in front.
        let w = b.memory_dims()[i];
        let x = shape.x_dim(i);
        state = permute_vector_factors(&state, &[z_prev, x, w], &[1, 0, 2])?;
        let iw = ComplexMatrix::identity(w, w);
        state = kron(a.isometry(i), &iw) * state;
        // Now Y(i), Z (z_i), W (w_i).
        let z = a.memory_dims()[i];
        let y = shape.y_dim(i);
        state = permute_vector_factors(&state, &[y, z, w], &[1, 0, 2])?;
        let iz = ComplexMatrix::identity(z, z);
        state = kron(&iz, b.isometry(i)) * state;
        // Now Z (z_i), X(i+1), W (w_{i+1}); the final round emits a dim-1
        // message register that flattens away.
        z_prev = z;
    }
    Ok(state)
}

/// The strategy's reduced final state: the interaction output on the
/// co-strategy memory `W`, with the strategy memory traced out.
pub fn reduced_final_state(a: &PureStrategy, b: &PureCoStrategy) -> Result<HermitianOperator> {
    let psi = interact(a, b)?;
    let rho = &psi * psi.adjoint();
    let z = a.final_memory_dim();
    let w = b.final_memory_dim();
    let reduced = partial_trace(&rho, &[z, w], &[0])?;
    HermitianOperator::new(reduced)
}

/// The Choi operator of a pure strategy: the composed isometry, vectorized,
/// with the final memory traced out.
pub fn strategy_choi(a: &PureStrategy) -> StrategyChoi {
    Purification::from_pure_strategy(a).choi()
}

/// The Choi operator of a pure co-strategy, on the canonical
/// outputs-then-inputs space.
pub fn costrategy_choi(b: &PureCoStrategy) -> CoStrategyChoi {
    CoPurification::from_pure_costrategy(b).choi()
}

/// The pairing between a co-strategy and a strategy. When both operators are
/// valid this is the squared norm of the joint final state, hence exactly 1.
pub fn pairing(b: &CoStrategyChoi, s: &StrategyChoi) -> Result<f64> {
    if b.shape() != s.shape() {
        return Err(Error::Shape(
            "pairing requires matching round shapes".into(),
        ));
    }
    Ok((b.matrix() * s.matrix()).trace().re)
}

/// Residuals of a membership check against the strategy or co-strategy set.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    /// How far below zero the smallest eigenvalue sits (0 when PSD).
    pub psd_residual: f64,
    /// Named affine residuals, each the max-abs deviation of one marginal
    /// constraint.
    pub residuals: Vec<(String, f64)>,
}

impl ValidationReport {
    /// Largest residual of any kind.
    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|&(_, v)| v)
            .fold(self.psd_residual, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

/// Checks membership of a Hermitian operator in the set of strategy Choi
/// operators: positive semidefiniteness plus the chain of partial-trace
/// marginal conditions, ending with the requirement that tracing out all
/// outputs leaves the identity on the inputs.
///
/// The marginal characterization of the strategy set used here is the
/// standard one from the theory of quantum games and strategies; this crate
/// treats it as given rather than re-deriving it.
pub fn validate_strategy(s: &StrategyChoi) -> ValidationReport {
    let shape = s.shape();
    let r = shape.rounds();
    let psd_residual = (-min_eigenvalue(s.hermitian())).max(0.0);
    let mut residuals = Vec::new();
    let mut p = s.matrix().clone();
    for k in (1..r).rev() {
        // P_k lives on Y(0..=k)⊗X(0..=k); trace out Y(k).
        let mut dims: Vec<usize> = (0..=k).map(|j| shape.y_dim(j)).collect();
        dims.extend((0..=k).map(|j| shape.x_dim(j)));
        let lhs = partial_trace(&p, &dims, &[k]).expect("chain dims");
        let lhs_dims: Vec<usize> = dims[..k].iter().chain(&dims[k + 1..]).copied().collect();
        let x_k = shape.x_dim(k);
        let prev = partial_trace(&lhs, &lhs_dims, &[lhs_dims.len() - 1]).expect("chain dims")
            / Complex64::new(x_k as f64, 0.0);
        let rebuilt = kron(&prev, &ComplexMatrix::identity(x_k, x_k));
        residuals.push((format!("round {k} marginal"), max_abs(&(&lhs - rebuilt))));
        p = prev;
    }
    // Ground condition: tracing out Y(0) from P_0 leaves the identity.
    let y0 = shape.y_dim(0);
    let x0 = shape.x_dim(0);
    let lhs = partial_trace(&p, &[y0, x0], &[0]).expect("chain dims");
    let ground = max_abs(&(&lhs - ComplexMatrix::identity(x0, x0)));
    residuals.push(("round 0 input marginal".into(), ground));
    ValidationReport {
        psd_residual,
        residuals,
    }
}

/// Checks membership of a Hermitian operator in the set of co-strategy Choi
/// operators: positive semidefiniteness, the identity factor on the final
/// reply, the chain of marginal conditions, and unit trace at the ground
/// level.
pub fn validate_costrategy(b: &CoStrategyChoi) -> ValidationReport {
    let shape = b.shape();
    let r = shape.rounds();
    let psd_residual = (-min_eigenvalue(b.hermitian())).max(0.0);
    let mut residuals = Vec::new();

    // Split off the identity on the final reply Y(r-1): B = Q⊗I embedded.
    let choi_dims: Vec<usize> = shape
        .y_dims()
        .iter()
        .chain(shape.x_dims().iter())
        .copied()
        .collect();
    let y_last = shape.y_dim(r - 1);
    let mut q = partial_trace(b.matrix(), &choi_dims, &[r - 1]).expect("chain dims")
        / Complex64::new(y_last as f64, 0.0);
    let q_dims: Vec<usize> = choi_dims[..r - 1]
        .iter()
        .chain(&choi_dims[r..])
        .copied()
        .collect();
    let rebuilt = embed_identity(&q, &q_dims, r - 1, y_last).expect("chain dims");
    residuals.push((
        format!("identity factor on Y({})", r - 1),
        max_abs(&(b.matrix() - rebuilt)),
    ));

    // Chain: Q_k on Y(0..k)⊗X(0..=k); trace out X(k), compare against
    // Q_{k-1} with an identity re-inserted at Y(k-1).
    let mut dims = q_dims;
    for k in (1..r).rev() {
        let lhs = partial_trace(&q, &dims, &[dims.len() - 1]).expect("chain dims");
        let lhs_dims: Vec<usize> = dims[..dims.len() - 1].to_vec();
        let y_prev = shape.y_dim(k - 1);
        let prev = partial_trace(&lhs, &lhs_dims, &[k - 1]).expect("chain dims")
            / Complex64::new(y_prev as f64, 0.0);
        let prev_dims: Vec<usize> = lhs_dims[..k - 1]
            .iter()
            .chain(&lhs_dims[k..])
            .copied()
            .collect();
        let rebuilt = embed_identity(&prev, &prev_dims, k - 1, y_prev).expect("chain dims");
        residuals.push((format!("round {k} marginal"), max_abs(&(&lhs - rebuilt))));
        q = prev;
        dims = prev_dims;
    }

    // Ground condition: the first message is sent with a unit-trace state.
    residuals.push(("unit trace at round 0".into(), (q.trace().re - 1.0).abs()));
    ValidationReport {
        psd_residual,
        residuals,
    }
}

/// A purification of a strategy Choi operator: an explicit matrix from all
/// inputs to all outputs plus a memory register of the stated dimension,
/// rows flattened as `(y, z) = y·memory_dim + z`.
#[derive(Clone, Debug)]
pub struct Purification {
    shape: RoundShape,
    memory_dim: usize,
    map: ComplexMatrix,
}

/// A purification of a co-strategy Choi operator: a matrix from all replies
/// to all messages plus a memory register, rows flattened as
/// `(x, w) = x·memory_dim + w`.
#[derive(Clone, Debug)]
pub struct CoPurification {
    shape: RoundShape,
    memory_dim: usize,
    map: ComplexMatrix,
}

impl Purification {
    /// The composed isometry of a pure strategy, viewed as a purification.
    pub fn from_pure_strategy(a: &PureStrategy) -> Self {
        Self {
            shape: a.shape().clone(),
            memory_dim: a.final_memory_dim(),
            map: compose_strategy_isometry(a),
        }
    }

    /// Purifies a strategy Choi operator through its eigendecomposition; the
    /// memory dimension is the numerical rank. Fails if the operator is not
    /// positive semidefinite within [`tol::TOL_PSD`].
    pub fn from_choi(s: &StrategyChoi) -> Result<Self> {
        let shape = s.shape().clone();
        let (slices, rank) = psd_slices(s.hermitian())?;
        let y_total = shape.y_total();
        let x_total = shape.x_total();
        let mut map = ComplexMatrix::zeros(y_total * rank, x_total);
        for (a, s_a) in slices.iter().enumerate() {
            for y in 0..y_total {
                for x in 0..x_total {
                    map[(y * rank + a, x)] = s_a[y * x_total + x];
                }
            }
        }
        Ok(Self {
            shape,
            memory_dim: rank,
            map,
        })
    }

    /// Assembles a purification from explicit memory slices on the canonical
    /// outputs⊗inputs space, one per memory dimension.
    pub fn from_slices(shape: RoundShape, slices: &[ComplexVector]) -> Result<Self> {
        if slices.is_empty() {
            return Err(Error::InvalidInput("no memory slices".into()));
        }
        let y_total = shape.y_total();
        let x_total = shape.x_total();
        let memory_dim = slices.len();
        let mut map = ComplexMatrix::zeros(y_total * memory_dim, x_total);
        for (a, s_a) in slices.iter().enumerate() {
            if s_a.len() != y_total * x_total {
                return Err(Error::Dimension(format!(
                    "slice {a} has length {}, shape requires {}",
                    s_a.len(),
                    y_total * x_total
                )));
            }
            for y in 0..y_total {
                for x in 0..x_total {
                    map[(y * memory_dim + a, x)] = s_a[y * x_total + x];
                }
            }
        }
        Ok(Self {
            shape,
            memory_dim,
            map,
        })
    }

    pub fn shape(&self) -> &RoundShape {
        &self.shape
    }

    pub fn memory_dim(&self) -> usize {
        self.memory_dim
    }

    /// The purifying matrix itself; rows `(y, z)`, columns `x`.
    pub fn map(&self) -> &ComplexMatrix {
        &self.map
    }

    /// The memory-register slice `a` as a vector on the canonical
    /// outputs⊗inputs space.
    pub fn slice(&self, a: usize) -> ComplexVector {
        let y_total = self.shape.y_total();
        let x_total = self.shape.x_total();
        ComplexVector::from_fn(y_total * x_total, |i, _| {
            let y = i / x_total;
            let x = i % x_total;
            self.map[(y * self.memory_dim + a, x)]
        })
    }

    /// The Choi operator this purifies: the sum of outer products of the
    /// memory slices.
    pub fn choi(&self) -> StrategyChoi {
        let d = self.shape.choi_dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for a in 0..self.memory_dim {
            let s = self.slice(a);
            m += &s * s.adjoint();
        }
        StrategyChoi::new(
            self.shape.clone(),
            HermitianOperator::new(m).expect("sum of outer products"),
        )
        .expect("dimensions by construction")
    }

    /// Extends the memory register with unused dimensions.
    pub fn pad(&self, memory_dim: usize) -> Result<Self> {
        if memory_dim < self.memory_dim {
            return Err(Error::Shape(format!(
                "cannot pad memory from {} down to {memory_dim}",
                self.memory_dim
            )));
        }
        let y_total = self.shape.y_total();
        let x_total = self.shape.x_total();
        let mut map = ComplexMatrix::zeros(y_total * memory_dim, x_total);
        for y in 0..y_total {
            for a in 0..self.memory_dim {
                for x in 0..x_total {
                    map[(y * memory_dim + a, x)] = self.map[(y * self.memory_dim + a, x)];
                }
            }
        }
        Ok(Self {
            shape: self.shape.clone(),
            memory_dim,
            map,
        })
    }

    /// Compresses the memory register to the numerical rank of the purified
    /// operator, removing redundant directions.
    pub fn compress(&self) -> Self {
        let (slices, rank) = compress_slices(
            (0..self.memory_dim).map(|a| self.slice(a)).collect(),
            self.shape.choi_dim(),
        );
        let y_total = self.shape.y_total();
        let x_total = self.shape.x_total();
        let mut map = ComplexMatrix::zeros(y_total * rank, x_total);
        for (a, s_a) in slices.iter().enumerate() {
            for y in 0..y_total {
                for x in 0..x_total {
                    map[(y * rank + a, x)] = s_a[y * x_total + x];
                }
            }
        }
        Self {
            shape: self.shape.clone(),
            memory_dim: rank,
            map,
        }
    }
}

impl CoPurification {
    /// The composed isometry of a pure co-strategy, viewed as a
    /// purification.
    pub fn from_pure_costrategy(b: &PureCoStrategy) -> Self {
        Self {
            shape: b.shape().clone(),
            memory_dim: b.final_memory_dim(),
            map: compose_costrategy_isometry(b),
        }
    }

    /// Purifies a co-strategy Choi operator; the memory dimension is the
    /// numerical rank.
    pub fn from_choi(b: &CoStrategyChoi) -> Result<Self> {
        let shape = b.shape().clone();
        let (slices, rank) = psd_slices(b.hermitian())?;
        let y_total = shape.y_total();
        let x_total = shape.x_total();
        let mut map = ComplexMatrix::zeros(x_total * rank, y_total);
        for (j, b_j) in slices.iter().enumerate() {
            for y in 0..y_total {
                for x in 0..x_total {
                    map[(x * rank + j, y)] = b_j[y * x_total + x].conj();
                }
            }
        }
        Ok(Self {
            shape,
            memory_dim: rank,
            map,
        })
    }

    pub fn shape(&self) -> &RoundShape {
        &self.shape
    }

    pub fn memory_dim(&self) -> usize {
        self.memory_dim
    }

    /// The purifying matrix itself; rows `(x, w)`, columns `y`.
    pub fn map(&self) -> &ComplexMatrix {
        &self.map
    }

    /// The memory-register slice `j` as a vector on the canonical
    /// outputs⊗inputs space (the adjoint convention keeps the pairing with
    /// strategy slices sesquilinear in the right arguments).
    pub fn slice(&self, j: usize) -> ComplexVector {
        let y_total = self.shape.y_total();
        let x_total = self.shape.x_total();
        ComplexVector::from_fn(y_total * x_total, |i, _| {
            let y = i / x_total;
            let x = i % x_total;
            self.map[(x * self.memory_dim + j, y)].conj()
        })
    }

    /// The Choi operator this purifies.
    pub fn choi(&self) -> CoStrategyChoi {
        let d = self.shape.choi_dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for j in 0..self.memory_dim {
            let b = self.slice(j);
            m += &b * b.adjoint();
        }
        CoStrategyChoi::new(
            self.shape.clone(),
            HermitianOperator::new(m).expect("sum of outer products"),
        )
        .expect("dimensions by construction")
    }

    /// Compresses the memory register to the numerical rank of the purified
    /// operator.
    pub fn compress(&self) -> Self {
        let (slices, rank) = compress_slices(
            (0..self.memory_dim).map(|j| self.slice(j)).collect(),
            self.shape.choi_dim(),
        );
        let y_total = self.shape.y_total();
        let x_total = self.shape.x_total();
        let mut map = ComplexMatrix::zeros(x_total * rank, y_total);
        for (j, b_j) in slices.iter().enumerate() {
            for y in 0..y_total {
                for x in 0..x_total {
                    map[(x * rank + j, y)] = b_j[y * x_total + x].conj();
                }
            }
        }
        Self {
            shape: self.shape.clone(),
            memory_dim: rank,
            map,
        }
    }
}

/// Eigendecomposes a PSD operator into weighted eigenvector slices
/// `√λ_a·v_a`, dropping numerically absent directions. Fails when the
/// operator dips below PSD by more than [`tol::TOL_PSD`].
fn psd_slices(m: &HermitianOperator) -> Result<(Vec<ComplexVector>, usize)> {
    let (vals, vecs) = eigh(m);
    let min = vals.first().copied().unwrap_or(0.0);
    if min < -tol::TOL_PSD {
        return Err(Error::NotPositiveSemidefinite { min_eig: min });
    }
    let max = vals.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = RANK_CUTOFF * max.max(1.0);
    let mut slices = Vec::new();
    for (idx, &v) in vals.iter().enumerate().rev() {
        if v > cutoff {
            let col = vecs.column(idx);
            let w = v.max(0.0).sqrt();
            slices.push(ComplexVector::from_iterator(
                col.len(),
                col.iter().map(|c| c * Complex64::new(w, 0.0)),
            ));
        }
    }
    let rank = slices.len().max(1);
    while slices.len() < rank {
        slices.push(ComplexVector::zeros(m.dim()));
    }
    Ok((slices, rank))
}

/// Re-expresses a family of slices over a minimal memory register via a
/// singular value decomposition of the stacked slice matrix.
fn compress_slices(slices: Vec<ComplexVector>, dim: usize) -> (Vec<ComplexVector>, usize) {
    let k = slices.len();
    let mut g = ComplexMatrix::zeros(dim, k);
    for (j, s) in slices.iter().enumerate() {
        for i in 0..dim {
            g[(i, j)] = s[i];
        }
    }
    let svd = g.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = RANK_CUTOFF.sqrt() * smax.max(1.0);
    let mut out = Vec::new();
    for (a, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma > cutoff {
            let col = u.column(a);
            out.push(ComplexVector::from_iterator(
                col.len(),
                col.iter().map(|c| c * Complex64::new(sigma, 0.0)),
            ));
        }
    }
    if out.is_empty() {
        out.push(ComplexVector::zeros(dim));
    }
    let rank = out.len();
    (out, rank)
}

/// Contracts a strategy purification against a co-strategy purification to
/// produce the joint final state on `Z⊗W`, without running the interaction
/// round by round.
pub fn final_state_from_purifications(
    sp: &Purification,
    bp: &CoPurification,
) -> Result<ComplexVector> {
    if sp.shape() != bp.shape() {
        return Err(Error::Shape(
            "purifications have different round shapes".into(),
        ));
    }
    let y_total = sp.shape().y_total();
    let x_total = sp.shape().x_total();
    let z = sp.memory_dim();
    let w = bp.memory_dim();
    let mut psi = ComplexVector::zeros(z * w);
    for a in 0..z {
        for j in 0..w {
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..y_total {
                for x in 0..x_total {
                    acc += sp.map()[(y * z + a, x)] * bp.map()[(x * w + j, y)];
                }
            }
            psi[a * w + j] = acc;
        }
    }
    Ok(psi)
}

/// Enlarges the final memory register of a pure strategy by composing the
/// last round with an embedding isometry. The Choi operator is unchanged.
pub fn pad_final_memory(a: &PureStrategy, memory_dim: usize) -> Result<PureStrategy> {
    let z_last = a.final_memory_dim();
    if memory_dim < z_last {
        return Err(Error::Shape(format!(
            "cannot pad final memory from {z_last} down to {memory_dim}"
        )));
    }
    if memory_dim == z_last {
        return Ok(a.clone());
    }
    let r = a.shape().rounds();
    let y_last = a.shape().y_dim(r - 1);
    let mut v = ComplexMatrix::zeros(memory_dim, z_last);
    for i in 0..z_last {
        v[(i, i)] = C_ONE;
    }
    let grown = kron(&ComplexMatrix::identity(y_last, y_last), &v) * a.isometry(r - 1);
    let mut isometries: Vec<ComplexMatrix> = a.isometries().to_vec();
    isometries[r - 1] = grown;
    let mut memory_dims = a.memory_dims().to_vec();
    memory_dims[r - 1] = memory_dim;
    PureStrategy::new(a.shape().clone(), memory_dims, isometries)
}

/// Combines pure strategies into a single pure strategy whose Choi operator
/// is the weighted sum, by taking direct sums of the memory registers and
/// folding the weights into the first round.
pub fn mix_strategies(parts: &[(f64, PureStrategy)]) -> Result<PureStrategy> {
    if parts.is_empty() {
        return Err(Error::InvalidInput("empty mixture".into()));
    }
    let shape = parts[0].1.shape().clone();
    if parts.iter().any(|(_, a)| a.shape() != &shape) {
        return Err(Error::Shape("mixture members have different shapes".into()));
    }
    let total: f64 = parts.iter().map(|&(w, _)| w).sum();
    if parts.iter().any(|&(w, _)| w < -1e-12) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(
            "mixture weights must be nonnegative and sum to 1".into(),
        ));
    }
    let r = shape.rounds();
    let z_mix: Vec<usize> = (0..r)
        .map(|i| parts.iter().map(|(_, a)| a.memory_dims()[i]).sum())
        .collect();
    let mut isometries = Vec::with_capacity(r);
    for i in 0..r {
        let y = shape.y_dim(i);
        let x = shape.x_dim(i);
        let z_out = z_mix[i];
        let z_in = if i == 0 { 1 } else { z_mix[i - 1] };
        let mut m = ComplexMatrix::zeros(y * z_out, x * z_in);
        let mut off_out = 0usize;
        let mut off_in = 0usize;
        for (wt, a) in parts {
            let zo = a.memory_dims()[i];
            let zi = if i == 0 { 1 } else { a.memory_dims()[i - 1] };
            let block = a.isometry(i);
            let scale = if i == 0 {
                Complex64::new(wt.max(0.0).sqrt(), 0.0)
            } else {
                C_ONE
            };
            for yy in 0..y {
                for zz in 0..zo {
                    for xx in 0..x {
                        for zz_in in 0..zi {
                            m[(yy * z_out + off_out + zz, xx * z_in + off_in + zz_in)] =
                                scale * block[(yy * zo + zz, xx * zi + zz_in)];
                        }
                    }
                }
            }
            off_out += zo;
            if i > 0 {
                off_in += zi;
            }
        }
        isometries.push(m);
    }
    PureStrategy::new(shape, z_mix, isometries)
}

/// Applies a one-round Choi operator to an input state:
/// the channel action recovered from the Choi form.
pub fn apply_choi_channel(
    choi: &ComplexMatrix,
    y_dim: usize,
    x_dim: usize,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if choi.nrows() != y_dim * x_dim || choi.ncols() != y_dim * x_dim {
        return Err(Error::Dimension(format!(
            "Choi operator is {}x{}, expected {}",
            choi.nrows(),
            choi.ncols(),
            y_dim * x_dim
        )));
    }
    if rho.nrows() != x_dim || rho.ncols() != x_dim {
        return Err(Error::Dimension(format!(
            "input state is {}x{}, expected {x_dim}x{x_dim}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let iy = ComplexMatrix::identity(y_dim, y_dim);
    let sandwich = choi * kron(&iy, &rho.transpose());
    partial_trace(&sandwich, &[y_dim, x_dim], &[1])
}

/// Default memory dimensions for random strategies: grow with the registers
/// seen so far, capped at [`tol::MEMORY_CAP`], but never below what an
/// isometry requires.
pub fn default_strategy_memory(shape: &RoundShape) -> Vec<usize> {
    let mut dims = Vec::with_capacity(shape.rounds());
    let mut z_prev = 1usize;
    for i in 0..shape.rounds() {
        let x = shape.x_dim(i);
        let y = shape.y_dim(i);
        let needed = (x * z_prev).div_ceil(y);
        let grown = (z_prev * x * y).min(tol::MEMORY_CAP);
        let z = needed.max(grown);
        dims.push(z);
        z_prev = z;
    }
    dims
}

/// Default memory dimensions `w_0..w_r` for random co-strategies.
pub fn default_costrategy_memory(shape: &RoundShape) -> Vec<usize> {
    let r = shape.rounds();
    let mut dims = Vec::with_capacity(r + 1);
    dims.push(shape.x_dim(0));
    for i in 0..r {
        let y = shape.y_dim(i);
        let x_next = if i + 1 < r { shape.x_dim(i + 1) } else { 1 };
        let w_prev = dims[i];
        let needed = (y * w_prev).div_ceil(x_next);
        let grown = (w_prev * y * x_next).min(tol::MEMORY_CAP);
        dims.push(needed.max(grown));
    }
    dims
}

/// Draws a Haar-random pure strategy with the given (or default) memory
/// dimensions, deterministically from the seed.
pub fn random_pure_strategy(
    shape: &RoundShape,
    memory_dims: Option<&[usize]>,
    seed: u64,
) -> Result<PureStrategy> {
    let dims = match memory_dims {
        Some(d) => d.to_vec(),
        None => default_strategy_memory(shape),
    };
    if dims.len() != shape.rounds() {
        return Err(Error::Shape(format!(
            "expected {} memory dims, got {}",
            shape.rounds(),
            dims.len()
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut isometries = Vec::with_capacity(shape.rounds());
    let mut z_prev = 1usize;
    for i in 0..shape.rounds() {
        let rows = shape.y_dim(i) * dims[i];
        let cols = shape.x_dim(i) * z_prev;
        if rows < cols {
            return Err(Error::Shape(format!(
                "round {i}: memory dim {} leaves no isometry ({rows} rows < {cols} cols)",
                dims[i]
            )));
        }
        isometries.push(crate::linalg::haar_isometry(rows, cols, &mut rng)?);
        z_prev = dims[i];
    }
    PureStrategy::new(shape.clone(), dims, isometries)
}

/// Draws a Haar-random pure co-strategy with the given (or default) memory
/// dimensions `w_0..w_r`, deterministically from the seed.
pub fn random_pure_costrategy(
    shape: &RoundShape,
    memory_dims: Option<&[usize]>,
    seed: u64,
) -> Result<PureCoStrategy> {
    let r = shape.rounds();
    let dims = match memory_dims {
        Some(d) => d.to_vec(),
        None => default_costrategy_memory(shape),
    };
    if dims.len() != r + 1 {
        return Err(Error::Shape(format!(
            "expected {} memory dims, got {}",
            r + 1,
            dims.len()
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let beta_mat = crate::linalg::haar_isometry(shape.x_dim(0) * dims[0], 1, &mut rng)?;
    let beta = ComplexVector::from_iterator(beta_mat.nrows(), beta_mat.iter().copied());
    let mut isometries = Vec::with_capacity(r);
    for i in 0..r {
        let x_next = if i + 1 < r { shape.x_dim(i + 1) } else { 1 };
        let rows = x_next * dims[i + 1];
        let cols = shape.y_dim(i) * dims[i];
        if rows < cols {
            return Err(Error::Shape(format!(
                "round {i}: memory dim {} leaves no isometry ({rows} rows < {cols} cols)",
                dims[i + 1]
            )));
        }
        isometries.push(crate::linalg::haar_isometry(rows, cols, &mut rng)?);
    }
    PureCoStrategy::new(shape.clone(), dims, beta, isometries)
}

/// Draws the Kraus operators of a Haar-random channel from `x_dim` to
/// `y_dim` dimensions, deterministically from the seed: a random isometry
/// into `kraus_count` blocks, so `Σ E†E = I` holds exactly. Requires
/// `y_dim * kraus_count >= x_dim`.
pub fn random_channel_kraus(
    x_dim: usize,
    y_dim: usize,
    kraus_count: usize,
    seed: u64,
) -> Result<Vec<ComplexMatrix>> {
    if kraus_count == 0 {
        return Err(Error::InvalidInput("need at least one Kraus operator".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let v = crate::linalg::haar_isometry(y_dim * kraus_count, x_dim, &mut rng)?;
    Ok((0..kraus_count)
        .map(|k| {
            ComplexMatrix::from_fn(y_dim, x_dim, |y, x| v[(k * y_dim + y, x)])
        })
        .collect())
}

/// Builds the one-round strategy with trivial input (`x_dim = 1`) that emits
/// the given state on `Y(0)` and keeps a purifying register as memory, so its
/// Choi operator is exactly the state.
pub fn prepare_state_strategy(rho: &HermitianOperator) -> Result<PureStrategy> {
    if (rho.trace() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "state to prepare must have unit trace, got {}",
            rho.trace()
        )));
    }
    if min_eigenvalue(rho) < -tol::TOL_PSD {
        return Err(Error::InvalidInput(
            "state to prepare must be positive semidefinite".into(),
        ));
    }
    let y = rho.dim();
    let (vals, vecs) = eigh(rho);
    let kept: Vec<usize> = (0..y).filter(|&a| vals[a] > RANK_CUTOFF).collect();
    let z = kept.len().max(1);
    let mut v = ComplexMatrix::zeros(y * z, 1);
    for (slot, &a) in kept.iter().enumerate() {
        let amp = Complex64::new(vals[a].sqrt(), 0.0);
        for yy in 0..y {
            v[(yy * z + slot, 0)] = amp * vecs[(yy, a)];
        }
    }
    let shape = RoundShape::new(vec![1], vec![y])?;
    PureStrategy::new(shape, vec![z], vec![v])
}

/// Builds the one-round strategy that applies the channel with the given
/// Kraus operators, using the Stinespring dilation as the round isometry and
/// the dilating register as memory.
pub fn channel_strategy(x_dim: usize, y_dim: usize, kraus: &[ComplexMatrix]) -> Result<PureStrategy> {
    if kraus.is_empty() {
        return Err(Error::InvalidInput("channel needs at least one Kraus operator".into()));
    }
    let z = kraus.len();
    let mut v = ComplexMatrix::zeros(y_dim * z, x_dim);
    for (k, e) in kraus.iter().enumerate() {
        if e.nrows() != y_dim || e.ncols() != x_dim {
            return Err(Error::Dimension(format!(
                "Kraus operator {k} is {}x{}, expected {y_dim}x{x_dim}",
                e.nrows(),
                e.ncols()
            )));
        }
        for y in 0..y_dim {
            for x in 0..x_dim {
                v[(y * z + k, x)] = e[(y, x)];
            }
        }
    }
    let shape = RoundShape::new(vec![x_dim], vec![y_dim])?;
    PureStrategy::new(shape, vec![z], vec![v])
}
