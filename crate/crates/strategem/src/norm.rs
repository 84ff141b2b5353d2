//! The strategy norm: distinguishability of strategies by an interacting
//! party.
//!
//! For a Hermitian operator `H` on the Choi space of an `r`-round shape, the
//! strategy `r`-norm is
//!
//! ```text
//! ‖H‖ = max ⟨B₀ - B₁, H⟩   over  B₀, B₁ ⪰ 0,  B₀ + B₁ a co-strategy Choi.
//! ```
//!
//! Splitting a co-strategy Choi operator into the two parts that lead to
//! each measurement outcome is exactly what a distinguisher does, so for two
//! strategies with Choi operators `S` and `T` the quantity `‖S - T‖` plays
//! the role the trace norm plays for states: the best bias any interacting
//! party can reach when asked which of the two it was talking to is
//! `¼‖S - T‖` above coin flipping ([`distinguish_bias`]). For one-round
//! strategies with trivial input the norm collapses to the trace norm.
//!
//! [`strategy_norm`] solves the maximization as a semidefinite program: two
//! PSD variables `B₀`, `B₁` plus the chain of marginal variables `Q_k` that
//! carve out the co-strategy set, tied together by `B₀ + B₁ = Q ⊗ I`
//! embedded on the final reply. The chain builder is shared with the
//! fidelity module's inner minimization, which optimizes over the same set.
//! [`norm_vs_trace_distance_check`] replays the operational picture:
//! whatever co-strategy you sample, the trace distance of the two final
//! states it induces can only fall below the norm.

use crate::error::{Error, Result};
use crate::linalg::{trace_norm, ComplexMatrix, HermitianOperator};
use crate::registers::{embed_identity, RoundShape};
use crate::sdp::{op_identity, ObjCoef, ProgramBuilder, ScalarCoef, Sense, Var};
use crate::sdp::{ConicSolution, SolveOptions};
use crate::strategies::{
    random_pure_costrategy, reduced_final_state, strategy_choi, validate_costrategy,
    CoStrategyChoi, PureCoStrategy, PureStrategy,
};
use crate::tol;

/// The chain of marginal variables `Q_0 .. Q_{r-1}` that cuts out the
/// co-strategy Choi set inside a program: `Q_k` is PSD on
/// `Y(0..k)⊗X(0..=k)`, `tr Q_0 = 1`, and tracing the newest input out of
/// `Q_k` leaves `Q_{k-1}` with an identity reply factor re-inserted. The
/// full co-strategy operator is `Q_{r-1} ⊗ I` embedded on the final reply.
pub(crate) struct CoStrategyChain {
    pub qs: Vec<Var>,
    pub last_dims: Vec<usize>,
    pub embed_pos: usize,
    pub y_last: usize,
}

impl CoStrategyChain {
    /// The linear image of the chain's top variable that equals the
    /// co-strategy Choi operator.
    pub fn embed_top(&self, q_top: &ComplexMatrix) -> ComplexMatrix {
        embed_identity(q_top, &self.last_dims, self.embed_pos, self.y_last).expect("chain dims")
    }
}

/// Dimension list of `Q_k`: the replies `Y(0..k)` followed by the messages
/// `X(0..=k)`.
fn chain_dims(shape: &RoundShape, k: usize) -> Vec<usize> {
    let mut dims: Vec<usize> = (0..k).map(|j| shape.y_dim(j)).collect();
    dims.extend((0..=k).map(|j| shape.x_dim(j)));
    dims
}

/// Adds the co-strategy chain variables and their marginal constraints to a
/// program, returning the variable handles.
pub(crate) fn add_costrategy_chain(
    pb: &mut ProgramBuilder,
    shape: &RoundShape,
) -> Result<CoStrategyChain> {
    let r = shape.rounds();
    let mut qs = Vec::with_capacity(r);
    for k in 0..r {
        let dim: usize = chain_dims(shape, k).iter().product();
        qs.push(pb.psd_herm(format!("Q{k}"), dim));
    }
    let x0 = shape.x_dim(0);
    pb.scalar_constraint(
        vec![(qs[0], ScalarCoef::Matrix(ComplexMatrix::identity(x0, x0)))],
        1.0,
    )?;
    for k in 1..r {
        let dims = chain_dims(shape, k);
        let prev_dims = chain_dims(shape, k - 1);
        let y_prev = shape.y_dim(k - 1);
        let traced_dim: usize = prev_dims.iter().product::<usize>() * y_prev;
        let trace_pos = dims.len() - 1;
        let trace_newest: crate::sdp::MatOp = Box::new(move |h: &ComplexMatrix| {
            crate::linalg::partial_trace(h, &dims, &[trace_pos]).expect("chain dims")
        });
        let minus_embed_prev: crate::sdp::MatOp = Box::new(move |h: &ComplexMatrix| {
            -embed_identity(h, &prev_dims, k - 1, y_prev).expect("chain dims")
        });
        pb.matrix_constraint(
            traced_dim,
            vec![(qs[k], trace_newest), (qs[k - 1], minus_embed_prev)],
            &ComplexMatrix::zeros(traced_dim, traced_dim),
        )?;
    }
    Ok(CoStrategyChain {
        qs,
        last_dims: chain_dims(shape, r - 1),
        embed_pos: r - 1,
        y_last: shape.y_dim(r - 1),
    })
}

/// The solved norm program: the optimum and the measurement that attains it.
#[derive(Clone, Debug)]
pub struct NormResult {
    /// The strategy norm `max ⟨B₀ - B₁, H⟩`.
    pub value: f64,
    /// Optimal outcome operator for "it was the first one".
    pub b0: HermitianOperator,
    /// Optimal outcome operator for "it was the second one".
    pub b1: HermitianOperator,
    /// Certified conic solution behind the reported value.
    pub solver: ConicSolution,
}

impl NormResult {
    /// The optimal interrogation as a co-strategy Choi operator,
    /// `B₀ + B₁`.
    pub fn costrategy(&self, shape: &RoundShape) -> Result<CoStrategyChoi> {
        let sum = HermitianOperator::new(self.b0.matrix() + self.b1.matrix())?;
        CoStrategyChoi::new(shape.clone(), sum)
    }
}

/// Computes the strategy `r`-norm of a Hermitian operator on the Choi space
/// of `shape` by semidefinite programming.
pub fn strategy_norm(
    h: &HermitianOperator,
    shape: &RoundShape,
    opts: &SolveOptions,
) -> Result<NormResult> {
    let n = shape.choi_dim();
    if h.dim() != n {
        return Err(Error::Dimension(format!(
            "operator has dimension {}, shape requires {n}",
            h.dim()
        )));
    }
    let mut pb = ProgramBuilder::new();
    let b0 = pb.psd_herm("B0", n);
    let b1 = pb.psd_herm("B1", n);
    let chain = add_costrategy_chain(&mut pb, shape)?;
    let q_top = chain.qs[shape.rounds() - 1];
    let last_dims = chain.last_dims.clone();
    let y_last = chain.y_last;
    let pos = shape.rounds() - 1;
    let minus_embed: crate::sdp::MatOp = Box::new(move |q: &ComplexMatrix| {
        -embed_identity(q, &last_dims, pos, y_last).expect("chain dims")
    });
    pb.matrix_constraint(
        n,
        vec![
            (b0, op_identity()),
            (b1, op_identity()),
            (q_top, minus_embed),
        ],
        &ComplexMatrix::zeros(n, n),
    )?;
    pb.set_objective(
        Sense::Maximize,
        vec![
            (b0, ObjCoef::Matrix(h.matrix().clone())),
            (b1, ObjCoef::Matrix(-h.matrix())),
        ],
    );
    let sol = pb.solve(opts)?;
    sol.require_optimal("strategy norm")?;
    let b0 = HermitianOperator::new(sol.herm(b0))?;
    let b1 = HermitianOperator::new(sol.herm(b1))?;
    let result = NormResult {
        value: sol.objective_value().max(0.0),
        b0,
        b1,
        solver: sol.conic().clone(),
    };
    let report = validate_costrategy(&result.costrategy(shape)?);
    if !report.passes(tol::TOL_FEAS) {
        return Err(Error::Solver(format!(
            "optimal measurement drifts off the co-strategy set by {:.3e}",
            report.max_residual()
        )));
    }
    Ok(result)
}

/// [`strategy_norm`] of the difference of two strategies given as pure
/// strategies, `‖S - T‖`.
pub fn strategy_norm_of_difference(
    s: &PureStrategy,
    t: &PureStrategy,
    opts: &SolveOptions,
) -> Result<NormResult> {
    if s.shape() != t.shape() {
        return Err(Error::Shape(
            "strategies have different round shapes".into(),
        ));
    }
    let sc = strategy_choi(s);
    let tc = strategy_choi(t);
    let diff = HermitianOperator::new(sc.matrix() - tc.matrix())?;
    strategy_norm(&diff, s.shape(), opts)
}

/// The best probability of guessing which of two equally likely strategies
/// one is interacting with: `½ + ¼‖S - T‖`.
pub fn distinguish_bias(
    s: &PureStrategy,
    t: &PureStrategy,
    opts: &SolveOptions,
) -> Result<f64> {
    let norm = strategy_norm_of_difference(s, t, opts)?;
    Ok(0.5 + 0.25 * norm.value)
}

/// Outcome of sampling co-strategies against the norm of `S - T`: every
/// sampled interrogation induces two final states whose trace distance is a
/// lower bound on the norm.
#[derive(Clone, Debug)]
pub struct TraceDistanceReport {
    /// The strategy norm from the semidefinite program.
    pub sdp_value: f64,
    /// Largest sampled trace distance.
    pub best_sampled: f64,
    /// Number of sampled co-strategies.
    pub samples: usize,
    /// Largest amount by which a sample exceeded the norm; anything beyond
    /// solver tolerance here would contradict optimality.
    pub max_excess: f64,
}

/// Samples random co-strategies, plays each against `s` and `t`, and checks
/// that the trace distances of the induced final states stay below the norm
/// from [`strategy_norm_of_difference`].
pub fn norm_vs_trace_distance_check(
    s: &PureStrategy,
    t: &PureStrategy,
    samples: usize,
    seed: u64,
    opts: &SolveOptions,
) -> Result<TraceDistanceReport> {
    let norm = strategy_norm_of_difference(s, t, opts)?;
    let mut best = 0.0f64;
    let mut max_excess = 0.0f64;
    for i in 0..samples {
        let b = random_pure_costrategy(s.shape(), None, seed.wrapping_add(i as u64))?;
        let rho_s = reduced_final_state(s, &b)?;
        let rho_t = reduced_final_state(t, &b)?;
        let dist = trace_norm(&(rho_s.matrix() - rho_t.matrix()));
        best = best.max(dist);
        max_excess = max_excess.max(dist - norm.value);
    }
    Ok(TraceDistanceReport {
        sdp_value: norm.value,
        best_sampled: best,
        samples,
        max_excess,
    })
}

/// The trace distance achieved by one specific co-strategy, for building
/// explicit distinguishers in tests and examples.
pub fn sampled_trace_distance(
    s: &PureStrategy,
    t: &PureStrategy,
    b: &PureCoStrategy,
) -> Result<f64> {
    let rho_s = reduced_final_state(s, b)?;
    let rho_t = reduced_final_state(t, b)?;
    Ok(trace_norm(&(rho_s.matrix() - rho_t.matrix())))
}

/// Plays the norm program's own optimal measurement `(B₀, B₁)` against the
/// Choi operator `H` it was solved for, recovering the objective; used to
/// confirm the reported optimum is attained by the returned witness.
pub fn witness_value(result: &NormResult, h: &HermitianOperator) -> f64 {
    ((result.b0.matrix() - result.b1.matrix()).adjoint() * h.matrix())
        .trace()
        .re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, min_eigenvalue, partial_trace, random_density, ComplexVector};
    use crate::strategies::{channel_strategy, costrategy_choi, interact, random_pure_strategy};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real_vector(entries: &[f64]) -> ComplexVector {
        ComplexVector::from_iterator(entries.len(), entries.iter().map(|&v| c(v, 0.0)))
    }

    fn qubit_shape(rounds: usize) -> RoundShape {
        RoundShape::new(vec![2; rounds], vec![2; rounds]).unwrap()
    }

    fn identity_strategy() -> PureStrategy {
        channel_strategy(2, 2, &[ComplexMatrix::identity(2, 2)]).unwrap()
    }

    fn bitflip_strategy() -> PureStrategy {
        let x = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        );
        channel_strategy(2, 2, &[x]).unwrap()
    }

    fn bell_input_costrategy() -> PureCoStrategy {
        let beta = real_vector(&[0.5f64.sqrt(), 0.0, 0.0, 0.5f64.sqrt()]);
        PureCoStrategy::new(
            qubit_shape(1),
            vec![2, 4],
            beta,
            vec![ComplexMatrix::identity(4, 4)],
        )
        .unwrap()
    }

    #[test]
    fn zero_operator_has_zero_norm() {
        let shape = qubit_shape(1);
        let h = HermitianOperator::new(ComplexMatrix::zeros(4, 4)).unwrap();
        let res = strategy_norm(&h, &shape, &SolveOptions::default()).unwrap();
        assert!(res.value.abs() < 1e-8, "norm of 0 was {}", res.value);
    }

    #[test]
    fn identical_strategies_have_zero_distance() {
        let shape = qubit_shape(2);
        let a = random_pure_strategy(&shape, None, 7).unwrap();
        let res = strategy_norm_of_difference(&a, &a, &SolveOptions::default()).unwrap();
        assert!(res.value.abs() < 1e-7, "‖S-S‖ was {}", res.value);
    }

    #[test]
    fn identity_and_bitflip_are_perfectly_distinguishable() {
        let a = identity_strategy();
        let b = bitflip_strategy();
        let res = strategy_norm_of_difference(&a, &b, &SolveOptions::default()).unwrap();
        assert!(
            (res.value - 2.0).abs() < tol::TOL_VALUE,
            "‖S-T‖ was {}",
            res.value
        );

        // Independent witness: send half of a Bell pair, keep the other
        // half. The two channels then produce orthogonal final states.
        let dist = sampled_trace_distance(&a, &b, &bell_input_costrategy()).unwrap();
        assert!((dist - 2.0).abs() < 1e-9, "Bell witness gave {dist}");
        assert!(dist <= res.value + 1e-6);

        let bias = distinguish_bias(&a, &b, &SolveOptions::default()).unwrap();
        assert!((bias - 1.0).abs() < tol::TOL_VALUE);
    }

    #[test]
    fn bell_witness_final_states_are_orthogonal() {
        let psi_a = interact(&identity_strategy(), &bell_input_costrategy()).unwrap();
        let psi_b = interact(&bitflip_strategy(), &bell_input_costrategy()).unwrap();
        let overlap: Complex64 = psi_a.dotc(&psi_b);
        assert!(overlap.norm() < 1e-12);
    }

    #[test]
    fn norm_is_homogeneous_and_even() {
        let shape = qubit_shape(1);
        let a = random_pure_strategy(&shape, None, 21).unwrap();
        let b = random_pure_strategy(&shape, None, 22).unwrap();
        let diff = HermitianOperator::new(
            strategy_choi(&a).matrix() - strategy_choi(&b).matrix(),
        )
        .unwrap();
        let opts = SolveOptions::default();
        let base = strategy_norm(&diff, &shape, &opts).unwrap().value;
        let scaled = HermitianOperator::new(diff.matrix() * c(2.5, 0.0)).unwrap();
        let double = strategy_norm(&scaled, &shape, &opts).unwrap().value;
        assert!((double - 2.5 * base).abs() < 1e-6 * (1.0 + base));
        let negated = HermitianOperator::new(-diff.matrix()).unwrap();
        let neg = strategy_norm(&negated, &shape, &opts).unwrap().value;
        assert!((neg - base).abs() < 1e-6 * (1.0 + base));
    }

    #[test]
    fn strategy_differences_stay_within_two() {
        let shape = RoundShape::new(vec![2, 2], vec![2, 2]).unwrap();
        let opts = SolveOptions::default();
        for seed in [3u64, 4] {
            let a = random_pure_strategy(&shape, None, seed).unwrap();
            let b = random_pure_strategy(&shape, None, 50 + seed).unwrap();
            let res = strategy_norm_of_difference(&a, &b, &opts).unwrap();
            assert!(res.value >= -1e-9);
            assert!(res.value <= 2.0 + 1e-6, "norm {} above 2", res.value);
            let sc = strategy_choi(&a);
            let diff = HermitianOperator::new(sc.matrix() - strategy_choi(&b).matrix()).unwrap();
            let attained = witness_value(&res, &diff);
            assert!((attained - res.value).abs() < 1e-6);
        }
    }

    #[test]
    fn sampled_interrogations_never_beat_the_norm() {
        let shape = RoundShape::new(vec![2, 2], vec![2, 2]).unwrap();
        let a = random_pure_strategy(&shape, None, 31).unwrap();
        let b = random_pure_strategy(&shape, None, 32).unwrap();
        let report =
            norm_vs_trace_distance_check(&a, &b, 12, 99, &SolveOptions::default()).unwrap();
        assert!(report.max_excess < 1e-6, "sample exceeded norm by {}", report.max_excess);
        assert!(report.best_sampled <= report.sdp_value + 1e-6);
        assert!(report.best_sampled >= 0.0);
    }

    #[test]
    fn one_round_trivial_input_norm_is_trace_norm() {
        // With x = 1 a co-strategy is just a unit-trace PSD W-extension, so
        // the strategy norm of a difference of states is their trace norm.
        let shape = RoundShape::new(vec![1], vec![2]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let rho = random_density(2, 2, &mut rng).unwrap();
        let sigma = random_density(2, 2, &mut rng).unwrap();
        let diff = HermitianOperator::new(rho.matrix() - sigma.matrix()).unwrap();
        let res = strategy_norm(&diff, &shape, &SolveOptions::default()).unwrap();
        let direct = trace_norm(&(rho.matrix() - sigma.matrix()));
        assert!(
            (res.value - direct).abs() < tol::TOL_VALUE,
            "norm {} vs trace norm {direct}",
            res.value
        );
    }

    #[test]
    fn optimal_measurement_is_a_split_costrategy() {
        let a = identity_strategy();
        let b = bitflip_strategy();
        let res = strategy_norm_of_difference(&a, &b, &SolveOptions::default()).unwrap();
        let sum = res.costrategy(a.shape()).unwrap();
        assert!(validate_costrategy(&sum).passes(tol::TOL_FEAS));
        assert!(min_eigenvalue(&res.b0) > -1e-8);
        assert!(min_eigenvalue(&res.b1) > -1e-8);
    }

    #[test]
    fn chain_embedding_matches_costrategy_choi() {
        let shape = RoundShape::new(vec![2, 2], vec![2, 2]).unwrap();
        let chain_dims_top = chain_dims(&shape, 1);
        assert_eq!(chain_dims_top, vec![2, 2, 2]);
        let b = random_pure_costrategy(&shape, None, 17).unwrap();
        let bc = costrategy_choi(&b);
        // Recover Q_top from the Choi operator and re-embed it.
        let choi_dims = vec![2usize, 2, 2, 2];
        let q = partial_trace(bc.matrix(), &choi_dims, &[1]).unwrap() / c(2.0, 0.0);
        let rebuilt = embed_identity(&q, &chain_dims_top, 1, 2).unwrap();
        assert!(max_abs(&(bc.matrix() - rebuilt)) < 1e-10);
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let shape = qubit_shape(1);
        let h = HermitianOperator::new(ComplexMatrix::identity(3, 3)).unwrap();
        assert!(strategy_norm(&h, &shape, &SolveOptions::default()).is_err());
    }

    #[test]
    fn norm_of_a_single_strategy_is_one() {
        let shape = qubit_shape(1);
        let a = random_pure_strategy(&shape, None, 12).unwrap();
        let sc = strategy_choi(&a);
        let res =
            strategy_norm(sc.hermitian(), &shape, &SolveOptions::default()).unwrap();
        assert!(
            (res.value - 1.0).abs() < tol::TOL_VALUE,
            "‖S‖ was {}",
            res.value
        );
    }
}
