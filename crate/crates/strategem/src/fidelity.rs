//! Strategy fidelity: semidefinite characterization, independent oracle
//! bracket, and the fidelity-based inequalities.
//!
//! The fidelity of two strategies generalizes the state fidelity to full
//! interactions. Fix purifications `S̃`, `T̃` of the two Choi operators with
//! a common final memory register `Z`. Then
//!
//! ```text
//! F(S, T)  =  max    min  Re ⟨⟨S̃| (K ⊗ B) |T̃⟩⟩
//!            ‖K‖≤1    B
//! ```
//!
//! where `B` ranges over co-strategy Choi operators and `K` acts on the
//! final memory. The value does not depend on the chosen purifications, and
//! for one-round strategies with trivial input (states sent with no question
//! asked) it collapses to the usual, unsquared state fidelity. Against any
//! fixed co-strategy the fidelity of the two induced final states can only
//! exceed `F(S, T)`, which is what makes the quantity operational: it is the
//! worst-case closeness over everything an interacting party could do.
//!
//! [`strategy_fidelity`] computes the max-min as a single semidefinite
//! program: maximize `t` subject to a chain of Hermitian witnesses `R_j`
//! whose partial traces dominate each other round by round, capped by
//! `R_{r-1} ⪯ C(K)` with `C(K) = ½(Σ_{a,b} K[a,b]·t_b s_a† + h.c.)`, while a
//! block constraint `[[I, K], [K†, I]] ⪰ 0` keeps `K` in the unit ball.
//! [`inner_min_over_costrategies`] solves the inner minimization alone, in
//! both its primal form over the co-strategy set and its dual chain form,
//! and asserts that the two agree. That exact inner solve powers
//! [`strategy_fidelity_oracle`], a cutting-plane search over `K` whose
//! every evaluation is a certified lower bound, paired with co-strategy
//! play whose every evaluation is an upper bound, so the oracle reports a
//! bracket that must contain the true value.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    clamp_psd, kron, max_abs, min_eigenvalue, op_norm, partial_trace, sqrt_psd, state_fidelity,
    trace_norm, ComplexMatrix, ComplexVector, HermitianOperator,
};
use crate::norm::{add_costrategy_chain, strategy_norm_of_difference};
use crate::registers::{permute_matrix_factors, RoundShape};
use crate::sdp::{
    op_identity, op_neg, op_scalar_identity, ConicSolution, MatOp, ObjCoef, ProgramBuilder,
    ScalarCoef, Sense, SolveOptions, Var,
};
use crate::strategies::{
    mix_strategies, pad_final_memory, random_pure_costrategy, reduced_final_state,
    CoStrategyChoi, Purification, PureStrategy, StrategyChoi,
};
use crate::tol;

/// The solved fidelity program: the value, the interpolating operator on the
/// final memory, and the witness chain certifying optimality.
#[derive(Clone, Debug)]
pub struct FidelityResult {
    /// The strategy fidelity `F(S, T)`, the optimum of the semidefinite
    /// characterization. For one-round no-input strategies this equals the
    /// state fidelity of the two prepared states.
    pub value: f64,
    /// The squared fidelity `value²`, the quantity the interactive cheating
    /// bounds consume.
    pub sdp_optimum: f64,
    /// Optimal interpolating operator `K` on the common final memory, inside
    /// the unit operator-norm ball.
    pub optimal_k: ComplexMatrix,
    /// The chain witnesses `R_0 .. R_{r-1}` from the solved program.
    pub witnesses: Vec<ComplexMatrix>,
    /// Certified conic solution behind the reported value.
    pub solver: ConicSolution,
}

/// Computes the strategy fidelity of two pure strategies. Final memories are
/// padded to a common dimension first; padding extends a purification with
/// unused directions and leaves both Choi operators untouched.
pub fn strategy_fidelity(
    s: &PureStrategy,
    t: &PureStrategy,
    opts: &SolveOptions,
) -> Result<FidelityResult> {
    if s.shape() != t.shape() {
        return Err(Error::Shape(
            "strategies have different round shapes".into(),
        ));
    }
    let z = s.final_memory_dim().max(t.final_memory_dim());
    let sp = Purification::from_pure_strategy(&pad_final_memory(s, z)?);
    let tp = Purification::from_pure_strategy(&pad_final_memory(t, z)?);
    strategy_fidelity_purified(&sp, &tp, opts)
}

/// [`strategy_fidelity`] for strategies given by their Choi operators, which
/// are purified through their eigendecompositions.
pub fn strategy_fidelity_choi(
    s: &StrategyChoi,
    t: &StrategyChoi,
    opts: &SolveOptions,
) -> Result<FidelityResult> {
    if s.shape() != t.shape() {
        return Err(Error::Shape(
            "strategies have different round shapes".into(),
        ));
    }
    let sp = Purification::from_choi(s)?;
    let tp = Purification::from_choi(t)?;
    strategy_fidelity_purified(&sp, &tp, opts)
}

/// The core fidelity program, stated on two explicit purifications. Memory
/// registers are padded to a common dimension if they differ.
pub fn strategy_fidelity_purified(
    sp: &Purification,
    tp: &Purification,
    opts: &SolveOptions,
) -> Result<FidelityResult> {
    if sp.shape() != tp.shape() {
        return Err(Error::Shape(
            "purifications have different round shapes".into(),
        ));
    }
    let z = sp.memory_dim().max(tp.memory_dim());
    let sp = sp.pad(z)?;
    let tp = tp.pad(z)?;
    let shape = sp.shape().clone();
    let n = shape.choi_dim();
    let outers = cross_outer(&slices_of(&sp), &slices_of(&tp));

    let mut pb = ProgramBuilder::new();
    let rs = add_witness_chain(&mut pb, &shape)?;
    let top_slack = pb.psd_herm("C_slack", n);
    let p = pb.psd_herm("P", 2 * z);

    // Pinning both diagonal blocks of the PSD variable P to the identity
    // caps its off-diagonal block, the interpolating operator K, at unit
    // operator norm.
    let eye = ComplexMatrix::identity(z, z);
    let upper_left: MatOp = Box::new(move |h: &ComplexMatrix| h.view((0, 0), (z, z)).into_owned());
    let lower_right: MatOp = Box::new(move |h: &ComplexMatrix| h.view((z, z), (z, z)).into_owned());
    pb.matrix_constraint(z, vec![(p, upper_left)], &eye)?;
    pb.matrix_constraint(z, vec![(p, lower_right)], &eye)?;

    // Top of the chain: R_{r-1} + slack = C(K), with K read off P.
    let minus_c_of_k: MatOp = Box::new(move |h: &ComplexMatrix| {
        let mut d = ComplexMatrix::zeros(n, n);
        for a in 0..z {
            for b in 0..z {
                let v = h[(a, z + b)];
                if v != Complex64::new(0.0, 0.0) {
                    d += &outers[a][b] * v;
                }
            }
        }
        (&d + d.adjoint()) * Complex64::new(-0.5, 0.0)
    });
    let r_top = *rs.last().expect("at least one round");
    pb.matrix_constraint(
        n,
        vec![
            (r_top, op_identity()),
            (top_slack, op_identity()),
            (p, minus_c_of_k),
        ],
        &ComplexMatrix::zeros(n, n),
    )?;

    let sol = pb.solve(opts)?;
    sol.require_optimal("strategy fidelity")?;
    let p_val = sol.herm(p);
    let optimal_k = p_val.view((0, z), (z, z)).into_owned();
    let k_norm = op_norm(&optimal_k);
    if k_norm > 1.0 + tol::TOL_FEAS {
        return Err(Error::Solver(format!(
            "interpolating operator escapes the unit ball: norm {k_norm}"
        )));
    }
    let value = sol.objective_value();
    Ok(FidelityResult {
        value,
        sdp_optimum: value * value,
        optimal_k,
        witnesses: rs.iter().map(|&r| sol.herm(r)).collect(),
        solver: sol.conic().clone(),
    })
}

/// The bilinear overlap `⟨⟨S̃|(K ⊗ B)|T̃⟩⟩ = Σ_{a,b} K[a,b] · s_a† B t_b`,
/// where `s_a`, `t_b` are the memory slices of the two purifications. For
/// any purification `B̃` of `b` this equals the inner product
/// `⟨ψ(S̃,B̃)|(K ⊗ I_W)|ψ(T̃,B̃)⟩` of the joint final states.
pub fn bilinear_overlap(
    s: &PureStrategy,
    t: &PureStrategy,
    k: &ComplexMatrix,
    b: &CoStrategyChoi,
) -> Result<Complex64> {
    let sp = Purification::from_pure_strategy(s);
    let tp = Purification::from_pure_strategy(t);
    bilinear_overlap_purified(&sp, &tp, k, b)
}

/// [`bilinear_overlap`] stated on explicit purifications.
pub fn bilinear_overlap_purified(
    sp: &Purification,
    tp: &Purification,
    k: &ComplexMatrix,
    b: &CoStrategyChoi,
) -> Result<Complex64> {
    if sp.shape() != tp.shape() || sp.shape() != b.shape() {
        return Err(Error::Shape(
            "purifications and co-strategy have different round shapes".into(),
        ));
    }
    if k.nrows() != sp.memory_dim() || k.ncols() != tp.memory_dim() {
        return Err(Error::Dimension(format!(
            "K is {}x{}, memories require {}x{}",
            k.nrows(),
            k.ncols(),
            sp.memory_dim(),
            tp.memory_dim()
        )));
    }
    let m = overlap_matrix(sp, tp, b.matrix());
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..k.nrows() {
        for bb in 0..k.ncols() {
            acc += k[(a, bb)] * m[(a, bb)];
        }
    }
    Ok(acc)
}

/// The inner minimization at a fixed interpolating operator, solved both
/// ways: the primal over the co-strategy set and the dual witness chain.
#[derive(Clone, Debug)]
pub struct InnerMinimum {
    /// Primal optimum `φ(K) = min_B Re ⟨⟨S̃|(K ⊗ B)|T̃⟩⟩`.
    pub phi: f64,
    /// Dual optimum `α(K)`; agreement with `phi` is asserted before this
    /// struct is returned.
    pub alpha: f64,
    /// The minimizing co-strategy.
    pub best_costrategy: CoStrategyChoi,
    /// Certified solution of the primal program.
    pub primal: ConicSolution,
    /// Certified solution of the dual chain program.
    pub dual: ConicSolution,
}

/// Minimizes `Re ⟨⟨S̃|(K ⊗ B)|T̃⟩⟩` over co-strategy Choi operators `B` for a
/// fixed `K` in the unit ball, and cross-checks the optimum against the dual
/// chain program.
pub fn inner_min_over_costrategies(
    s: &PureStrategy,
    t: &PureStrategy,
    k: &ComplexMatrix,
    opts: &SolveOptions,
) -> Result<InnerMinimum> {
    if s.shape() != t.shape() {
        return Err(Error::Shape(
            "strategies have different round shapes".into(),
        ));
    }
    let sp = Purification::from_pure_strategy(s);
    let tp = Purification::from_pure_strategy(t);
    inner_min_over_costrategies_purified(&sp, &tp, k, opts)
}

/// [`inner_min_over_costrategies`] stated on explicit purifications.
pub fn inner_min_over_costrategies_purified(
    sp: &Purification,
    tp: &Purification,
    k: &ComplexMatrix,
    opts: &SolveOptions,
) -> Result<InnerMinimum> {
    if sp.shape() != tp.shape() {
        return Err(Error::Shape(
            "purifications have different round shapes".into(),
        ));
    }
    if k.nrows() != sp.memory_dim() || k.ncols() != tp.memory_dim() {
        return Err(Error::Dimension(format!(
            "K is {}x{}, memories require {}x{}",
            k.nrows(),
            k.ncols(),
            sp.memory_dim(),
            tp.memory_dim()
        )));
    }
    let norm = op_norm(k);
    if norm > 1.0 + tol::TOL_FEAS {
        return Err(Error::InvalidInput(format!(
            "K must lie in the unit ball, got norm {norm}"
        )));
    }
    let c = c_of_k(&cross_outer(&slices_of(sp), &slices_of(tp)), k);
    let (phi, best_costrategy, primal) = inner_primal(sp.shape(), &c, opts)?;
    let (alpha, dual) = inner_dual(sp.shape(), &c, opts)?;
    let gap = (phi - alpha).abs();
    if gap > tol::TOL_FEAS {
        return Err(Error::DualityGap {
            gap,
            tol: tol::TOL_FEAS,
        });
    }
    Ok(InnerMinimum {
        phi,
        alpha,
        best_costrategy,
        primal,
        dual,
    })
}

/// The fidelity of the two final states a fixed co-strategy steers the
/// interaction into; by the max-min characterization this is always at least
/// the strategy fidelity.
pub fn costrategy_output_fidelity(
    s: &PureStrategy,
    t: &PureStrategy,
    b: &CoStrategyChoi,
) -> Result<f64> {
    let sp = Purification::from_pure_strategy(s);
    let tp = Purification::from_pure_strategy(t);
    costrategy_output_fidelity_purified(&sp, &tp, b)
}

/// [`costrategy_output_fidelity`] stated on explicit purifications. The
/// value equals the trace norm of the overlap matrix `M[a,b] = s_a† B t_b`,
/// which is how it is computed.
pub fn costrategy_output_fidelity_purified(
    sp: &Purification,
    tp: &Purification,
    b: &CoStrategyChoi,
) -> Result<f64> {
    if sp.shape() != tp.shape() || sp.shape() != b.shape() {
        return Err(Error::Shape(
            "purifications and co-strategy have different round shapes".into(),
        ));
    }
    Ok(trace_norm(&overlap_matrix(sp, tp, b.matrix())))
}

/// A two-sided bracket on the strategy fidelity from the cutting-plane
/// oracle.
#[derive(Clone, Copy, Debug)]
pub struct FidelityBracket {
    /// Best certified lower bound: the largest exact inner minimum over the
    /// interpolating operators the search visited.
    pub lower: f64,
    /// Best certified upper bound: the smallest value over output
    /// fidelities of co-strategies played and master optima over their
    /// convex hull.
    pub upper: f64,
    /// Number of inner semidefinite solves spent.
    pub evaluations: usize,
}

impl FidelityBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.lower - slack && value <= self.upper + slack
    }
}

/// Brackets the strategy fidelity without the joint program, as an
/// independent check on [`strategy_fidelity`].
///
/// The search alternates two certified moves. Evaluating the exact inner
/// minimum at the current interpolating operator `K` yields a lower bound
/// together with the minimizing co-strategy, whose overlap matrix is one
/// linear piece of the concave objective. A small master program then
/// maximizes, over the unit ball, the minimum of the pieces collected so
/// far; because each piece comes from a genuine co-strategy and the
/// objective is linear in the co-strategy, that optimum is an upper bound,
/// and its maximizer is the next `K` to evaluate. Cuts accumulate in the
/// manner of Kelley's method and the bracket tightens from both sides,
/// with randomly sampled co-strategies adding independent upper bounds at
/// the end. `budget` caps the number of inner solves; the bracket of the
/// achieved width is returned when it runs out.
pub fn strategy_fidelity_oracle(
    s: &PureStrategy,
    t: &PureStrategy,
    budget: usize,
    seed: u64,
    opts: &SolveOptions,
) -> Result<FidelityBracket> {
    if s.shape() != t.shape() {
        return Err(Error::Shape(
            "strategies have different round shapes".into(),
        ));
    }
    let z = s.final_memory_dim().max(t.final_memory_dim());
    let s_pad = pad_final_memory(s, z)?;
    let t_pad = pad_final_memory(t, z)?;
    let sp = Purification::from_pure_strategy(&s_pad);
    let tp = Purification::from_pure_strategy(&t_pad);
    let outers = cross_outer(&slices_of(&sp), &slices_of(&tp));
    let shape = s.shape().clone();
    let budget = budget.clamp(2, tol::MAX_ITER);

    let mut evaluations = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let mut cuts: Vec<ComplexMatrix> = Vec::new();
    let mut k = ComplexMatrix::identity(z, z);
    while evaluations < budget {
        let c = c_of_k(&outers, &k);
        let (phi, b_opt, _) = inner_primal(&shape, &c, opts)?;
        evaluations += 1;
        lower = lower.max(phi);
        let m = overlap_matrix(&sp, &tp, b_opt.matrix());
        upper = upper.min(trace_norm(&m));
        cuts.push(m);
        if upper - lower < 1e-7 || evaluations == budget {
            break;
        }
        let (next_k, master_value) = master_over_ball(&cuts, z, opts)?;
        upper = upper.min(master_value);
        if upper - lower < 1e-7 {
            break;
        }
        k = proj_ball(&next_k);
    }

    // Upper bounds from sampled co-strategies; for one-round strategies this
    // is exactly sampling over (purified) input states.
    for i in 0..32u64 {
        let b = random_pure_costrategy(&shape, None, seed.wrapping_add(1000 + i))?;
        let rho_s = reduced_final_state(&s_pad, &b)?;
        let rho_t = reduced_final_state(&t_pad, &b)?;
        upper = upper.min(state_fidelity(&rho_s, &rho_t)?);
    }

    Ok(FidelityBracket {
        lower,
        upper,
        evaluations,
    })
}

/// A channel on the final memory with Kraus pair `{K, √(I - K†K)}`.
#[derive(Clone, Debug)]
pub struct UhlmannChannel {
    /// The two Kraus operators.
    pub kraus: [ComplexMatrix; 2],
    /// Residual of the completeness identity `Σ E†E = I`.
    pub completeness_defect: f64,
    /// Whether `K†K` had to be clamped back under the identity.
    pub clamped: bool,
}

/// Builds the interpolating channel from a solved fidelity program: acting
/// with it on the final memory of one purified interaction steers the joint
/// state toward the other, with guaranteed squared overlap at least the
/// squared fidelity against every co-strategy.
pub fn uhlmann_channel(res: &FidelityResult) -> Result<UhlmannChannel> {
    uhlmann_channel_from_k(&res.optimal_k)
}

/// [`uhlmann_channel`] from an explicit operator `K`; singular values beyond
/// 1 are clamped so the Kraus pair is always complete.
pub fn uhlmann_channel_from_k(k: &ComplexMatrix) -> Result<UhlmannChannel> {
    if k.nrows() != k.ncols() {
        return Err(Error::Dimension(format!(
            "K must be square, got {}x{}",
            k.nrows(),
            k.ncols()
        )));
    }
    let z = k.nrows();
    let mut k = k.clone();
    let mut clamped = false;
    if op_norm(&k) > 1.0 {
        let mut svd = k.svd(true, true);
        for v in svd.singular_values.iter_mut() {
            *v = v.min(1.0);
        }
        k = svd.recompose().map_err(|e| Error::Solver(e.into()))?;
        clamped = true;
    }
    let gram = ComplexMatrix::identity(z, z) - k.adjoint() * &k;
    let gram = HermitianOperator::new((&gram + gram.adjoint()) * Complex64::new(0.5, 0.0))?;
    clamped = clamped || min_eigenvalue(&gram) < -tol::TOL_TRACE;
    let kbar = sqrt_psd(&clamp_psd(&gram))?.into_matrix();
    let completeness_defect = max_abs(
        &(k.adjoint() * &k + kbar.adjoint() * &kbar - ComplexMatrix::identity(z, z)),
    );
    if completeness_defect > tol::GAP_TOL {
        return Err(Error::Solver(format!(
            "Kraus completeness defect {completeness_defect:.3e}"
        )));
    }
    Ok(UhlmannChannel {
        kraus: [k, kbar],
        completeness_defect,
        clamped,
    })
}

/// The overlap `⟨ψ_s| (Ξ ⊗ id) (|ψ_t⟩⟨ψ_t|) |ψ_s⟩ = Σ_E |⟨ψ_s|(E ⊗ I)|ψ_t⟩|²`
/// of two joint final states on `Z⊗W` under the channel acting on `Z`.
pub fn uhlmann_overlap(
    channel: &UhlmannChannel,
    psi_s: &ComplexVector,
    psi_t: &ComplexVector,
) -> Result<f64> {
    let z = channel.kraus[0].nrows();
    if psi_s.len() != psi_t.len() || psi_s.len() % z != 0 {
        return Err(Error::Dimension(format!(
            "states of length {} and {} do not share a Z factor of dimension {z}",
            psi_s.len(),
            psi_t.len()
        )));
    }
    let w = psi_s.len() / z;
    let mut total = 0.0;
    for e in &channel.kraus {
        let mut moved = ComplexVector::zeros(z * w);
        for a_out in 0..z {
            for j in 0..w {
                let mut acc = Complex64::new(0.0, 0.0);
                for a_in in 0..z {
                    acc += e[(a_out, a_in)] * psi_t[a_in * w + j];
                }
                moved[a_out * w + j] = acc;
            }
        }
        total += psi_s.dotc(&moved).norm_sqr();
    }
    Ok(total)
}

/// Both sides of the Fuchs-van de Graaf sandwich for strategies.
#[derive(Clone, Copy, Debug)]
pub struct FvdgReport {
    /// The strategy fidelity `F`.
    pub fidelity: f64,
    /// The strategy norm `N = ‖S - T‖`.
    pub norm: f64,
    /// `1 - N/2`, which must not exceed `F`.
    pub lower: f64,
    /// `√(1 - N²/4)`, which `F` must not exceed.
    pub upper: f64,
    /// Whether `lower ≤ F ≤ upper` holds within [`tol::TOL_VALUE_TIGHT`].
    pub holds: bool,
}

/// Checks `1 - ‖S-T‖/2 ≤ F(S,T) ≤ √(1 - ‖S-T‖²/4)` for one pair.
pub fn fvdg_check(
    s: &PureStrategy,
    t: &PureStrategy,
    opts: &SolveOptions,
) -> Result<FvdgReport> {
    let fidelity = strategy_fidelity(s, t, opts)?.value;
    let norm = strategy_norm_of_difference(s, t, opts)?.value;
    let lower = 1.0 - 0.5 * norm;
    let upper = (1.0 - 0.25 * norm * norm).max(0.0).sqrt();
    Ok(FvdgReport {
        fidelity,
        norm,
        lower,
        upper,
        holds: fidelity >= lower - tol::TOL_VALUE_TIGHT
            && fidelity <= upper + tol::TOL_VALUE_TIGHT,
    })
}

/// Both sides of the joint concavity inequality for one mixture.
#[derive(Clone, Copy, Debug)]
pub struct ConcavityReport {
    /// `F(Σλ_i S_i, Σλ_i T_i)`.
    pub mixed: f64,
    /// `Σλ_i F(S_i, T_i)`.
    pub average: f64,
    /// Whether `mixed ≥ average` within [`tol::TOL_VALUE_TIGHT`].
    pub holds: bool,
}

/// Checks joint concavity of the fidelity on a weighted family of pairs.
/// Mixtures are formed by flag-ancilla purifications, so every program input
/// stays a bona fide purification.
pub fn joint_concavity_check(
    pairs: &[(PureStrategy, PureStrategy)],
    weights: &[f64],
    opts: &SolveOptions,
) -> Result<ConcavityReport> {
    if pairs.is_empty() || pairs.len() != weights.len() {
        return Err(Error::InvalidInput(format!(
            "{} pairs with {} weights",
            pairs.len(),
            weights.len()
        )));
    }
    let s_parts: Vec<(f64, PureStrategy)> = weights
        .iter()
        .zip(pairs)
        .map(|(&w, (s, _))| (w, s.clone()))
        .collect();
    let t_parts: Vec<(f64, PureStrategy)> = weights
        .iter()
        .zip(pairs)
        .map(|(&w, (_, t))| (w, t.clone()))
        .collect();
    let mixed = strategy_fidelity(&mix_strategies(&s_parts)?, &mix_strategies(&t_parts)?, opts)?
        .value;
    let mut average = 0.0;
    for ((s, t), &w) in pairs.iter().zip(weights) {
        average += w * strategy_fidelity(s, t, opts)?.value;
    }
    Ok(ConcavityReport {
        mixed,
        average,
        holds: mixed >= average - tol::TOL_VALUE_TIGHT,
    })
}

/// Dimension list of the truncated strategy space `Y(0..=k)⊗X(0..=k)`.
fn strategy_chain_dims(shape: &RoundShape, k: usize) -> Vec<usize> {
    let mut dims: Vec<usize> = (0..=k).map(|j| shape.y_dim(j)).collect();
    dims.extend((0..=k).map(|j| shape.x_dim(j)));
    dims
}

/// Adds the witness chain `R_0 .. R_{r-1}` with its dominance constraints
/// `t·I ⪯ Tr_{Y(0)}R_0` and `R_{j-1} ⊗ I ⪯ Tr_{Y(j)}R_j`, plus the maximize
/// `t` objective. The cap `R_{r-1} ⪯ C` is left to the caller, which is the
/// only place the two fidelity programs differ.
fn add_witness_chain(pb: &mut ProgramBuilder, shape: &RoundShape) -> Result<Vec<Var>> {
    let r = shape.rounds();
    let t = pb.free_scalar("t");
    let mut rs = Vec::with_capacity(r);
    for j in 0..r {
        let dim: usize = strategy_chain_dims(shape, j).iter().product();
        rs.push(pb.free_herm(format!("R{j}"), dim));
    }
    let x0 = shape.x_dim(0);
    let y0 = shape.y_dim(0);
    let s0 = pb.psd_herm("S0", x0);
    let trace_first_reply: MatOp = Box::new(move |h: &ComplexMatrix| {
        partial_trace(h, &[y0, x0], &[0]).expect("chain dims")
    });
    pb.matrix_constraint(
        x0,
        vec![
            (rs[0], trace_first_reply),
            (t, op_scalar_identity(x0, -1.0)),
            (s0, op_neg()),
        ],
        &ComplexMatrix::zeros(x0, x0),
    )?;
    for j in 1..r {
        let dims = strategy_chain_dims(shape, j);
        let x_j = shape.x_dim(j);
        let cdim: usize = dims.iter().product::<usize>() / shape.y_dim(j);
        let s_j = pb.psd_herm(format!("S{j}"), cdim);
        let trace_newest_reply: MatOp = Box::new(move |h: &ComplexMatrix| {
            partial_trace(h, &dims, &[j]).expect("chain dims")
        });
        let minus_extend: MatOp =
            Box::new(move |h: &ComplexMatrix| -kron(h, &ComplexMatrix::identity(x_j, x_j)));
        pb.matrix_constraint(
            cdim,
            vec![
                (rs[j], trace_newest_reply),
                (rs[j - 1], minus_extend),
                (s_j, op_neg()),
            ],
            &ComplexMatrix::zeros(cdim, cdim),
        )?;
    }
    pb.set_objective(Sense::Maximize, vec![(t, ObjCoef::Scalar(1.0))]);
    Ok(rs)
}

/// The memory slices of a purification as vectors on the Choi space.
fn slices_of(p: &Purification) -> Vec<ComplexVector> {
    (0..p.memory_dim()).map(|a| p.slice(a)).collect()
}

/// All outer products `g[a][b] = t_b · s_a†`, the building blocks of `C(K)`.
fn cross_outer(
    s_slices: &[ComplexVector],
    t_slices: &[ComplexVector],
) -> Vec<Vec<ComplexMatrix>> {
    let n = s_slices[0].len();
    s_slices
        .iter()
        .map(|sa| {
            t_slices
                .iter()
                .map(|tb| ComplexMatrix::from_fn(n, n, |i, j| tb[i] * sa[j].conj()))
                .collect()
        })
        .collect()
}

/// `C(K) = ½ (Σ_{a,b} K[a,b] · t_b s_a† + h.c.)`.
fn c_of_k(outers: &[Vec<ComplexMatrix>], k: &ComplexMatrix) -> ComplexMatrix {
    let n = outers[0][0].nrows();
    let mut d = ComplexMatrix::zeros(n, n);
    for a in 0..k.nrows() {
        for b in 0..k.ncols() {
            let v = k[(a, b)];
            if v != Complex64::new(0.0, 0.0) {
                d += &outers[a][b] * v;
            }
        }
    }
    (&d + d.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Reduces `⟨B, C⟩` over the co-strategy structure `B = Q ⊗ I` on the final
/// reply to `⟨Q, E⟩`: permute the final reply factor to the end and trace it
/// out.
fn inner_objective(c: &ComplexMatrix, shape: &RoundShape) -> Result<ComplexMatrix> {
    let r = shape.rounds();
    let mut dims: Vec<usize> = shape.y_dims().to_vec();
    dims.extend_from_slice(shape.x_dims());
    let mut src: Vec<usize> = (0..r - 1).collect();
    src.extend(r..2 * r);
    src.push(r - 1);
    let moved = permute_matrix_factors(c, &dims, &src)?;
    let moved_dims: Vec<usize> = src.iter().map(|&j| dims[j]).collect();
    partial_trace(&moved, &moved_dims, &[moved_dims.len() - 1])
}

/// Minimizes `⟨C, B⟩` over the co-strategy set, returning the optimum and
/// the minimizer.
fn inner_primal(
    shape: &RoundShape,
    c: &ComplexMatrix,
    opts: &SolveOptions,
) -> Result<(f64, CoStrategyChoi, ConicSolution)> {
    let e = inner_objective(c, shape)?;
    let mut pb = ProgramBuilder::new();
    let chain = add_costrategy_chain(&mut pb, shape)?;
    let q_top = *chain.qs.last().expect("at least one round");
    pb.set_objective(Sense::Minimize, vec![(q_top, ObjCoef::Matrix(e))]);
    let sol = pb.solve(opts)?;
    sol.require_optimal("inner minimization over co-strategies")?;
    let b = chain.embed_top(&sol.herm(q_top));
    let b = CoStrategyChoi::new(shape.clone(), HermitianOperator::new(b)?)?;
    Ok((sol.objective_value(), b, sol.conic().clone()))
}

/// Maximizes `t` over the witness chain capped by the fixed operator `C`.
fn inner_dual(
    shape: &RoundShape,
    c: &ComplexMatrix,
    opts: &SolveOptions,
) -> Result<(f64, ConicSolution)> {
    let n = shape.choi_dim();
    let mut pb = ProgramBuilder::new();
    let rs = add_witness_chain(&mut pb, shape)?;
    let top_slack = pb.psd_herm("C_slack", n);
    let r_top = *rs.last().expect("at least one round");
    pb.matrix_constraint(
        n,
        vec![(r_top, op_identity()), (top_slack, op_identity())],
        c,
    )?;
    let sol = pb.solve(opts)?;
    sol.require_optimal("inner minimization dual chain")?;
    Ok((sol.objective_value(), sol.conic().clone()))
}

/// The overlap matrix `M[a,b] = s_a† B t_b` between the memory slices of two
/// purifications across a co-strategy operator.
fn overlap_matrix(sp: &Purification, tp: &Purification, b: &ComplexMatrix) -> ComplexMatrix {
    let zs = sp.memory_dim();
    let zt = tp.memory_dim();
    let moved: Vec<ComplexVector> = (0..zt).map(|bb| b * tp.slice(bb)).collect();
    let s_slices = slices_of(sp);
    ComplexMatrix::from_fn(zs, zt, |a, bb| s_slices[a].dotc(&moved[bb]))
}

/// The oracle's master program: maximizes `min_i Re Σ_{a,b} K[a,b]·M_i[a,b]`
/// over the unit-ball operators `K`, returning the maximizer and the
/// optimum inflated by the solver gap. Since each `M_i` is the overlap
/// matrix of a genuine co-strategy, the returned value upper bounds the
/// fidelity.
fn master_over_ball(
    cuts: &[ComplexMatrix],
    z: usize,
    opts: &SolveOptions,
) -> Result<(ComplexMatrix, f64)> {
    let mut pb = ProgramBuilder::new();
    let t = pb.free_scalar("t");
    let p = pb.psd_herm("P", 2 * z);
    let eye = ComplexMatrix::identity(z, z);
    let upper_left: MatOp = Box::new(move |h: &ComplexMatrix| h.view((0, 0), (z, z)).into_owned());
    let lower_right: MatOp = Box::new(move |h: &ComplexMatrix| h.view((z, z), (z, z)).into_owned());
    pb.matrix_constraint(z, vec![(p, upper_left)], &eye)?;
    pb.matrix_constraint(z, vec![(p, lower_right)], &eye)?;
    for (i, m) in cuts.iter().enumerate() {
        let slack = pb.psd_herm(format!("s{i}"), 1);
        let mut g = ComplexMatrix::zeros(2 * z, 2 * z);
        g.view_mut((0, z), (z, z)).copy_from(&m.map(|e| e.conj()));
        pb.scalar_constraint(
            vec![
                (p, ScalarCoef::Matrix(g)),
                (t, ScalarCoef::Scalar(-1.0)),
                (slack, ScalarCoef::Scalar(-1.0)),
            ],
            0.0,
        )?;
    }
    pb.set_objective(Sense::Maximize, vec![(t, ObjCoef::Scalar(1.0))]);
    let sol = pb.solve(opts)?;
    sol.require_optimal("fidelity oracle master")?;
    let k = sol.herm(p).view((0, z), (z, z)).into_owned();
    let value = sol.objective_value() + sol.conic().gap.abs() + tol::GAP_TOL;
    Ok((k, value))
}

/// Projection onto the unit operator-norm ball by clamping singular values.
fn proj_ball(m: &ComplexMatrix) -> ComplexMatrix {
    if op_norm(m) <= 1.0 {
        return m.clone();
    }
    let mut svd = m.clone().svd(true, true);
    for v in svd.singular_values.iter_mut() {
        *v = v.min(1.0);
    }
    svd.recompose().expect("svd recompose")
}
