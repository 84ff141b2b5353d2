//! Cheating bounds for interactive bit commitment and 1-out-of-2 oblivious
//! string transfer, driven by the fidelity and norm of Alice's two honest
//! strategies, plus an executable demonstration of the fidelity-achieving
//! attack.
//!
//! In a bit-commitment protocol Alice runs one of two honest strategies
//! `A⁰`, `A¹`, one per committed bit. Two cheating probabilities control
//! security: Alice reveals the bit she did not commit to with probability at
//! least `F(A⁰,A¹)²` (she plays honestly, then steers her final memory with
//! the interpolating channel), and Bob guesses the committed bit before the
//! reveal with probability `½ + ¼‖A⁰−A¹‖`. The two cannot both be small:
//!
//! ```text
//! √A + 2B ≥ 2,    so    max(A, B) ≥ (9 − √17)/8 ≈ 0.61
//! ```
//!
//! and the same quantities bound oblivious string transfer, where a cheating
//! Bob behaves exactly as in bit commitment. [`cheat_bounds`] assembles the
//! report for either task, [`tradeoff_constant`] pins the 61% constant, and
//! [`cheat_demo`] actually executes Alice's attack against a concrete
//! co-strategy for Bob: it plays the honest interaction, applies the
//! channel built from the solved fidelity program, and returns the overlap
//! with the target state, which the fidelity bound guarantees from below
//! no matter what Bob does.
//!
//! The reveal phase and Bob's accept measurement are not simulated; the
//! reported overlap is the certified lower bound on any accept probability
//! whose measurement accepts the honest state.

use crate::error::{Error, Result};
use crate::fidelity::{strategy_fidelity, uhlmann_channel, uhlmann_overlap};
use crate::norm::strategy_norm_of_difference;
use crate::sdp::SolveOptions;
use crate::strategies::{interact, pad_final_memory, PureCoStrategy, PureStrategy};
use crate::tol;

/// The two-party task a cheat report is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    BitCommitment,
    ObliviousTransfer,
}

/// Cheating probabilities and trade-off verdicts for one pair of honest
/// Alice strategies.
#[derive(Clone, Copy, Debug)]
pub struct CheatReport {
    /// Which task the bounds are read for; the numbers coincide for both.
    pub task: Task,
    /// The strategy fidelity `F(A⁰, A¹)`.
    pub fidelity: f64,
    /// Alice's cheating probability is at least `F²`.
    pub alice_lower_bound: f64,
    /// Bob's optimal guessing probability `½ + ¼‖A⁰ − A¹‖`.
    pub bob_cheat: f64,
    /// `√(F²) + 2·bob_cheat`, which can never drop below 2.
    pub tradeoff_lhs: f64,
    /// `max(alice_lower_bound, bob_cheat)`: somebody can always cheat this
    /// well.
    pub max_cheater: f64,
    /// The universal constant `(9 − √17)/8` bounding `max_cheater` below.
    pub constant_bound: f64,
    /// Whether `tradeoff_lhs ≥ 2` within [`tol::TOL_VALUE_TIGHT`].
    pub tradeoff_holds: bool,
    /// Whether `max_cheater ≥ constant_bound` within
    /// [`tol::TOL_VALUE_TIGHT`].
    pub constant_holds: bool,
}

/// The universal insecurity constant `(9 − √17)/8 ≈ 0.609612`: the value of
/// `p` solving `√p + 2p = 2`, hence the best cheating probability a protocol
/// could hope to force on both parties simultaneously.
pub fn tradeoff_constant() -> f64 {
    (9.0 - 17f64.sqrt()) / 8.0
}

/// Computes the cheating bounds for a bit-commitment or oblivious-transfer
/// protocol whose honest Alice plays `a0` or `a1`.
pub fn cheat_bounds(
    a0: &PureStrategy,
    a1: &PureStrategy,
    task: Task,
    opts: &SolveOptions,
) -> Result<CheatReport> {
    if a0.shape() != a1.shape() {
        return Err(Error::Shape(
            "honest strategies have different round shapes".into(),
        ));
    }
    let fid = strategy_fidelity(a0, a1, opts)?;
    let norm = strategy_norm_of_difference(a0, a1, opts)?.value;
    let alice_lower_bound = fid.sdp_optimum;
    let bob_cheat = 0.5 + 0.25 * norm;
    let tradeoff_lhs = alice_lower_bound.sqrt() + 2.0 * bob_cheat;
    let max_cheater = alice_lower_bound.max(bob_cheat);
    let constant_bound = tradeoff_constant();
    Ok(CheatReport {
        task,
        fidelity: fid.value,
        alice_lower_bound,
        bob_cheat,
        tradeoff_lhs,
        max_cheater,
        constant_bound,
        tradeoff_holds: tradeoff_lhs >= 2.0 - tol::TOL_VALUE_TIGHT,
        constant_holds: max_cheater >= constant_bound - tol::TOL_VALUE_TIGHT,
    })
}

/// Executes Alice's fidelity-achieving attack: she plays `a_honest` against
/// Bob's co-strategy `b`, then applies the interpolating channel from the
/// solved fidelity program to her final memory, steering the joint state
/// toward the one `a_target` would have produced. Returns the achieved
/// overlap with the target state, guaranteed to be at least
/// `F(a_honest, a_target)²` up to [`tol::TOL_VALUE`] regardless of `b`; a
/// shortfall is reported as a solver error rather than returned.
pub fn cheat_demo(
    a_honest: &PureStrategy,
    a_target: &PureStrategy,
    b: &PureCoStrategy,
    opts: &SolveOptions,
) -> Result<f64> {
    if a_honest.shape() != a_target.shape() || a_honest.shape() != b.shape() {
        return Err(Error::Shape(
            "strategies and co-strategy have different round shapes".into(),
        ));
    }
    let z = a_honest.final_memory_dim().max(a_target.final_memory_dim());
    let honest = pad_final_memory(a_honest, z)?;
    let target = pad_final_memory(a_target, z)?;
    let res = strategy_fidelity(&target, &honest, opts)?;
    let channel = uhlmann_channel(&res)?;
    let psi_honest = interact(&honest, b)?;
    let psi_target = interact(&target, b)?;
    let overlap = uhlmann_overlap(&channel, &psi_target, &psi_honest)?;
    if overlap < res.sdp_optimum - tol::TOL_VALUE {
        return Err(Error::Solver(format!(
            "attack overlap {overlap} fell below the guaranteed {}",
            res.sdp_optimum
        )));
    }
    Ok(overlap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, C_ONE};
    use crate::strategies::{channel_strategy, random_pure_costrategy, random_pure_strategy};
    use crate::RoundShape;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit_shape(rounds: usize) -> RoundShape {
        RoundShape::new(vec![2; rounds], vec![2; rounds]).unwrap()
    }

    fn commitment_shape() -> RoundShape {
        RoundShape::new(vec![1], vec![2]).unwrap()
    }

    fn state_strategy(amps: &[Complex64]) -> PureStrategy {
        let shape = RoundShape::new(vec![1], vec![amps.len()]).unwrap();
        let column = ComplexMatrix::from_iterator(amps.len(), 1, amps.iter().copied());
        PureStrategy::new(shape, vec![1], vec![column]).unwrap()
    }

    fn zero_commitment() -> PureStrategy {
        state_strategy(&[C_ONE, c(0.0, 0.0)])
    }

    fn one_commitment() -> PureStrategy {
        state_strategy(&[c(0.0, 0.0), C_ONE])
    }

    fn plus_commitment() -> PureStrategy {
        let h = 0.5f64.sqrt();
        state_strategy(&[c(h, 0.0), c(h, 0.0)])
    }

    #[test]
    fn tradeoff_constant_is_the_root_of_the_tradeoff_equation() {
        let p = tradeoff_constant();
        assert!((p - 0.609612).abs() < 5e-7, "constant {p}");
        assert!(p > 0.5 && p < 1.0);
        assert!(
            (p.sqrt() + 2.0 * p - 2.0).abs() < 1e-12,
            "root residual {}",
            (p.sqrt() + 2.0 * p - 2.0).abs()
        );
    }

    #[test]
    fn identical_commitments_leave_bob_blind() {
        let opts = SolveOptions::default();
        let a = random_pure_strategy(&qubit_shape(1), Some(&[2]), 3).unwrap();
        let report = cheat_bounds(&a, &a, Task::BitCommitment, &opts).unwrap();
        assert!((report.fidelity - 1.0).abs() < tol::TOL_VALUE_TIGHT);
        assert!((report.alice_lower_bound - 1.0).abs() < 1e-5);
        assert!((report.bob_cheat - 0.5).abs() < 1e-5);
        assert!((report.tradeoff_lhs - 2.0).abs() < 1e-5);
        assert!((report.max_cheater - 1.0).abs() < 1e-5);
        assert!(report.tradeoff_holds && report.constant_holds);
    }

    #[test]
    fn fully_revealing_commitments_give_bob_everything() {
        let opts = SolveOptions::default();
        let identity = channel_strategy(2, 2, &[ComplexMatrix::identity(2, 2)]).unwrap();
        let flip = channel_strategy(
            2,
            2,
            &[ComplexMatrix::from_row_slice(
                2,
                2,
                &[c(0.0, 0.0), C_ONE, C_ONE, c(0.0, 0.0)],
            )],
        )
        .unwrap();
        let report = cheat_bounds(&identity, &flip, Task::BitCommitment, &opts).unwrap();
        assert!(report.fidelity.abs() < tol::TOL_VALUE);
        assert!(report.alice_lower_bound < 1e-5);
        assert!((report.bob_cheat - 1.0).abs() < 1e-5);
        assert!((report.tradeoff_lhs - 2.0).abs() < 1e-5);
        assert!((report.max_cheater - 1.0).abs() < 1e-5);
        assert!(report.tradeoff_holds && report.constant_holds);
    }

    #[test]
    fn zero_plus_pair_reproduces_the_worked_example() {
        let opts = SolveOptions::default();
        let report = cheat_bounds(
            &zero_commitment(),
            &plus_commitment(),
            Task::BitCommitment,
            &opts,
        )
        .unwrap();
        let f = 0.5f64.sqrt();
        let norm = 2.0 * (1.0 - 0.5f64).sqrt();
        assert!((report.fidelity - f).abs() < 1e-5, "F {}", report.fidelity);
        assert!((report.alice_lower_bound - 0.5).abs() < 1e-5);
        assert!(
            (report.bob_cheat - (0.5 + 0.25 * norm)).abs() < 1e-5,
            "B {}",
            report.bob_cheat
        );
        assert!(
            (report.tradeoff_lhs - 2.414213562373095).abs() < 1e-5,
            "lhs {}",
            report.tradeoff_lhs
        );
        assert!(report.tradeoff_holds && report.constant_holds);
    }

    #[test]
    fn reports_for_both_tasks_coincide() {
        let opts = SolveOptions::default();
        let a0 = random_pure_strategy(&qubit_shape(1), Some(&[2]), 11).unwrap();
        let a1 = random_pure_strategy(&qubit_shape(1), Some(&[2]), 12).unwrap();
        let bc = cheat_bounds(&a0, &a1, Task::BitCommitment, &opts).unwrap();
        let ot = cheat_bounds(&a0, &a1, Task::ObliviousTransfer, &opts).unwrap();
        assert_eq!(bc.task, Task::BitCommitment);
        assert_eq!(ot.task, Task::ObliviousTransfer);
        assert!((bc.fidelity - ot.fidelity).abs() < 1e-9);
        assert!((bc.bob_cheat - ot.bob_cheat).abs() < 1e-9);
        assert!((bc.tradeoff_lhs - ot.tradeoff_lhs).abs() < 1e-9);
    }

    #[test]
    fn tradeoff_holds_on_random_pairs() {
        let opts = SolveOptions::default();
        for (rounds, seed) in [(1usize, 21u64), (1, 22), (2, 23)] {
            let shape = qubit_shape(rounds);
            let dims = vec![2usize; rounds];
            let a0 = random_pure_strategy(&shape, Some(&dims), seed).unwrap();
            let a1 = random_pure_strategy(&shape, Some(&dims), seed + 40).unwrap();
            let report = cheat_bounds(&a0, &a1, Task::BitCommitment, &opts).unwrap();
            assert!(
                report.tradeoff_holds,
                "rounds {rounds} seed {seed}: lhs {}",
                report.tradeoff_lhs
            );
            assert!(
                report.constant_holds,
                "rounds {rounds} seed {seed}: max cheater {}",
                report.max_cheater
            );
        }
    }

    #[test]
    fn honest_attack_on_identical_strategies_is_perfect() {
        let opts = SolveOptions::default();
        let a = random_pure_strategy(&qubit_shape(1), Some(&[2]), 31).unwrap();
        let b = random_pure_costrategy(&qubit_shape(1), None, 32).unwrap();
        let overlap = cheat_demo(&a, &a, &b, &opts).unwrap();
        assert!((overlap - 1.0).abs() < 1e-5, "overlap {overlap}");
    }

    #[test]
    fn orthogonal_commitments_make_the_bound_vacuous() {
        let opts = SolveOptions::default();
        let b = random_pure_costrategy(&commitment_shape(), None, 41).unwrap();
        let overlap = cheat_demo(&zero_commitment(), &one_commitment(), &b, &opts).unwrap();
        assert!(overlap >= 0.0);
    }

    #[test]
    fn zero_plus_attack_beats_one_half_against_any_bob() {
        let opts = SolveOptions::default();
        for seed in 0..6u64 {
            let b = random_pure_costrategy(&commitment_shape(), None, 50 + seed).unwrap();
            let overlap =
                cheat_demo(&zero_commitment(), &plus_commitment(), &b, &opts).unwrap();
            assert!(
                overlap >= 0.5 - tol::TOL_VALUE,
                "seed {seed}: overlap {overlap}"
            );
        }
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let opts = SolveOptions::default();
        let a = random_pure_strategy(&qubit_shape(1), None, 61).unwrap();
        let b = random_pure_strategy(&qubit_shape(2), None, 62).unwrap();
        assert!(cheat_bounds(&a, &b, Task::BitCommitment, &opts).is_err());
        let wrong_bob = random_pure_costrategy(&qubit_shape(2), None, 63).unwrap();
        assert!(cheat_demo(&a, &a, &wrong_bob, &opts).is_err());
    }
}
