//! Cheating bounds for bit commitment, on the textbook commitment pair:
//! commit to 0 by sending |0>, commit to 1 by sending |+>, no questions
//! asked. One party can always cheat well, and the attack is runnable.
//!
//! Alice reveals the other bit with probability at least F^2 = 1/2, Bob
//! guesses the committed bit early with probability 1/2 + |||0><0| -
//! |+><+|||/4, and the trade-off sqrt(A) + 2B >= 2 pins the best cheater
//! above (9 - sqrt(17))/8, about 61 percent. The demonstration actually
//! plays the honest strategy, applies the interpolating channel from the
//! solved fidelity program to Alice's memory, and reports the overlap with
//! the state the other commitment would have produced. Both commitments
//! discard their memory, so the channel is scalar and every isometric
//! receiver preserves the overlap exactly: the attack sits at 1/2 on the
//! nose no matter what Bob does.
//!
//! Run with `cargo run --release --example cheat_bounds`.

use num_complex::Complex64;

use strategem::crypto::{cheat_bounds, cheat_demo, tradeoff_constant, Task};
use strategem::strategies::random_pure_costrategy;
use strategem::{ComplexMatrix, PureStrategy, RoundShape};

fn commitment(amplitudes: [f64; 2]) -> strategem::Result<PureStrategy> {
    let column = ComplexMatrix::from_fn(2, 1, |i, _| Complex64::new(amplitudes[i], 0.0));
    PureStrategy::new(RoundShape::new(vec![1], vec![2])?, vec![1], vec![column])
}

fn main() -> strategem::Result<()> {
    let opts = Default::default();
    let zero = commitment([1.0, 0.0])?;
    let plus = commitment([0.5f64.sqrt(), 0.5f64.sqrt()])?;

    let report = cheat_bounds(&zero, &plus, Task::BitCommitment, &opts)?;
    println!("commitment pair |0> / |+>");
    println!("  fidelity:                 {:.6}", report.fidelity);
    println!("  alice reveals other bit:  {:.6}", report.alice_lower_bound);
    println!("  bob guesses early:        {:.6}", report.bob_cheat);
    println!("  sqrt(A) + 2B:             {:.6}", report.tradeoff_lhs);
    println!("  best cheater:             {:.6}", report.max_cheater);
    println!("  universal constant:       {:.6}", tradeoff_constant());
    println!("  trade-off holds:          {}", report.tradeoff_holds);

    println!(
        "alice's attack against random receivers (bound: {:.6})",
        report.alice_lower_bound
    );
    let shape = zero.shape().clone();
    for seed in 0..4 {
        let bob = random_pure_costrategy(&shape, None, 50 + seed)?;
        let overlap = cheat_demo(&zero, &plus, &bob, &opts)?;
        println!("  bob seed {seed}: overlap {overlap:.6}");
    }
    Ok(())
}
