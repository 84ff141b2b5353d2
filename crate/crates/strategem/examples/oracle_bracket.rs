//! Bracketing the fidelity without the joint program: every exact inner
//! minimization at a fixed `K` is a certified lower bound, every sampled
//! co-strategy a certified upper bound, so the derivative-free search
//! returns an interval that must contain the semidefinite value.
//!
//! Run with `cargo run --release --example oracle_bracket`.

use strategem::fidelity::{strategy_fidelity, strategy_fidelity_oracle};
use strategem::strategies::random_pure_strategy;
use strategem::RoundShape;

fn main() -> strategem::Result<()> {
    let opts = Default::default();
    let shape = RoundShape::new(vec![2], vec![2])?;
    for seed in 0..3 {
        let s = random_pure_strategy(&shape, None, 2 * seed)?;
        let t = random_pure_strategy(&shape, None, 2 * seed + 1)?;
        let fid = strategy_fidelity(&s, &t, &opts)?;
        let bracket = strategy_fidelity_oracle(&s, &t, 80, 7, &opts)?;
        println!("instance {seed}");
        println!("  sdp value:   {:.8}", fid.value);
        println!(
            "  bracket:     [{:.8}, {:.8}]",
            bracket.lower, bracket.upper
        );
        println!("  width:       {:.2e}", bracket.width());
        println!("  evaluations: {}", bracket.evaluations);
        println!("  contains:    {}", bracket.contains(fid.value, 1e-6));
    }
    Ok(())
}
