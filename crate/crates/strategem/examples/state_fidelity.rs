//! States as one-round strategies: preparing a density matrix with no
//! question asked is a strategy, and the strategy fidelity of two such
//! preparations is exactly the usual (unsquared) state fidelity.
//!
//! Run with `cargo run --release --example state_fidelity`.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use strategem::linalg::{haar_isometry, partial_trace, state_fidelity};
use strategem::strategies::prepare_state_strategy;
use strategem::HermitianOperator;

fn random_qubit_density(rng: &mut ChaCha12Rng) -> strategem::Result<HermitianOperator> {
    let v = haar_isometry(4, 1, rng)?;
    let pure = &v * v.adjoint();
    HermitianOperator::new(partial_trace(&pure, &[2, 2], &[1])?)
}

fn main() -> strategem::Result<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(17);
    let opts = Default::default();
    println!("trial   strategy fidelity   state fidelity   difference");
    let mut worst: f64 = 0.0;
    for trial in 0..6 {
        let rho = random_qubit_density(&mut rng)?;
        let sigma = random_qubit_density(&mut rng)?;
        let a = prepare_state_strategy(&rho)?;
        let b = prepare_state_strategy(&sigma)?;
        let through_strategies = strategem::fidelity::strategy_fidelity(&a, &b, &opts)?;
        let direct = state_fidelity(&rho, &sigma)?;
        let difference = (through_strategies.value - direct).abs();
        worst = worst.max(difference);
        println!(
            "{trial:>5}   {:>17.6}   {direct:>14.6}   {difference:>10.2e}",
            through_strategies.value
        );
    }
    println!("largest difference: {worst:.2e}");
    Ok(())
}
