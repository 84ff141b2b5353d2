//! Channels as one-round strategies: extremal fidelity and norm values,
//! and the sandwich between the two figures of merit.
//!
//! The identity channel and the bit flip are perfectly distinguishable with
//! one use (send half of an entangled pair): fidelity 0, norm 2. A small
//! rotation is nearly indistinguishable from the identity, and for every
//! pair the fidelity is sandwiched by the norm as
//! `1 - N/2 <= F <= sqrt(1 - N^2/4)`.
//!
//! Run with `cargo run --release --example channel_discrimination`.

use num_complex::Complex64;

use strategem::fidelity::{fvdg_check, strategy_fidelity};
use strategem::norm::{distinguish_bias, strategy_norm_of_difference};
use strategem::strategies::channel_strategy;
use strategem::{ComplexMatrix, PureStrategy};

fn unitary_channel(u: ComplexMatrix) -> strategem::Result<PureStrategy> {
    channel_strategy(2, 2, &[u])
}

fn main() -> strategem::Result<()> {
    let opts = Default::default();
    let identity = unitary_channel(ComplexMatrix::identity(2, 2))?;
    let bitflip = unitary_channel(ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    ))?;
    let theta: f64 = 0.15;
    let rotation = unitary_channel(ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(theta.cos(), 0.0),
            Complex64::new(-theta.sin(), 0.0),
            Complex64::new(theta.sin(), 0.0),
            Complex64::new(theta.cos(), 0.0),
        ],
    ))?;

    for (name, other) in [("bit flip", &bitflip), ("rotation by 0.15", &rotation)] {
        let fid = strategy_fidelity(&identity, other, &opts)?;
        let norm = strategy_norm_of_difference(&identity, other, &opts)?;
        let bias = distinguish_bias(&identity, other, &opts)?;
        let sandwich = fvdg_check(&identity, other, &opts)?;
        println!("identity vs {name}");
        println!("  fidelity:            {:.6}", fid.value);
        println!("  norm of difference:  {:.6}", norm.value);
        println!("  distinguishing bias: {bias:.6}");
        println!(
            "  sandwich: {:.6} <= {:.6} <= {:.6}  holds: {}",
            sandwich.lower, sandwich.fidelity, sandwich.upper, sandwich.holds
        );
    }
    Ok(())
}
