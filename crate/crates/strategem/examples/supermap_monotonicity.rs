//! Strategy supermaps: composing with channels before and after, appending
//! an inert reply round, and the data-processing inequalities both figures
//! of merit obey.
//!
//! A supermap sends strategies to strategies. Under any such map the
//! fidelity can only grow and the norm can only shrink, and its adjoint
//! sends co-strategies of the output shape back to co-strategies of the
//! input shape.
//!
//! Run with `cargo run --release --example supermap_monotonicity`.

use num_complex::Complex64;

use strategem::strategies::{
    costrategy_choi, random_channel_kraus, random_pure_costrategy, random_pure_strategy,
    strategy_choi, validate_costrategy,
};
use strategem::supermaps::{monotonicity_check_fidelity, monotonicity_check_norm, Supermap};
use strategem::{ComplexVector, HermitianOperator, RoundShape};

fn main() -> strategem::Result<()> {
    let opts = Default::default();
    let shape = RoundShape::new(vec![2], vec![2])?;
    let s = random_pure_strategy(&shape, None, 31)?;
    let t = random_pure_strategy(&shape, None, 32)?;

    let pre = random_channel_kraus(2, 2, 2, 33)?;
    let post = random_channel_kraus(2, 2, 2, 34)?;
    let u = Supermap::from_channel_composition(&shape, &[pre], &[post])?;

    let fid = monotonicity_check_fidelity(&u, &s, &t, &opts)?;
    println!("fidelity under a random channel composition");
    println!("  before: {:.6}", fid.input);
    println!("  after:  {:.6}", fid.output);
    println!("  non-decreasing: {}", fid.holds);

    let h = HermitianOperator::new(strategy_choi(&s).matrix() - strategy_choi(&t).matrix())?;
    let nrm = monotonicity_check_norm(&u, &h, &opts)?;
    println!("norm of the difference under the same supermap");
    println!("  before: {:.6}", nrm.input);
    println!("  after:  {:.6}", nrm.output);
    println!("  non-increasing: {}", nrm.holds);

    let b = random_pure_costrategy(u.out_shape(), None, 35)?;
    let image = u.adjoint().apply_costrategy(&costrategy_choi(&b))?;
    let report = validate_costrategy(&image);
    println!("adjoint image of a random co-strategy");
    println!("  worst constraint residual: {:.3e}", report.max_residual());
    println!("  is a co-strategy: {}", report.passes(1e-7));

    let reply = ComplexVector::from_element(2, Complex64::new(0.5f64.sqrt(), 0.0));
    let extend = Supermap::append_reply_round(&shape, 2, &reply)?;
    let fid_again = monotonicity_check_fidelity(&extend, &s, &t, &opts)?;
    println!("appending an inert question-and-fixed-reply round");
    println!(
        "  rounds: {} -> {}",
        shape.rounds(),
        extend.out_shape().rounds()
    );
    println!("  before: {:.6}", fid_again.input);
    println!("  after:  {:.6}", fid_again.output);
    Ok(())
}
