//! The fidelity of genuinely interactive strategies, and what the solved
//! program hands back: the joint semidefinite value, the interpolating
//! operator `K`, and the inner minimization it is optimal against.
//!
//! The fidelity is a max-min: the opponent picks the co-strategy that pulls
//! the two final states apart, the strategies pick `K` to hold them
//! together. At the saddle point the inner minimum over co-strategies,
//! evaluated at the optimal `K`, reproduces the joint value, and every
//! concrete co-strategy yields an output fidelity at least as large.
//!
//! Run with `cargo run --release --example interactive_fidelity`.

use strategem::fidelity::{
    costrategy_output_fidelity, inner_min_over_costrategies, strategy_fidelity,
};
use strategem::linalg::op_norm;
use strategem::strategies::{costrategy_choi, random_pure_costrategy, random_pure_strategy};
use strategem::RoundShape;

fn main() -> strategem::Result<()> {
    let opts = Default::default();
    let shape = RoundShape::new(vec![2, 2], vec![2, 2])?;
    let s = random_pure_strategy(&shape, None, 41)?;
    let t = random_pure_strategy(&shape, None, 42)?;

    let fid = strategy_fidelity(&s, &t, &opts)?;
    println!("two-round random pair");
    println!("  fidelity:        {:.6}", fid.value);
    println!("  squared optimum: {:.6}", fid.sdp_optimum);
    println!("  |K| (spectral):  {:.6}", op_norm(&fid.optimal_k));
    println!("  duality gap:     {:.3e}", fid.solver.gap);
    println!("  witness chain:   {} operators", fid.witnesses.len());

    let inner = inner_min_over_costrategies(&s, &t, &fid.optimal_k, &opts)?;
    println!("inner minimum at the optimal K");
    println!("  value:           {:.6}", inner.phi);
    println!("  dual agrees to:  {:.3e}", (inner.phi - inner.alpha).abs());
    println!(
        "  saddle defect:   {:.3e}",
        (inner.phi - fid.value).abs()
    );

    println!("sampled co-strategies (output fidelity can only exceed F)");
    for seed in 0..4 {
        let b = random_pure_costrategy(&shape, None, 100 + seed)?;
        let output = costrategy_output_fidelity(&s, &t, &costrategy_choi(&b))?;
        println!(
            "  seed {seed}: {output:.6}  (margin {:+.2e})",
            output - fid.value
        );
    }
    Ok(())
}
