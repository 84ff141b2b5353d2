//! Writing and reading strategy files: builds the shipped example set and
//! round-trips every file through decode and encode.
//!
//! Files land in the directory given as the first argument, or in a
//! `strategem-data` directory under the system temp directory when run
//! without arguments. The shipped `data/` directory of this repository is
//! regenerated by `cargo run --example strategy_files -- data` from the
//! workspace root.
//!
//! Run with `cargo run --release --example strategy_files [-- DIR]`.

use std::path::PathBuf;

use num_complex::Complex64;

use strategem::cli::{
    decode, encode, encode_pure_costrategy, encode_pure_strategy, read_strategy_file,
    write_strategy_file, StrategyFile,
};
use strategem::strategies::{channel_strategy, random_pure_strategy};
use strategem::{ComplexMatrix, ComplexVector, PureCoStrategy, PureStrategy, RoundShape};

fn commitment(amplitudes: [f64; 2]) -> strategem::Result<PureStrategy> {
    let column = ComplexMatrix::from_fn(2, 1, |i, _| Complex64::new(amplitudes[i], 0.0));
    PureStrategy::new(RoundShape::new(vec![1], vec![2])?, vec![1], vec![column])
}

fn keep_reply_costrategy() -> strategem::Result<PureCoStrategy> {
    PureCoStrategy::new(
        RoundShape::new(vec![1], vec![2])?,
        vec![1, 2],
        ComplexVector::from_element(1, Complex64::new(1.0, 0.0)),
        vec![ComplexMatrix::identity(2, 2)],
    )
}

fn with_name(mut file: StrategyFile, name: &str) -> StrategyFile {
    file.metadata = Some(serde_json::json!({ "name": name }));
    file
}

fn main() -> strategem::Result<()> {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("strategem-data"));
    std::fs::create_dir_all(&dir)?;

    let identity = ComplexMatrix::identity(2, 2);
    let bitflip = ComplexMatrix::from_fn(2, 2, |i, j| {
        Complex64::new(if i != j { 1.0 } else { 0.0 }, 0.0)
    });
    let two_round = RoundShape::new(vec![2, 2], vec![2, 2])?;

    let files = [
        (
            "identity_channel.json",
            with_name(
                encode_pure_strategy(&channel_strategy(2, 2, &[identity])?),
                "identity qubit channel",
            ),
        ),
        (
            "bitflip_channel.json",
            with_name(
                encode_pure_strategy(&channel_strategy(2, 2, &[bitflip])?),
                "bit-flip qubit channel",
            ),
        ),
        (
            "zero_commitment.json",
            with_name(
                encode_pure_strategy(&commitment([1.0, 0.0])?),
                "commitment to 0: send |0>",
            ),
        ),
        (
            "plus_commitment.json",
            with_name(
                encode_pure_strategy(&commitment([0.5f64.sqrt(), 0.5f64.sqrt()])?),
                "commitment to 1: send |+>",
            ),
        ),
        (
            "two_round_pair_a.json",
            with_name(
                encode_pure_strategy(&random_pure_strategy(&two_round, None, 21)?),
                "seeded random two-round strategy, first of a pair",
            ),
        ),
        (
            "two_round_pair_b.json",
            with_name(
                encode_pure_strategy(&random_pure_strategy(&two_round, None, 22)?),
                "seeded random two-round strategy, second of a pair",
            ),
        ),
        (
            "keep_reply_costrategy.json",
            with_name(
                encode_pure_costrategy(&keep_reply_costrategy()?),
                "co-strategy that stores the reply in its memory",
            ),
        ),
    ];

    for (name, file) in &files {
        let path = dir.join(name);
        write_strategy_file(&path, file)?;

        let parsed = read_strategy_file(&path)?;
        let reencoded = encode(&decode(&parsed)?);
        let mut stripped = parsed.clone();
        stripped.metadata = None;
        let exact = serde_json::to_value(&stripped)? == serde_json::to_value(&reencoded)?;
        println!("{:<28} round-trip exact: {exact}", name);
    }
    println!("wrote {} files to {}", files.len(), dir.display());
    Ok(())
}
