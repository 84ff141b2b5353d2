//! Command-line surface: strategy file I/O, computation commands, and the
//! property-suite runner.
//!
//! Strategy files are JSON objects tagged by `kind`: `pure_strategy` and
//! `pure_costrategy` carry one isometry per round together with the memory
//! dimensions, `choi_strategy` and `choi_costrategy` carry the single Choi
//! matrix on the canonical space. Complex entries are always `[re, im]`
//! pairs, row-major; co-strategies additionally store their initial state
//! as a vector of pairs. [`decode`] turns a parsed file into the in-memory
//! object and the `encode_*` functions invert it, so shipped example files
//! round-trip exactly.
//!
//! Every command exits 0 on success, 1 on invalid content or a failed
//! verdict, and 2 on an unreadable or unparseable file. Text output prints
//! headline values to six decimals; `--json` emits a single JSON object
//! with all numeric fields at full precision. The `STRATEGEM_SOLVER`
//! environment variable selects the conic solver backend.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::crypto::{cheat_bounds, Task};
use crate::error::{Error, Result};
use crate::fidelity::{
    fvdg_check, joint_concavity_check, strategy_fidelity, strategy_fidelity_choi,
    strategy_fidelity_oracle, FidelityResult,
};
use crate::linalg::{op_norm, ComplexMatrix, ComplexVector, HermitianOperator};
use crate::norm::strategy_norm;
use crate::registers::RoundShape;
use crate::sdp::SolveOptions;
use crate::strategies::{
    costrategy_choi, random_channel_kraus, random_pure_costrategy, random_pure_strategy,
    reduced_final_state, strategy_choi, validate_costrategy, validate_strategy, CoStrategyChoi,
    PureCoStrategy, PureStrategy, StrategyChoi,
};
use crate::supermaps::{monotonicity_check_fidelity, monotonicity_check_norm, Supermap};
use crate::tol;

/// Evaluation budget handed to the derivative-free bracket under
/// `--oracle`.
const ORACLE_BUDGET: usize = 96;

/// The four representations a strategy file can hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FileKind {
    /// Isometries of a strategy, one per round.
    #[serde(rename = "pure_strategy")]
    PureStrategy,
    /// Initial state and isometries of a co-strategy.
    #[serde(rename = "pure_costrategy")]
    PureCoStrategy,
    /// Choi operator of a strategy.
    #[serde(rename = "choi_strategy")]
    ChoiStrategy,
    /// Choi operator of a co-strategy.
    #[serde(rename = "choi_costrategy")]
    ChoiCoStrategy,
}

impl FileKind {
    /// The tag string used in files and reports.
    pub fn label(&self) -> &'static str {
        match self {
            FileKind::PureStrategy => "pure_strategy",
            FileKind::PureCoStrategy => "pure_costrategy",
            FileKind::ChoiStrategy => "choi_strategy",
            FileKind::ChoiCoStrategy => "choi_costrategy",
        }
    }
}

/// Round shape as stored in a file: question and answer dimensions per
/// round.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ShapeSpec {
    /// Question dimensions `x_0..x_{r-1}`.
    pub x_dims: Vec<usize>,
    /// Answer dimensions `y_0..y_{r-1}`.
    pub y_dims: Vec<usize>,
}

impl ShapeSpec {
    fn to_shape(&self) -> Result<RoundShape> {
        RoundShape::new(self.x_dims.clone(), self.y_dims.clone())
    }

    fn from_shape(shape: &RoundShape) -> Self {
        Self {
            x_dims: shape.x_dims().to_vec(),
            y_dims: shape.y_dims().to_vec(),
        }
    }
}

/// On-disk form of a strategy or co-strategy.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct StrategyFile {
    /// Which representation the file holds.
    pub kind: FileKind,
    /// Round shape of the interaction.
    pub shape: ShapeSpec,
    /// Memory dimensions, required for the pure kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_dims: Option<Vec<usize>>,
    /// Initial state on `X(0)` and the memory, required for
    /// `pure_costrategy`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<Vec<[f64; 2]>>,
    /// One isometry per round for the pure kinds, a single Choi matrix
    /// otherwise. Rows of `[re, im]` pairs, row-major.
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
    /// Free-form name and notes; not interpreted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

/// A strategy file decoded into the object it describes.
#[derive(Clone, Debug)]
pub enum LoadedObject {
    PureStrategy(PureStrategy),
    PureCoStrategy(PureCoStrategy),
    ChoiStrategy(StrategyChoi),
    ChoiCoStrategy(CoStrategyChoi),
}

impl LoadedObject {
    /// The file kind this object encodes back to.
    pub fn kind(&self) -> FileKind {
        match self {
            LoadedObject::PureStrategy(_) => FileKind::PureStrategy,
            LoadedObject::PureCoStrategy(_) => FileKind::PureCoStrategy,
            LoadedObject::ChoiStrategy(_) => FileKind::ChoiStrategy,
            LoadedObject::ChoiCoStrategy(_) => FileKind::ChoiCoStrategy,
        }
    }

    /// The round shape of the interaction the object plays.
    pub fn shape(&self) -> &RoundShape {
        match self {
            LoadedObject::PureStrategy(a) => a.shape(),
            LoadedObject::PureCoStrategy(b) => b.shape(),
            LoadedObject::ChoiStrategy(s) => s.shape(),
            LoadedObject::ChoiCoStrategy(b) => b.shape(),
        }
    }

    /// The object as a strategy Choi operator, for commands that compare
    /// strategies. Co-strategy files are rejected.
    pub fn to_strategy_choi(&self) -> Result<StrategyChoi> {
        match self {
            LoadedObject::PureStrategy(a) => Ok(strategy_choi(a)),
            LoadedObject::ChoiStrategy(s) => Ok(s.clone()),
            _ => Err(Error::InvalidInput(
                "expected a strategy file, got a co-strategy".into(),
            )),
        }
    }

    /// Borrows the pure strategy, for commands that need an isometry
    /// realization.
    pub fn as_pure_strategy(&self) -> Result<&PureStrategy> {
        match self {
            LoadedObject::PureStrategy(a) => Ok(a),
            _ => Err(Error::InvalidInput(format!(
                "expected a pure_strategy file, got {}",
                self.kind().label()
            ))),
        }
    }

    /// Borrows the pure co-strategy, for commands that simulate an
    /// interaction.
    pub fn as_pure_costrategy(&self) -> Result<&PureCoStrategy> {
        match self {
            LoadedObject::PureCoStrategy(b) => Ok(b),
            _ => Err(Error::InvalidInput(format!(
                "expected a pure_costrategy file, got {}",
                self.kind().label()
            ))),
        }
    }
}

fn encode_matrix(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn decode_matrix(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::InvalidInput("empty matrix in strategy file".into()));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|row| row.len() != ncols) {
        return Err(Error::InvalidInput(
            "ragged matrix rows in strategy file".into(),
        ));
    }
    Ok(ComplexMatrix::from_fn(rows.len(), ncols, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

fn encode_vector(v: &ComplexVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn decode_vector(entries: &[[f64; 2]]) -> ComplexVector {
    ComplexVector::from_iterator(
        entries.len(),
        entries.iter().map(|p| Complex64::new(p[0], p[1])),
    )
}

/// Encodes a pure strategy for [`write_strategy_file`].
pub fn encode_pure_strategy(a: &PureStrategy) -> StrategyFile {
    StrategyFile {
        kind: FileKind::PureStrategy,
        shape: ShapeSpec::from_shape(a.shape()),
        memory_dims: Some(a.memory_dims().to_vec()),
        initial_state: None,
        matrices: a.isometries().iter().map(encode_matrix).collect(),
        metadata: None,
    }
}

/// Encodes a pure co-strategy for [`write_strategy_file`].
pub fn encode_pure_costrategy(b: &PureCoStrategy) -> StrategyFile {
    StrategyFile {
        kind: FileKind::PureCoStrategy,
        shape: ShapeSpec::from_shape(b.shape()),
        memory_dims: Some(b.memory_dims().to_vec()),
        initial_state: Some(encode_vector(b.initial_state())),
        matrices: b.isometries().iter().map(encode_matrix).collect(),
        metadata: None,
    }
}

/// Encodes a strategy Choi operator for [`write_strategy_file`].
pub fn encode_choi_strategy(s: &StrategyChoi) -> StrategyFile {
    StrategyFile {
        kind: FileKind::ChoiStrategy,
        shape: ShapeSpec::from_shape(s.shape()),
        memory_dims: None,
        initial_state: None,
        matrices: vec![encode_matrix(s.matrix())],
        metadata: None,
    }
}

/// Encodes a co-strategy Choi operator for [`write_strategy_file`].
pub fn encode_choi_costrategy(b: &CoStrategyChoi) -> StrategyFile {
    StrategyFile {
        kind: FileKind::ChoiCoStrategy,
        shape: ShapeSpec::from_shape(b.shape()),
        memory_dims: None,
        initial_state: None,
        matrices: vec![encode_matrix(b.matrix())],
        metadata: None,
    }
}

/// Encodes any decoded object back to its file form, without metadata.
pub fn encode(object: &LoadedObject) -> StrategyFile {
    match object {
        LoadedObject::PureStrategy(a) => encode_pure_strategy(a),
        LoadedObject::PureCoStrategy(b) => encode_pure_costrategy(b),
        LoadedObject::ChoiStrategy(s) => encode_choi_strategy(s),
        LoadedObject::ChoiCoStrategy(b) => encode_choi_costrategy(b),
    }
}

/// Decodes a parsed file into the object it describes, checking structure:
/// dimensions, isometry defects, unit initial state, and Hermiticity of
/// Choi matrices. Membership of a Choi matrix in the strategy or
/// co-strategy set is checked by `validate`, not here.
pub fn decode(file: &StrategyFile) -> Result<LoadedObject> {
    let shape = file.shape.to_shape()?;
    match file.kind {
        FileKind::PureStrategy => {
            let dims = file.memory_dims.clone().ok_or_else(|| {
                Error::InvalidInput("pure_strategy file needs memory_dims".into())
            })?;
            let isometries = file
                .matrices
                .iter()
                .map(|m| decode_matrix(m))
                .collect::<Result<Vec<_>>>()?;
            Ok(LoadedObject::PureStrategy(PureStrategy::new(
                shape, dims, isometries,
            )?))
        }
        FileKind::PureCoStrategy => {
            let dims = file.memory_dims.clone().ok_or_else(|| {
                Error::InvalidInput("pure_costrategy file needs memory_dims".into())
            })?;
            let state = file.initial_state.as_deref().ok_or_else(|| {
                Error::InvalidInput("pure_costrategy file needs initial_state".into())
            })?;
            let isometries = file
                .matrices
                .iter()
                .map(|m| decode_matrix(m))
                .collect::<Result<Vec<_>>>()?;
            Ok(LoadedObject::PureCoStrategy(PureCoStrategy::new(
                shape,
                dims,
                decode_vector(state),
                isometries,
            )?))
        }
        FileKind::ChoiStrategy | FileKind::ChoiCoStrategy => {
            if file.matrices.len() != 1 {
                return Err(Error::InvalidInput(format!(
                    "a Choi file holds exactly one matrix, got {}",
                    file.matrices.len()
                )));
            }
            let herm = HermitianOperator::new(decode_matrix(&file.matrices[0])?)?;
            Ok(match file.kind {
                FileKind::ChoiStrategy => {
                    LoadedObject::ChoiStrategy(StrategyChoi::new(shape, herm)?)
                }
                _ => LoadedObject::ChoiCoStrategy(CoStrategyChoi::new(shape, herm)?),
            })
        }
    }
}

/// Reads and parses a strategy file.
pub fn read_strategy_file(path: &Path) -> Result<StrategyFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes a strategy file as pretty-printed JSON.
pub fn write_strategy_file(path: &Path, file: &StrategyFile) -> Result<()> {
    let mut text = serde_json::to_string_pretty(file)?;
    text.push('\n');
    Ok(std::fs::write(path, text)?)
}

/// Reads, parses, and decodes a strategy file in one step.
pub fn load(path: &Path) -> Result<LoadedObject> {
    decode(&read_strategy_file(path)?)
}

/// Parsed command line for the `strategem` binary.
#[derive(Debug, Parser)]
#[command(
    name = "strategem",
    version,
    about = "Strategy fidelity, strategy norm, and cheating bounds for multi-round quantum interactions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// The two-party task named on the `cheat-bounds` command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    /// Interactive bit commitment.
    Bc,
    /// 1-out-of-2 oblivious string transfer.
    Ot,
}

impl From<TaskArg> for Task {
    fn from(arg: TaskArg) -> Task {
        match arg {
            TaskArg::Bc => Task::BitCommitment,
            TaskArg::Ot => Task::ObliviousTransfer,
        }
    }
}

/// Property suite selected on the `check` command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    /// Fidelity against norm, both bounds, on random pairs.
    Fvdg,
    /// Fidelity and norm monotonicity under random composition supermaps,
    /// and co-strategy preservation by their adjoints.
    Monotonicity,
    /// Joint concavity of the fidelity on random mixtures.
    Concavity,
    /// All of the above.
    All,
}

/// Subcommands of the `strategem` binary.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a strategy file against the strategy or co-strategy
    /// constraints and print per-constraint residuals.
    Validate {
        /// Strategy file to check.
        path: PathBuf,
        /// Tolerance for the validity verdict.
        #[arg(long, default_value_t = tol::CLI_TOL)]
        tol: f64,
        /// Emit a single JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Strategy fidelity between two strategy files.
    Fidelity {
        /// First strategy file.
        path_s: PathBuf,
        /// Second strategy file.
        path_t: PathBuf,
        /// Tolerance for the oracle agreement verdict.
        #[arg(long, default_value_t = tol::CLI_TOL)]
        tol: f64,
        /// Seed for the derivative-free bracket.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Also bracket the value without the joint program and report
        /// agreement; needs pure_strategy files.
        #[arg(long)]
        oracle: bool,
        /// Emit a single JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Strategy norm of the difference of two strategy files.
    Norm {
        /// First strategy file.
        path_s: PathBuf,
        /// Second strategy file.
        path_t: PathBuf,
        /// Emit a single JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Cheating bounds for a commitment or transfer protocol given Alice's
    /// two honest strategies.
    CheatBounds {
        /// Honest strategy for bit 0, a pure_strategy file.
        path_a0: PathBuf,
        /// Honest strategy for bit 1, a pure_strategy file.
        path_a1: PathBuf,
        /// Which task the bounds refer to.
        #[arg(long, value_enum, default_value = "bc")]
        task: TaskArg,
        /// Emit a single JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run a strategy against a co-strategy and dump the reduced final
    /// state on the co-strategy memory.
    Simulate {
        /// Strategy, a pure_strategy file.
        path_a: PathBuf,
        /// Co-strategy, a pure_costrategy file.
        path_b: PathBuf,
        /// Emit a single JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run seeded property suites and report pass counts.
    Check {
        /// Which suite to run.
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Seed for the random instances.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Trials per suite.
        #[arg(long, default_value_t = 25)]
        trials: usize,
        /// Emit a single JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Json(_) => 2,
        _ => 1,
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let opts = SolveOptions::default();
    match &cli.command {
        Command::Validate { path, tol, json } => cmd_validate(path, *tol, *json),
        Command::Fidelity {
            path_s,
            path_t,
            tol,
            seed,
            oracle,
            json,
        } => cmd_fidelity(path_s, path_t, *tol, *seed, *oracle, *json, &opts),
        Command::Norm {
            path_s,
            path_t,
            json,
        } => cmd_norm(path_s, path_t, *json, &opts),
        Command::CheatBounds {
            path_a0,
            path_a1,
            task,
            json,
        } => cmd_cheat_bounds(path_a0, path_a1, (*task).into(), *json, &opts),
        Command::Simulate {
            path_a,
            path_b,
            json,
        } => cmd_simulate(path_a, path_b, *json),
        Command::Check {
            suite,
            seed,
            trials,
            json,
        } => cmd_check(*suite, *seed, *trials, *json, &opts),
    }
}

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}

fn format_complex(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

fn cmd_validate(path: &Path, tol: f64, json: bool) -> Result<i32> {
    let object = load(path)?;
    let report = match &object {
        LoadedObject::PureStrategy(a) => validate_strategy(&strategy_choi(a)),
        LoadedObject::PureCoStrategy(b) => validate_costrategy(&costrategy_choi(b)),
        LoadedObject::ChoiStrategy(s) => validate_strategy(s),
        LoadedObject::ChoiCoStrategy(b) => validate_costrategy(b),
    };
    let valid = report.passes(tol);
    if json {
        let residuals: Vec<serde_json::Value> = report
            .residuals
            .iter()
            .map(|(constraint, residual)| {
                serde_json::json!({ "constraint": constraint, "residual": residual })
            })
            .collect();
        print_json(&serde_json::json!({
            "kind": object.kind().label(),
            "rounds": object.shape().rounds(),
            "psd_residual": report.psd_residual,
            "residuals": residuals,
            "max_residual": report.max_residual(),
            "tol": tol,
            "valid": valid,
        }));
    } else {
        println!("kind: {}", object.kind().label());
        println!("rounds: {}", object.shape().rounds());
        println!("psd residual: {:.3e}", report.psd_residual);
        for (constraint, residual) in &report.residuals {
            println!("{constraint}: {residual:.3e}");
        }
        println!("valid within {tol:.1e}: {}", yes_no(valid));
    }
    Ok(if valid { 0 } else { 1 })
}

fn fidelity_of(s: &LoadedObject, t: &LoadedObject, opts: &SolveOptions) -> Result<FidelityResult> {
    match (s, t) {
        (LoadedObject::PureStrategy(a), LoadedObject::PureStrategy(b)) => {
            strategy_fidelity(a, b, opts)
        }
        _ => strategy_fidelity_choi(&s.to_strategy_choi()?, &t.to_strategy_choi()?, opts),
    }
}

fn cmd_fidelity(
    path_s: &Path,
    path_t: &Path,
    tol: f64,
    seed: u64,
    oracle: bool,
    json: bool,
    opts: &SolveOptions,
) -> Result<i32> {
    let s = load(path_s)?;
    let t = load(path_t)?;
    let result = fidelity_of(&s, &t, opts)?;
    let k_norm = op_norm(&result.optimal_k);
    let mut code = 0;
    let mut oracle_report = None;
    if oracle {
        let bracket =
            strategy_fidelity_oracle(s.as_pure_strategy()?, t.as_pure_strategy()?, ORACLE_BUDGET, seed, opts)?;
        let agrees = bracket.contains(result.value, tol);
        if !agrees {
            code = 1;
        }
        oracle_report = Some((bracket, agrees));
    }
    if json {
        let mut body = serde_json::json!({
            "fidelity": result.value,
            "fidelity_squared": result.sdp_optimum,
            "optimal_k_spectral_norm": k_norm,
            "duality_gap": result.solver.gap,
            "solver": result.solver.solver,
            "iterations": result.solver.iterations,
        });
        if let Some((bracket, agrees)) = &oracle_report {
            body["oracle"] = serde_json::json!({
                "lower": bracket.lower,
                "upper": bracket.upper,
                "width": bracket.width(),
                "evaluations": bracket.evaluations,
                "seed": seed,
                "agrees": agrees,
            });
        }
        print_json(&body);
    } else {
        println!("fidelity: {:.6}", result.value);
        println!("fidelity squared: {:.6}", result.sdp_optimum);
        println!("optimal k spectral norm: {k_norm:.6}");
        println!("duality gap: {:.3e}", result.solver.gap);
        if let Some((bracket, agrees)) = &oracle_report {
            println!("oracle bracket: [{:.6}, {:.6}]", bracket.lower, bracket.upper);
            println!("bracket width: {:.3e}", bracket.width());
            println!("evaluations: {}", bracket.evaluations);
            println!("agreement within {tol:.1e}: {}", yes_no(*agrees));
        }
    }
    Ok(code)
}

fn cmd_norm(path_s: &Path, path_t: &Path, json: bool, opts: &SolveOptions) -> Result<i32> {
    let s = load(path_s)?.to_strategy_choi()?;
    let t = load(path_t)?.to_strategy_choi()?;
    if s.shape() != t.shape() {
        return Err(Error::Shape(
            "strategies have different round shapes".into(),
        ));
    }
    let diff = HermitianOperator::new(s.matrix() - t.matrix())?;
    let result = strategy_norm(&diff, s.shape(), opts)?;
    let bias = 0.5 + 0.25 * result.value;
    if json {
        print_json(&serde_json::json!({
            "norm": result.value,
            "distinguishing_bias": bias,
            "duality_gap": result.solver.gap,
            "solver": result.solver.solver,
            "iterations": result.solver.iterations,
        }));
    } else {
        println!("strategy norm: {:.6}", result.value);
        println!("distinguishing bias: {bias:.6}");
        println!("duality gap: {:.3e}", result.solver.gap);
    }
    Ok(0)
}

fn task_label(task: Task) -> &'static str {
    match task {
        Task::BitCommitment => "bit commitment",
        Task::ObliviousTransfer => "oblivious string transfer",
    }
}

fn cmd_cheat_bounds(
    path_a0: &Path,
    path_a1: &Path,
    task: Task,
    json: bool,
    opts: &SolveOptions,
) -> Result<i32> {
    let a0 = load(path_a0)?;
    let a1 = load(path_a1)?;
    let report = cheat_bounds(a0.as_pure_strategy()?, a1.as_pure_strategy()?, task, opts)?;
    let ok = report.tradeoff_holds && report.constant_holds;
    if json {
        print_json(&serde_json::json!({
            "task": task_label(report.task),
            "fidelity": report.fidelity,
            "alice_lower_bound": report.alice_lower_bound,
            "bob_cheat": report.bob_cheat,
            "tradeoff_lhs": report.tradeoff_lhs,
            "max_cheater": report.max_cheater,
            "constant_bound": report.constant_bound,
            "tradeoff_holds": report.tradeoff_holds,
            "constant_holds": report.constant_holds,
        }));
    } else {
        println!("task: {}", task_label(report.task));
        println!("fidelity: {:.6}", report.fidelity);
        println!("alice lower bound: {:.6}", report.alice_lower_bound);
        println!("bob cheating probability: {:.6}", report.bob_cheat);
        println!("trade-off lhs: {:.6}", report.tradeoff_lhs);
        println!("max cheater: {:.6}", report.max_cheater);
        println!("constant bound: {:.6}", report.constant_bound);
        println!("trade-off holds: {}", yes_no(report.tradeoff_holds));
        println!("constant bound holds: {}", yes_no(report.constant_holds));
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_simulate(path_a: &Path, path_b: &Path, json: bool) -> Result<i32> {
    let a = load(path_a)?;
    let b = load(path_b)?;
    let rho = reduced_final_state(a.as_pure_strategy()?, b.as_pure_costrategy()?)?;
    let purity = rho.matrix().norm().powi(2);
    if json {
        print_json(&serde_json::json!({
            "dimension": rho.dim(),
            "trace": rho.trace(),
            "purity": purity,
            "state": encode_matrix(rho.matrix()),
        }));
    } else {
        println!("final memory dimension: {}", rho.dim());
        println!("trace: {:.6}", rho.trace());
        println!("purity: {purity:.6}");
        println!("state:");
        for i in 0..rho.dim() {
            let row: Vec<String> = (0..rho.dim())
                .map(|j| format_complex(rho.matrix()[(i, j)]))
                .collect();
            println!("[ {} ]", row.join("  "));
        }
    }
    Ok(0)
}

fn check_pair_shape(trial: usize) -> Result<RoundShape> {
    if trial % 2 == 0 {
        RoundShape::new(vec![2], vec![2])
    } else {
        RoundShape::new(vec![2, 2], vec![2, 2])
    }
}

fn fvdg_suite(seed: u64, trials: usize, opts: &SolveOptions) -> Result<usize> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x6664);
    let mut passed = 0;
    for trial in 0..trials {
        let shape = check_pair_shape(trial)?;
        let s = random_pure_strategy(&shape, None, rng.random())?;
        let t = random_pure_strategy(&shape, None, rng.random())?;
        if fvdg_check(&s, &t, opts)?.holds {
            passed += 1;
        }
    }
    Ok(passed)
}

fn monotonicity_suite(seed: u64, trials: usize, opts: &SolveOptions) -> Result<usize> {
    let shape = RoundShape::new(vec![2], vec![2])?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x304e_4f);
    let mut passed = 0;
    for _ in 0..trials {
        let pre = random_channel_kraus(2, 2, 2, rng.random())?;
        let post = random_channel_kraus(2, 2, 2, rng.random())?;
        let u = Supermap::from_channel_composition(&shape, &[pre], &[post])?;
        let s = random_pure_strategy(&shape, None, rng.random())?;
        let t = random_pure_strategy(&shape, None, rng.random())?;
        let fid = monotonicity_check_fidelity(&u, &s, &t, opts)?;
        let h = HermitianOperator::new(strategy_choi(&s).matrix() - strategy_choi(&t).matrix())?;
        let nrm = monotonicity_check_norm(&u, &h, opts)?;
        let b = random_pure_costrategy(u.out_shape(), None, rng.random())?;
        let image = u.adjoint().apply_costrategy(&costrategy_choi(&b))?;
        let preserved = validate_costrategy(&image).passes(tol::TOL_FEAS);
        if fid.holds && nrm.holds && preserved {
            passed += 1;
        }
    }
    Ok(passed)
}

fn concavity_suite(seed: u64, trials: usize, opts: &SolveOptions) -> Result<usize> {
    let shape = RoundShape::new(vec![2], vec![2])?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xc0);
    let mut passed = 0;
    for _ in 0..trials {
        let pairs = vec![
            (
                random_pure_strategy(&shape, None, rng.random())?,
                random_pure_strategy(&shape, None, rng.random())?,
            ),
            (
                random_pure_strategy(&shape, None, rng.random())?,
                random_pure_strategy(&shape, None, rng.random())?,
            ),
        ];
        let lambda = 0.2 + 0.6 * rng.random::<f64>();
        let weights = [lambda, 1.0 - lambda];
        if joint_concavity_check(&pairs, &weights, opts)?.holds {
            passed += 1;
        }
    }
    Ok(passed)
}

fn cmd_check(
    suite: SuiteArg,
    seed: u64,
    trials: usize,
    json: bool,
    opts: &SolveOptions,
) -> Result<i32> {
    let wanted = |which: SuiteArg| suite == which || suite == SuiteArg::All;
    let mut results: Vec<(&'static str, usize)> = Vec::new();
    if wanted(SuiteArg::Fvdg) {
        results.push(("fvdg", fvdg_suite(seed, trials, opts)?));
    }
    if wanted(SuiteArg::Monotonicity) {
        results.push(("monotonicity", monotonicity_suite(seed, trials, opts)?));
    }
    if wanted(SuiteArg::Concavity) {
        results.push(("concavity", concavity_suite(seed, trials, opts)?));
    }
    let pass = results.iter().all(|(_, passed)| *passed == trials);
    if json {
        let suites: Vec<serde_json::Value> = results
            .iter()
            .map(|(name, passed)| {
                serde_json::json!({ "suite": name, "passed": passed, "trials": trials })
            })
            .collect();
        print_json(&serde_json::json!({
            "seed": seed,
            "trials": trials,
            "suites": suites,
            "pass": pass,
        }));
    } else {
        for (name, passed) in &results {
            println!("{name}: {passed}/{trials}");
        }
        println!("result: {}", if pass { "pass" } else { "fail" });
    }
    Ok(if pass { 0 } else { 1 })
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json"));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{random_pure_costrategy, random_pure_strategy};

    fn qubit_shape(rounds: usize) -> RoundShape {
        RoundShape::new(vec![2; rounds], vec![2; rounds]).unwrap()
    }

    fn temp_path(name: &str) -> PathBuf {
        std::env::temp_dir().join(format!("strategem-cli-{}-{name}", std::process::id()))
    }

    #[test]
    fn files_round_trip_through_encode_and_decode() {
        let shape = qubit_shape(2);
        let a = random_pure_strategy(&shape, None, 11).unwrap();
        let b = random_pure_costrategy(&shape, None, 12).unwrap();
        let originals = [
            encode_pure_strategy(&a),
            encode_pure_costrategy(&b),
            encode_choi_strategy(&strategy_choi(&a)),
            encode_choi_costrategy(&costrategy_choi(&b)),
        ];
        for original in originals {
            let text = serde_json::to_string(&original).unwrap();
            let parsed: StrategyFile = serde_json::from_str(&text).unwrap();
            let reencoded = encode(&decode(&parsed).unwrap());
            assert_eq!(
                serde_json::to_value(&original).unwrap(),
                serde_json::to_value(&reencoded).unwrap()
            );
        }
    }

    #[test]
    fn decode_rejects_structural_problems() {
        let shape = qubit_shape(1);
        let a = random_pure_strategy(&shape, None, 3).unwrap();

        let mut missing_dims = encode_pure_strategy(&a);
        missing_dims.memory_dims = None;
        assert!(decode(&missing_dims).is_err());

        let mut ragged = encode_pure_strategy(&a);
        ragged.matrices[0][0].pop();
        assert!(decode(&ragged).is_err());

        let b = random_pure_costrategy(&shape, None, 4).unwrap();
        let mut missing_state = encode_pure_costrategy(&b);
        missing_state.initial_state = None;
        assert!(decode(&missing_state).is_err());

        let mut extra_matrix = encode_choi_strategy(&strategy_choi(&a));
        extra_matrix.matrices.push(extra_matrix.matrices[0].clone());
        assert!(decode(&extra_matrix).is_err());

        let mut stretched = encode_pure_strategy(&a);
        for entry in stretched.matrices[0].iter_mut().flatten() {
            entry[0] *= 2.0;
        }
        assert!(matches!(decode(&stretched), Err(Error::NotIsometry(_))));
    }

    #[test]
    fn exit_codes_classify_io_and_content_errors() {
        let io = Error::Io(std::io::Error::other("gone"));
        assert_eq!(exit_code_for(&io), 2);
        let json = Error::Json(serde_json::from_str::<StrategyFile>("{").unwrap_err());
        assert_eq!(exit_code_for(&json), 2);
        assert_eq!(exit_code_for(&Error::Shape("bad".into())), 1);
        assert_eq!(exit_code_for(&Error::NotIsometry(0.5)), 1);
    }

    #[test]
    fn validate_command_spans_all_three_exit_codes() {
        let shape = qubit_shape(1);
        let good = temp_path("valid.json");
        let a = random_pure_strategy(&shape, None, 5).unwrap();
        write_strategy_file(&good, &encode_pure_strategy(&a)).unwrap();

        let bad = temp_path("zero-choi.json");
        let zero = StrategyChoi::new(
            shape.clone(),
            HermitianOperator::new(ComplexMatrix::zeros(4, 4)).unwrap(),
        )
        .unwrap();
        write_strategy_file(&bad, &encode_choi_strategy(&zero)).unwrap();

        let garbled = temp_path("garbled.json");
        std::fs::write(&garbled, "{\"kind\": \"pure_str").unwrap();

        for (path, expected) in [
            (good.clone(), 0),
            (bad.clone(), 1),
            (garbled.clone(), 2),
            (temp_path("missing.json"), 2),
        ] {
            let cli = Cli::try_parse_from([
                "strategem",
                "validate",
                path.to_str().unwrap(),
            ])
            .unwrap();
            assert_eq!(run(&cli), expected, "path {path:?}");
        }

        for path in [good, bad, garbled] {
            let _ = std::fs::remove_file(path);
        }
    }

    #[test]
    fn command_line_parses_the_documented_surface() {
        let cli = Cli::try_parse_from([
            "strategem",
            "fidelity",
            "s.json",
            "t.json",
            "--oracle",
            "--seed",
            "3",
            "--tol",
            "1e-5",
            "--json",
        ])
        .unwrap();
        match cli.command {
            Command::Fidelity {
                tol,
                seed,
                oracle,
                json,
                ..
            } => {
                assert_eq!(tol, 1e-5);
                assert_eq!(seed, 3);
                assert!(oracle && json);
            }
            other => panic!("parsed {other:?}"),
        }

        let cli = Cli::try_parse_from([
            "strategem",
            "cheat-bounds",
            "a0.json",
            "a1.json",
            "--task",
            "ot",
        ])
        .unwrap();
        match cli.command {
            Command::CheatBounds { task, .. } => assert_eq!(task, TaskArg::Ot),
            other => panic!("parsed {other:?}"),
        }

        let cli =
            Cli::try_parse_from(["strategem", "check", "--suite", "fvdg", "--trials", "2"])
                .unwrap();
        match cli.command {
            Command::Check {
                suite,
                seed,
                trials,
                ..
            } => {
                assert_eq!(suite, SuiteArg::Fvdg);
                assert_eq!(seed, 7);
                assert_eq!(trials, 2);
            }
            other => panic!("parsed {other:?}"),
        }

        assert!(Cli::try_parse_from(["strategem", "fidelity", "only-one.json"]).is_err());
    }
}
