//! Strategy fidelity, strategy norm, and cheating bounds for multi-round
//! quantum interactions.
//!
//! A multi-round interaction between two parties is described by a *strategy*
//! (the side that sends first) and a *co-strategy* (the side that receives
//! first, holding the output at the end). Both are represented here two ways:
//! as explicit round-by-round isometries ([`strategies::PureStrategy`],
//! [`strategies::PureCoStrategy`]) and as positive semidefinite Choi operators
//! on the joint output⊗input space. The crate computes, certifies, and
//! cross-checks two figures of merit over all interactions:
//!
//! - the **strategy fidelity**: the worst-case output-state fidelity over all
//!   co-strategies, obtained exactly by a semidefinite program
//!   ([`fidelity::strategy_fidelity`]), bracketed independently by a
//!   derivative-free oracle ([`fidelity::strategy_fidelity_oracle`]);
//! - the **strategy norm**: the best distinguishing advantage over all
//!   co-strategies ([`norm::strategy_norm`]).
//!
//! On top of those sit the standard sandwich inequalities
//! ([`fidelity::fvdg_check`]), monotonicity under strategy
//! supermaps ([`supermaps`]), and cheating bounds for interactive bit
//! commitment and oblivious string transfer ([`crypto`]), including a runnable
//! fidelity-achieving attack ([`crypto::cheat_demo`]).
//!
//! Numerical conventions live in [`tol`]; every semidefinite program runs
//! through the backend-agnostic interface in [`sdp`] and reports a certified
//! duality gap.
//!
//! # Quick start
//!
//! ```
//! use strategem::strategies::{random_pure_strategy, RoundShape};
//! use strategem::fidelity::strategy_fidelity;
//!
//! let shape = RoundShape::new(vec![2], vec![2]).unwrap();
//! let a = random_pure_strategy(&shape, None, 7).unwrap();
//! let b = random_pure_strategy(&shape, None, 8).unwrap();
//! let fid = strategy_fidelity(&a, &b, &Default::default()).unwrap();
//! assert!(fid.value >= 0.0 && fid.value <= 1.0 + 1e-7);
//! ```

pub mod cli;
pub mod crypto;
pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod norm;
pub mod registers;
pub mod sdp;
pub mod strategies;
pub mod supermaps;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, HermitianOperator};
pub use strategies::{PureCoStrategy, PureStrategy, RoundShape};
