//! Numerical tolerances used across the crate.
//!
//! Every tolerance is pinned here with its role so that test expectations and
//! library behavior cannot drift apart. Values are absolute unless noted.

/// Maximum allowed entrywise defect `max |m - m†|` for a matrix accepted as
/// Hermitian.
pub const TOL_HERM: f64 = 1e-10;

/// Eigenvalue clamp threshold for positive semidefinite inputs: eigenvalues in
/// `[-TOL_PSD, 0)` are clamped to `0`; anything below is rejected.
pub const TOL_PSD: f64 = 1e-9;

/// Maximum residual (entrywise, absolute) for the affine constraints that
/// certify a matrix as a valid strategy or co-strategy.
pub const TOL_FEAS: f64 = 1e-7;

/// Default certified duality-gap tolerance for SDP optima.
pub const GAP_TOL: f64 = 1e-8;

/// Hard cap on inner evaluations in derivative-free oracle searches,
/// applied on top of any requested budget.
pub const MAX_ITER: usize = 50_000;

/// Maximum allowed isometry defect `max |V*V - I|` for round isometries.
pub const TOL_ISOMETRY: f64 = 1e-9;

/// Partial traces must preserve the total trace to this accuracy.
pub const TOL_TRACE: f64 = 1e-12;

/// Tolerance for derived scalar comparisons (fidelities, norms, bounds)
/// propagated through one or two SDP solves.
pub const TOL_VALUE: f64 = 1e-5;

/// Tighter variant for quantities derived from a single solve or from closed
/// forms.
pub const TOL_VALUE_TIGHT: f64 = 1e-6;

/// Default `--tol` used by the command-line interface for pass/fail verdicts.
pub const CLI_TOL: f64 = 1e-6;

/// Cap on automatically chosen final-memory dimensions when sampling random
/// pure strategies and co-strategies.
pub const MEMORY_CAP: usize = 8;
