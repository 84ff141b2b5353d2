//! Crate-wide error type.

/// Errors reported by strategy construction, validation, and the SDP layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Matrix or register dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A matrix expected to be Hermitian is not, within tolerance.
    #[error("not Hermitian: defect {defect:.3e} exceeds {tol:.1e}")]
    NotHermitian { defect: f64, tol: f64 },

    /// A matrix expected to be positive semidefinite has a negative
    /// eigenvalue below the clamp threshold.
    #[error("not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPositiveSemidefinite { min_eig: f64 },

    /// A map expected to be an isometry fails `V*V = I` within tolerance.
    #[error("not an isometry: defect {0:.3e}")]
    NotIsometry(f64),

    /// A round structure or factor list is malformed.
    #[error("invalid shape: {0}")]
    Shape(String),

    /// Factor labels do not match between two register orders.
    #[error("label mismatch: {0}")]
    Labels(String),

    /// An operation received input outside its documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The conic solver failed or returned a non-optimal status.
    #[error("solver: {0}")]
    Solver(String),

    /// Primal and dual optima of paired programs disagree beyond tolerance.
    #[error("duality gap {gap:.3e} exceeds tolerance {tol:.1e}")]
    DualityGap { gap: f64, tol: f64 },

    /// File or stream error in the CLI layer.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Malformed JSON in a strategy file.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
