//! Error type shared by every module of the crate.
//!
//! The variants mirror the failure classes surfaced to callers: dimension
//! and bidegree mismatches are programming/data errors, `Capability` means
//! the operation needs data the caller has not supplied, and `Numerical`
//! covers the floating-point paths (orbit too close to indeterminacy,
//! unreliable sampling).

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// Matrix/vector shape mismatch.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Operation received an input it cannot meaningfully process
    /// (zero polynomial, empty matrix, non-positive tolerance, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The operation needs data that is not present (a pullback matrix at
    /// some bidegree, an incidence fact, a precomputed Kähler power, ...).
    /// The message names exactly what to supply.
    #[error("capability error: {0}")]
    Capability(String),

    /// Classes from different manifolds mixed, or a model invariant failed.
    #[error("model error: {0}")]
    Model(String),

    /// Bidegree mismatch between classes.
    #[error("degree error: {0}")]
    Degree(String),

    /// Duplicate or invalid generator/point names.
    #[error("naming error: {0}")]
    Naming(String),

    /// Construction outside the supported range (e.g. blowup of P^1).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A name did not resolve (builtin registry, workspace, generator).
    #[error("lookup error: {0}")]
    Lookup(String),

    /// Monomial map is not dominant (singular torus matrix) or rows are
    /// not a valid projective monomial map.
    #[error("dominance error: {0}")]
    Dominance(String),

    /// Requested eigenvalue is not in the spectrum; message lists the
    /// nearest isolated root intervals.
    #[error("spectrum error: {0}")]
    Spectrum(String),

    /// Incidence data missing, inconsistent, or the variety-pullback
    /// linear solve had no unique solution.
    #[error("incidence-data error: {0}")]
    Incidence(String),

    /// Floating-point failure: orbit hit the indeterminacy guard, or too
    /// many sample evaluations failed.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Malformed textual input (class expression, rational literal,
    /// definition file).
    #[error("parse error: {0}")]
    Parse(String),

    /// Configured step/iteration cap exceeded.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
