//! Error types shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by constructors, solvers and trackers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A domain-type invariant was violated (bad spin, unnormalized kick, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The kick-strength parameter Λ = 0 was passed where a matrix is needed.
    /// Λ = 0 is a degeneracy of the family itself and is handled analytically.
    #[error("singular parameter: Lambda = 0 has no matrix representation")]
    SingularParameter,

    /// An operation that requires ω = 2πr/d was called with a different ω.
    #[error("omega = {omega} is not of the solvable form 2*pi*r/{d}")]
    NotSolvable { omega: f64, d: usize },

    /// An operation that requires a non-resonant ω was called with a resonant
    /// one; the witness (q, p) satisfies ω = 2πq/p with 0 < |p| < d.
    #[error("omega = {omega} is resonant: omega = 2*pi*{q}/{p} with p < d = {d}")]
    Resonant {
        omega: f64,
        q: i64,
        p: i64,
        d: usize,
    },

    /// A case the closed forms do not cover (e.g. multipole projectors above
    /// J = 3/2).
    #[error("unsupported case: {0}")]
    Unsupported(String),

    /// The polynomial root solver did not converge.
    #[error("root solver failed to converge at Lambda = {lambda}")]
    SolverDiverged { lambda: Complex64 },

    /// Simultaneous root iteration stalled before reaching the residual target.
    #[error("polynomial root iteration stalled (max scaled residual {residual:.3e})")]
    RootsNotConverged { residual: f64 },

    /// Branch tracking could not resolve an overlap ambiguity after the
    /// refinement cap.
    #[error("branch tracking ambiguous near parameter {at} (overlap {overlap:.3} after {halvings} halvings)")]
    TrackingAmbiguous {
        at: Complex64,
        overlap: f64,
        halvings: u32,
    },

    /// A monodromy loop would intersect the exclusion zone of another
    /// degeneracy candidate.
    #[error("monodromy loop of radius {radius} around {center} intersects the exclusion zone of the candidate at {blocker}")]
    LoopBlocked {
        center: Complex64,
        radius: f64,
        blocker: Complex64,
    },

    /// The discriminant vanishes identically: every Λ carries a degeneracy
    /// (J = 1 at ω = 0), so there is no isolated-point atlas to report.
    #[error("discriminant vanishes identically at omega = {omega}; the whole Lambda-plane is degenerate")]
    DegenerateFamily { omega: f64 },

    /// Interpolation of the discriminant stayed ill-conditioned after node
    /// rescaling.
    #[error("discriminant interpolation ill-conditioned (validation residual {residual:.3e})")]
    IllConditioned { residual: f64 },

    /// Generic precondition failure.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
