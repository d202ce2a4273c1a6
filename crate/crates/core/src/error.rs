//! Error type shared by all modules of the crate.

use core::fmt;

/// Errors reported by the algebra, integrator, and estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    DimensionMismatch { expected: usize, got: usize },
    /// A parameter violates a documented precondition.
    InvalidParameter(&'static str),
    /// Fixed-step stability guard: `step · max|f|` exceeds 0.1.
    StabilityGuard { step: f64, f_bound: f64 },
    /// A non-finite value appeared during a computation.
    NonFinite(&'static str),
    /// Fewer than 10 usable samples in a regression window.
    DegenerateRegression { samples: usize },
    /// The commutator vanished at every sampled time (degenerate Weyl label).
    ZeroCommutator,
    /// A hyperbolicity precondition failed: `lambda ≤ 3·stderr`.
    NonHyperbolic { lambda: f64, stderr: f64 },
    /// Direction estimates at the two probe horizons disagree.
    HorizonTooShort { angle: f64 },
    /// Monodromy requested for a spec that is not periodic.
    NonPeriodic(&'static str),
    /// `|tr M| = 2` within tolerance: no dichotomy, reduction refused.
    Parabolic { trace: f64 },
    /// `|tr M| < 2`: elliptic spec where a hyperbolic one is required.
    Elliptic { trace: f64 },
    /// Monodromy eigenvectors are too close to parallel.
    IllConditioned { angle: f64 },
    /// A reduction frame sample is singular.
    SingularFrame { index: usize },
    /// A reduction frame failed its periodicity check.
    FrameNotPeriodic { residual: f64 },
    /// Segment endpoints do not match in a composition.
    EndpointMismatch { expected: f64, got: f64 },
    /// Segments belong to different hull points.
    HullMismatch,
    /// A direction field has no samples to look up.
    MissingSample,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::StabilityGuard { step, f_bound } => write!(
                f,
                "stability guard: step {step} too large for |f| bound {f_bound} (step·|f| must be ≤ 0.1)"
            ),
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::DegenerateRegression { samples } => {
                write!(f, "degenerate regression: only {samples} usable samples (need ≥ 10)")
            }
            Error::ZeroCommutator => {
                write!(f, "commutator vanished at every sampled time (degenerate label)")
            }
            Error::NonHyperbolic { lambda, stderr } => write!(
                f,
                "spec is not resolvably hyperbolic: lambda {lambda} vs 3·stderr {}",
                3.0 * stderr
            ),
            Error::HorizonTooShort { angle } => write!(
                f,
                "horizon too short for splitting: direction changed by angle {angle} under halving"
            ),
            Error::NonPeriodic(why) => write!(f, "spec is not periodic: {why}"),
            Error::Parabolic { trace } => {
                write!(f, "parabolic monodromy (tr = {trace}): reduction refused")
            }
            Error::Elliptic { trace } => {
                write!(f, "elliptic monodromy (tr = {trace}): no exponential dichotomy")
            }
            Error::IllConditioned { angle } => {
                write!(f, "eigenvector conditioning failure: angle {angle} between eigenvectors")
            }
            Error::SingularFrame { index } => {
                write!(f, "reduction frame singular at sample {index}")
            }
            Error::FrameNotPeriodic { residual } => {
                write!(f, "reduction frame periodicity residual {residual} exceeds tolerance")
            }
            Error::EndpointMismatch { expected, got } => {
                write!(f, "segment endpoint mismatch: expected t = {expected}, got {got}")
            }
            Error::HullMismatch => write!(f, "segments belong to different hull points"),
            Error::MissingSample => write!(f, "direction field has no samples"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
