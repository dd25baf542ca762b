//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Metric matrix not invertible at a point (condition number above
    /// the `1e12` threshold, or a pivot vanished outright).
    #[error("singular metric at {where_}: condition number {cond:.3e} exceeds threshold")]
    SingularMetric { where_: String, cond: f64 },

    /// A generator weight was evaluated outside its domain in `t`.
    #[error("generator weights evaluated at t = {t} outside domain (t > {t_min} required)")]
    OutOfDomain { t: f64, t_min: f64 },

    /// Unknown preset name.
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    /// A constructed generator family failed its non-degeneracy sweep.
    #[error("degenerate construction: {0}")]
    DegenerateConstruction(String),

    /// A linear system that should have full rank did not.
    #[error("rank deficiency in {what}: expected {expected}, got {got}")]
    RankDeficiency {
        what: String,
        expected: usize,
        got: usize,
    },

    /// The supplied field is not concircular at the evaluation point.
    #[error("field is not concircular at the point (residual {residual:.3e})")]
    NotConcircular { residual: f64 },

    /// The supplied field is not recurrent at the evaluation point.
    #[error("field is not recurrent at the point (residual {residual:.3e})")]
    NotRecurrent { residual: f64 },

    /// The supplied field is not torse-forming at the evaluation point.
    #[error("field is not torse-forming at the point (residual {residual:.3e})")]
    NotTorseForming { residual: f64 },

    /// `g(u, ∇_X u)` does not vanish at the evaluation point.
    #[error("field does not have constant length along X at the point (g(u, ∇_X u) = {value:.3e})")]
    NotConstantLength { value: f64 },

    /// Not enough samples to run a classification fit.
    #[error("classification needs at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    /// Rejection sampling failed to find enough admissible points.
    #[error("sampling produced only {got} of {wanted} points after {tries} tries")]
    SamplingExhausted {
        wanted: usize,
        got: usize,
        tries: usize,
    },

    /// Mismatched dimensions between inputs.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
