//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the toolkit.
///
/// All operations are pure; an error always means the input data violated a
/// documented precondition or invariant, never that internal state was
/// corrupted.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructed value violates its type invariant (unitarity, algebra
    /// membership, cover geometry, ...).
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// Structure-group mismatch between operands.
    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    /// Two values live on different sample grids or different bundles.
    #[error("incompatible operands: {0}")]
    Mismatch(String),

    /// Group element outside the chart domain of the logarithm.
    #[error("out of chart: {0}")]
    OutOfChart(String),

    /// Sample grid too coarse for the requested stencil.
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    /// Cover parameters cannot cover the circle or break the margin rule.
    #[error("invalid cover: {0}")]
    Cover(String),

    /// A displacement field breaks the bijectivity bound sup|u'| <= 1/2.
    #[error("bijectivity bound violated: {0}")]
    Bijectivity(String),

    /// Newton inversion of a diffeomorphism failed to converge.
    #[error("newton inversion failed: {0}")]
    Newton(String),

    /// Transition data fails the cocycle condition.
    #[error("cocycle violation: worst residual {residual:.3e} at {location}")]
    Cocycle { residual: f64, location: String },

    /// Per-chart pieces disagree on an overlap beyond tolerance.
    #[error("overlap disagreement: {0}")]
    Overlap(String),

    /// A base diffeomorphism left the admissible neighbourhood for the
    /// extension construction.
    #[error("outside admissible neighbourhood: {0}")]
    Neighbourhood(String),

    /// Operation defined only for flat bundles.
    #[error("not a flat bundle: {0}")]
    NotFlat(String),

    /// Group kind not covered by the shipped homotopy fact table.
    #[error("unsupported group kind: {0}")]
    Unsupported(String),

    /// Configuration file is syntactically or semantically invalid.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem error while reading configuration or writing reports.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
