use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two elements (or an element and a class/irrep) from different groups
    /// were combined.
    #[error("group mismatch: {0} vs {1}")]
    GroupMismatch(&'static str, &'static str),

    /// A time/area parameter was outside its admissible range.
    #[error("invalid time parameter t = {0}: {1}")]
    InvalidTime(f64, &'static str),

    /// The character series would need irreps beyond the hard Casimir cap.
    #[error("t too small for character mode (required casimir cutoff exceeds 1e6)")]
    SeriesCutoffExceeded,

    /// A heat-kernel value came out nonpositive after truncation where a
    /// positive density was required.
    #[error("nonpositive heat-kernel density at face {face}: {value}")]
    NonpositiveDensity { face: usize, value: f64 },

    /// A character series evaluated to a nonpositive value, i.e. the true
    /// kernel is below the series' double-precision cancellation noise.
    #[error("character series at t = {t} returned {value:e}, below its roundoff resolution")]
    SeriesResolution { t: f64, value: f64 },

    /// Malformed or inconsistent graph data.
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// An index (edge, face, vertex, boundary position) was out of range or
    /// otherwise unusable.
    #[error("invalid index: {0}")]
    InvalidIndex(String),

    /// A path word is not consistent with the graph it is used on.
    #[error("invalid path word: {0}")]
    InvalidWord(String),

    /// Invalid argument combination not covered by a more specific variant.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An integer linear system had no solution (cycle not decomposable).
    #[error("not decomposable: {0}")]
    NoIntegerSolution(String),

    /// A conditioning event has negligible probability.
    #[error("conditioning event negligible: {0}")]
    NegligibleConditioning(String),

    /// I/O or serialization failure (CLI paths, graph files).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
