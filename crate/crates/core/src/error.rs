//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Fock cutoff must be at least 2, got {0}")]
    CutoffTooSmall(usize),

    #[error(
        "cutoff {cutoff} cannot hold amplitude |α| = {amplitude:.4}: tail mass \
         {tail:.3e} exceeds tolerance {tolerance:.3e}; suggest cutoff ≥ {suggested}"
    )]
    TruncationTail {
        cutoff: usize,
        amplitude: f64,
        tail: f64,
        tolerance: f64,
        suggested: usize,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("number state |{n}⟩ does not fit below cutoff {cutoff}")]
    LevelOutOfRange { n: usize, cutoff: usize },

    #[error("grid needs at least two points, got {0}")]
    GridTooSmall(usize),

    #[error("grid bounds invalid: [{min}, {max}]")]
    GridBounds { min: f64, max: f64 },

    #[error("grid spacings differ: {left:.6e} vs {right:.6e}")]
    SpacingMismatch { left: f64, right: f64 },

    #[error("grids misaligned: {0}")]
    GridMisaligned(String),

    #[error("matrix is not Hermitian: max |M − M†| = {defect:.3e}")]
    NotHermitian { defect: f64 },

    #[error("operator is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace {trace:.12} deviates from 1 beyond {tolerance:.3e}; increase the cutoff")]
    TraceDeficit { trace: f64, tolerance: f64 },

    #[error("mean photon number must be nonnegative, got {0}")]
    InvalidThermalOccupation(f64),

    #[error("phase shift {theta} rad is outside (−π, 0) ∪ (0, π)")]
    InvalidTiltAngle { theta: f64 },

    #[error("detector efficiency {0} is outside (0, 1]")]
    InvalidEfficiency(f64),

    #[error("density grid has a negative value {min:.3e} below the roundoff floor")]
    NegativeDensity { min: f64 },

    #[error("probability mass {mass:.8} fell below {minimum:.8}; increase cutoffs")]
    MassDeficit { mass: f64, minimum: f64 },

    #[error("local oscillator amplitude must be nonzero")]
    ZeroLocalOscillator,

    #[error("linear algebra backend error: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
}

pub type Result<T> = std::result::Result<T, Error>;
