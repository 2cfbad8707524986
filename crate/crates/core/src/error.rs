use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("eigenvalues of J*gamma could not be matched into +/- pairs")]
    PairingFailure,

    #[error("index {index} out of range for {n_modes} mode(s)")]
    IndexOutOfRange { index: usize, n_modes: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max |M - M^T| = {0:.3e})")]
    Asymmetric(f64),

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("unphysical single-mode spec: {0}")]
    UnphysicalSpec(String),

    #[error("loss {0} outside [0, 1]")]
    LossOutOfRange(f64),

    #[error("transmittance {0} outside [0, 1]")]
    TransmittanceOutOfRange(f64),

    #[error("detection efficiency {0} outside (0, 1]")]
    ZeroEfficiency(f64),

    #[error("phase noise strength must be finite and nonnegative, got {0}")]
    NegativeSigma(f64),

    #[error("Gaussian fraction {0} outside [0, 1]")]
    FractionOutOfRange(f64),

    #[error("min(muB, muC) never crosses unity over the sweep grid")]
    NoCrossing,

    #[error("largest eigenvalues are degenerate (gap {0:.3e}); cannot identify the modulated input")]
    DegenerateSpectrum(f64),

    #[error("measurement setting {0} missing from the block set")]
    MissingSetting(usize),

    #[error("insufficient samples: {found} < {required}")]
    InsufficientSamples { found: usize, required: usize },

    #[error("empty grid")]
    EmptyGrid,

    #[error("format error: {0}")]
    Format(String),
}
