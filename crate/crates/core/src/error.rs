//! Crate-wide error type.
//!
//! All fallible operations return [`Result`]; the variants carry enough
//! numeric context to tell *how far* an input is from being acceptable,
//! which matters when the caller is deciding between "genuinely broken" and
//! "statistical estimate sitting on a boundary".

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A matrix that must be Hermitian is not, beyond tolerance.
    #[error("matrix is not Hermitian: max |m - m^dagger| entry = {defect:.3e}")]
    NotHermitian { defect: f64 },

    /// A matrix that must have unit trace does not.
    #[error("matrix trace deviates from 1 by {deviation:.3e}")]
    WrongTrace { deviation: f64 },

    /// A state failed the positivity check.
    #[error(
        "state is not positive semidefinite: min eigenvalue {min_eigenvalue:.6e} < -{tol:.1e}"
    )]
    Unphysical { min_eigenvalue: f64, tol: f64 },

    /// Attempted to normalize a vector with (near-)zero norm.
    #[error("cannot normalize a near-zero vector (norm = {norm:.3e})")]
    ZeroNorm { norm: f64 },

    /// A vector that must be unit-norm is not within tolerance.
    #[error("vector norm {norm} is not 1 within 1e-12")]
    NotUnitNorm { norm: f64 },

    /// Pure-state amplitudes too far from normalized to silently fix.
    #[error("amplitudes have squared norm {norm_sq}, more than 1e-9 away from 1")]
    NotNormalized { norm_sq: f64 },

    /// Scattering angle outside [0, pi].
    #[error("scattering angle {theta} rad is outside [0, pi]")]
    AngleOutOfRange { theta: f64 },

    /// A cosine outside [-1, 1].
    #[error("cosine {value} is outside [-1, 1]")]
    CosineOutOfRange { value: f64 },

    /// Weight and state lists of different lengths.
    #[error("weights and states differ in length: {weights} vs {states}")]
    LengthMismatch { weights: usize, states: usize },

    /// An input collection that must be non-empty is empty.
    #[error("empty input: {what}")]
    EmptyInput { what: &'static str },

    /// A mixing weight is negative.
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },

    /// All mixing weights are zero.
    #[error("weights sum to zero")]
    ZeroWeightSum,

    /// A quadrature or scan grid with too few points.
    #[error("grid must have at least {need} point(s), got {got}")]
    GridTooSmall { got: usize, need: usize },

    /// Generator configuration violates an invariant.
    #[error("invalid generator config: {reason}")]
    InvalidConfig { reason: String },

    /// The requested angular decay density dips below zero somewhere, which
    /// signals an unphysical set of Fano parameters.
    #[error("decay density reaches {minimum:.6e} < 0: the requested state is unphysical")]
    NegativeDensity { minimum: f64 },

    /// Spin-analyzing power outside the usable range.
    #[error("spin-analyzing power must be in (0, 1], got {value}")]
    InvalidAnalyzingPower { value: f64 },

    /// Not enough events for a meaningful moment estimate.
    #[error("need at least {need} events, got {got}")]
    TooFewEvents { got: usize, need: usize },

    /// Not enough bootstrap resamples.
    #[error("need at least {need} bootstrap resamples, got {got}")]
    TooFewResamples { got: usize, need: usize },

    /// Too many bootstrap resamples failed to produce finite estimates.
    #[error("{failed} of {total} bootstrap resamples failed (more than 1%)")]
    BootstrapUnstable { failed: usize, total: usize },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A text input (event file, config file) is malformed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
