use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument was NaN or infinite.
    NonFiniteInput(&'static str),
    /// An argument was outside the admissible range.
    OutOfRange { what: &'static str, value: f64 },
    /// Grid construction failed.
    InvalidGrid(&'static str),
    /// Two sampled functions do not live on the same grid.
    GridMismatch,
    /// Array length does not match the grid.
    LengthMismatch { expected: usize, found: usize },
    /// A matrix expected to be unimodular has `|det - 1|` above the threshold.
    NotUnimodular { det_error: f64 },
    /// The computed fundamental solution fails its residual check.
    ResidualTooLarge { residual: f64, tolerance: f64 },
    /// A non-finite value appeared while building coefficient `n`.
    NonFiniteCoefficient { n: isize, node: usize },
    /// Legendre monomial coefficients requested beyond the supported degree.
    DegreeTooLarge { requested: usize, max: usize },
    /// No nonvanishing particular solution was found.
    VanishingSolution { min_modulus: f64 },
    /// Order requested from a coefficient family that was not built.
    OrderNotAvailable { requested: isize, available: usize },
    /// Invalid input for the spectral scan.
    InvalidWindow,
    /// A λ-dependent boundary block has no derivative provider.
    DerivativeUnavailable,
    /// Both boundary blocks vanish at the queried λ.
    DegenerateBoundary,
    /// A gauge factor is not invertible.
    SingularGauge,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFiniteInput(what) => write!(f, "non-finite {what}"),
            Error::OutOfRange { what, value } => write!(f, "{what} out of range: {value}"),
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::GridMismatch => f.write_str("sampled functions live on different grids"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} samples, found {found}")
            }
            Error::NotUnimodular { det_error } => {
                write!(f, "matrix is not unimodular (|det - 1| = {det_error:e})")
            }
            Error::ResidualTooLarge { residual, tolerance } => write!(
                f,
                "fundamental solution residual {residual:e} exceeds {tolerance:e}; refine the grid"
            ),
            Error::NonFiniteCoefficient { n, node } => write!(
                f,
                "non-finite value in coefficient n = {n} at node {node}; refine the grid or lower N"
            ),
            Error::DegreeTooLarge { requested, max } => {
                write!(f, "degree {requested} exceeds the supported maximum {max}")
            }
            Error::VanishingSolution { min_modulus } => write!(
                f,
                "no nonvanishing particular solution found (best min modulus {min_modulus:e})"
            ),
            Error::OrderNotAvailable { requested, available } => write!(
                f,
                "order {requested} requested but coefficients were built up to {available}"
            ),
            Error::InvalidWindow => f.write_str("spectral window must satisfy min < max"),
            Error::DerivativeUnavailable => f.write_str("boundary block depends on λ but has no derivative"),
            Error::DegenerateBoundary => f.write_str("both boundary blocks vanish"),
            Error::SingularGauge => f.write_str("gauge matrix is singular"),
        }
    }
}

impl core::error::Error for Error {}
