use thiserror::Error;

/// Errors surfaced by the library. Internal invariant violations (for
/// example a rank-deficient lowering system while building a CG tensor)
/// are bugs and panic instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse irrep label `{0}`")]
    IrrepParse(String),
    #[error("basis is empty")]
    EmptyBasis,
    #[error("coupling must be positive and finite, got {0}")]
    BadCoupling(f64),
    #[error("invalid 9-R slot pattern: {0}")]
    NineRPattern(String),
    #[error("fit window too small: {0}")]
    FitWindow(String),
    #[error("numerical tolerance violated: {0}")]
    Tolerance(String),
    #[error("unsupported request: {0}")]
    Unsupported(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
