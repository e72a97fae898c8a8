use thiserror::Error;

/// Errors for state construction, distribution building and work averages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("not Hermitian (max |M - M^H| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("not unitary (max |U^H U - I| = {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("not a density matrix: {reason}")]
    InvalidDensity { reason: String },

    #[error("degenerate energy basis: {context}")]
    DegenerateBasis { context: &'static str },

    #[error("basis is not orthonormal (max |B^H B - I| = {defect:e})")]
    BasisNotOrthonormal { defect: f64 },

    #[error("work atom at w = {work} kept imaginary residue {residue:e} after merging")]
    ImaginaryResidue { work: f64, residue: f64 },

    #[error("work distribution weights sum to {total} instead of 1")]
    NotNormalized { total: f64 },

    #[error("grid too narrow: estimated probability mass outside grid is {outside:e}")]
    GridTooNarrow { outside: f64 },

    #[error("grid too coarse: trapezoidal normalization gives {integral} instead of 1")]
    GridTooCoarse { integral: f64 },

    #[error("pointer density is negative beyond tolerance (min value {value:e})")]
    NegativeDensity { value: f64 },

    #[error("pointer must be centered at x0 = 0 (got x0 = {x0})")]
    PointerNotCentered { x0: f64 },

    #[error("invalid pointer parameters: {reason}")]
    InvalidPointer { reason: &'static str },

    #[error("invalid drive parameters: {reason}")]
    InvalidDrive { reason: &'static str },

    #[error("state carries no inverse temperature; use a thermal or coherent-Gibbs state")]
    BetaRequired,

    #[error("result exceeds floating-point range (log value {ln_value})")]
    Overflow { ln_value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
