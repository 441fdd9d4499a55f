use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CavityError {
    /// An argument lies outside the domain on which the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value that needs a dedicated limit formula was requested through the
    /// generic path (Drude permittivity at ξ = 0).
    #[error("special case: {0}")]
    SpecialCase(String),

    /// A structurally invalid material, layer stack or cavity description.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A quadrature or Matsubara sum did not reach its tolerance.
    #[error("no convergence: {what} (partial value {partial:e}, relative error {rel_error:e})")]
    Convergence {
        what: String,
        partial: f64,
        rel_error: f64,
    },
}

pub type Result<T> = std::result::Result<T, CavityError>;
