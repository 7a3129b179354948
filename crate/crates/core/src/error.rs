use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("incident wavenumber must be positive, got {0}")]
    NonPositiveWavenumber(f64),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error(
        "matching denominator degenerate at k_x = {kx:e}, k_y = {ky:e} (|D|/scale = {relative:e})"
    )]
    DegenerateDenominator { kx: f64, ky: f64, relative: f64 },

    #[error("kernel denominator underflow between k_x = {kx:e} and k_x' = {kx_prime:e}")]
    KernelDenominator { kx: f64, kx_prime: f64 },

    #[error("packet carries {mass:e} probability at k_x < 0 (threshold {threshold:e})")]
    NegativeMomentumMass { mass: f64, threshold: f64 },

    #[error(
        "sample time {t_max:e} s is past the alias horizon {horizon:e} s of the k_x grid; \
         use at least {n_kx_needed} k_x nodes"
    )]
    AliasHorizon {
        horizon: f64,
        t_max: f64,
        n_kx_needed: usize,
    },

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadrature(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("norm increased by {growth:e} in step {step}")]
    Instability { step: usize, growth: f64 },

    #[error("time grids are not compatible: {0}")]
    GridMismatch(String),

    #[error("regularization must be positive, got {0}")]
    InvalidRegularization(f64),
}

impl Error {
    /// True for failures raised by a numerical guard rather than by bad input.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::DegenerateDenominator { .. }
                | Error::KernelDenominator { .. }
                | Error::NegativeMomentumMass { .. }
                | Error::AliasHorizon { .. }
                | Error::Instability { .. }
        )
    }
}
