//! Error type shared by every module.
//!
//! Rejections are split into two families. Configuration errors describe
//! inputs that can never be evaluated (odd flux number, malformed files).
//! Physics rejections describe inputs that are well formed but violate a
//! hypothesis the formulas rely on, such as a closed spectral gap.

use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum HallError {
    /// Input that is malformed or inconsistent before any physics runs.
    #[error("configuration error: {0}")]
    Config(String),

    /// Flux quantization `Lx·Ly = 2πM ℓ_B²` with even `M` cannot be met.
    #[error("flux quantization violated: {message}")]
    FluxQuantization {
        /// Human readable reason.
        message: String,
        /// Nearby valid flux numbers.
        suggestions: Vec<usize>,
    },

    /// The ground multiplet is not separated from the rest of the spectrum
    /// (uniform gap hypothesis).
    #[error("gap violation at phi = ({phi_x:.6}, {phi_y:.6}): {message}")]
    GapViolation {
        /// Gauge parameter in x.
        phi_x: f64,
        /// Gauge parameter in y.
        phi_y: f64,
        /// Diagnostic.
        message: String,
    },

    /// A link determinant is too small to fix the plaquette phase.
    #[error("gauge grid too coarse: {0}")]
    GridTooCoarse(String),

    /// The heat-kernel trace is too far from an integer.
    #[error("Dirac lattice too coarse: {0}")]
    LatticeTooCoarse(String),

    /// Hypothesis of a theorem is not met by the input.
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    /// A matrix expected to be Hermitian is not.
    #[error("non-Hermitian operator: relative deviation {0:.3e}")]
    NonHermitian(f64),

    /// Fock space exceeds the configured cap.
    #[error("Fock space dimension {dim} exceeds cap {cap}")]
    DimensionCap {
        /// Requested dimension.
        dim: usize,
        /// Configured cap.
        cap: usize,
    },

    /// Time integration lost unitarity.
    #[error("norm drift {0:.3e} exceeds tolerance; reduce the step size")]
    NormDrift(f64),

    /// Input or output failure in the orchestration layer.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HallError {
    /// Process exit code: 1 for configuration problems, 2 for physics rejections.
    pub fn exit_code(&self) -> i32 {
        match self {
            HallError::Config(_) | HallError::FluxQuantization { .. } | HallError::Io(_) => 1,
            _ => 2,
        }
    }
}

/// Result alias.
pub type Result<T> = std::result::Result<T, HallError>;
