use thiserror::Error;

use crate::device::IVTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Landau coefficients: {0}")]
    InvalidCoefficients(String),

    #[error(
        "LGK integration failed at P = {polarization:.6e} C/m^2 (step {step:.3e} s, \
         {iterations} Newton iterations, residual {residual:.3e} V/m)"
    )]
    Integration {
        polarization: f64,
        step: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("Poisson solver did not converge after {iterations} iterations (last residual {last:.3e})", last = residual_history.last().copied().unwrap_or(f64::NAN))]
    PoissonNonConvergence {
        iterations: usize,
        residual_history: Vec<f64>,
    },

    #[error("self-consistent loop failed after {iterations} outer iterations (damping {damping}): {reason}")]
    SelfConsistency {
        iterations: usize,
        damping: f64,
        reason: String,
        /// |ΔP_S| per outer iteration.
        history: Vec<f64>,
    },

    #[error("memory window undefined: {branch} branch never crosses {i_ref:.3e} A/um")]
    UndefinedMemoryWindow { branch: &'static str, i_ref: f64 },

    #[error("read voltage {0} V outside the swept range")]
    ReadOutOfRange(f64),

    #[error("sweep aborted at V_GS = {v_gs} V: {source}")]
    Sweep {
        v_gs: f64,
        partial: Box<IVTrace>,
        #[source]
        source: Box<Error>,
    },
}
