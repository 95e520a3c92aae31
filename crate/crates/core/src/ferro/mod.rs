//! Ferroelectric grain physics: the Landau free-energy field, LGK kinetics,
//! coercive-field variability and the MFM capacitor loop.

mod ensemble;
mod landau;
mod lgk;
mod mfm;

pub use ensemble::{sample_ensemble, Grain, GrainEnsemble, DEFAULT_SPACER_THICKNESS};
pub use landau::{extract_ec_pr, ferro_field, ferro_field_slope, LandauCoefficients};
pub use lgk::{lgk_advance, LgkIntegrator, LgkOptions};
pub use mfm::{mfm_loop, switching_spread, Branch, PVRecord, PVTrace, TriangularWave};
