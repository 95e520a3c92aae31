use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::landau::{extract_ec_pr, LandauCoefficients};
use crate::{Error, Result};

/// Non-ferroelectric oxide separating neighbouring grains (m).
pub const DEFAULT_SPACER_THICKNESS: f64 = 5e-10;

/// Sampled coercive fields below this fraction of E_C,0 are redrawn.
const REJECTION_FLOOR: f64 = 0.1;

/// One uniformly polarized ferroelectric grain.
#[derive(Debug, Clone, PartialEq)]
pub struct Grain {
    pub coeffs: LandauCoefficients,
    /// Extent along the transport direction (m).
    pub length_along_channel: f64,
    /// Cached |E_c| of `coeffs` (V/m).
    pub coercive_field: f64,
    /// Spontaneous polarization P_S (C/m²).
    pub polarization: f64,
}

impl Grain {
    /// New grain in the negative remanent state.
    pub fn new(coeffs: LandauCoefficients, length: f64) -> Result<Self> {
        coeffs.validate()?;
        if !(length > 0.0) {
            return Err(Error::Configuration(format!(
                "grain length must be positive, got {length}"
            )));
        }
        let (ec, pr) = extract_ec_pr(&coeffs)?;
        Ok(Self {
            coeffs,
            length_along_channel: length,
            coercive_field: ec,
            polarization: -pr,
        })
    }

    pub fn remanent_polarization(&self) -> f64 {
        // validated at construction
        extract_ec_pr(&self.coeffs).map(|(_, pr)| pr).unwrap_or(f64::NAN)
    }
}

/// Grains ordered along the transport direction.
#[derive(Debug, Clone, PartialEq)]
pub struct GrainEnsemble {
    pub grains: Vec<Grain>,
    /// Oxide spacer between neighbouring grains (m).
    pub spacer_thickness: f64,
    pub spacer_eps_r: f64,
    pub rng_seed: u64,
}

impl GrainEnsemble {
    pub fn len(&self) -> usize {
        self.grains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grains.is_empty()
    }

    /// Grains plus the spacers between them (m).
    pub fn total_length(&self) -> f64 {
        let grains: f64 = self.grains.iter().map(|g| g.length_along_channel).sum();
        grains + self.spacer_thickness * self.grains.len().saturating_sub(1) as f64
    }

    /// Set every grain to `sign · P_r`.
    pub fn set_remanent(&mut self, sign: f64) {
        for g in &mut self.grains {
            g.polarization = sign.signum() * g.remanent_polarization();
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grains.is_empty() {
            return Err(Error::Configuration("ensemble has no grains".into()));
        }
        if self.grains.iter().any(|g| !(g.length_along_channel > 0.0)) {
            return Err(Error::Configuration("grain lengths must be positive".into()));
        }
        if !(self.spacer_thickness >= 0.0) {
            return Err(Error::Configuration("spacer thickness must be >= 0".into()));
        }
        Ok(())
    }
}

/// Draw `n_grains` coercive fields from `Normal(E_C,0, sigma_ratio·E_C,0)` and
/// scale the base coefficients of grain `i` by `E_c,i / E_C,0`.
///
/// Draws at or below `0.1·E_C,0` are rejected and redrawn. Every grain starts
/// in the negative remanent state.
pub fn sample_ensemble(
    n_grains: usize,
    grain_length: f64,
    base: &LandauCoefficients,
    sigma_ratio: f64,
    seed: u64,
) -> Result<GrainEnsemble> {
    if n_grains == 0 {
        return Err(Error::Configuration("n_grains must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&sigma_ratio) {
        return Err(Error::Configuration(format!(
            "sigma_ratio must lie in [0, 1), got {sigma_ratio}"
        )));
    }
    base.validate()?;
    let (ec0, _) = extract_ec_pr(base)?;
    let normal = Normal::new(ec0, sigma_ratio * ec0)
        .map_err(|e| Error::Configuration(format!("coercive-field distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let grains = (0..n_grains)
        .map(|_| {
            let ec = loop {
                let draw = normal.sample(&mut rng);
                if draw > REJECTION_FLOOR * ec0 {
                    break draw;
                }
            };
            Grain::new(base.scaled(ec / ec0), grain_length)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GrainEnsemble {
        grains,
        spacer_thickness: DEFAULT_SPACER_THICKNESS,
        spacer_eps_r: base.eps_r_background,
        rng_seed: seed,
    })
}
