use rayon::prelude::*;

use super::ensemble::GrainEnsemble;
use super::lgk::{LgkIntegrator, LgkOptions};
use crate::constants::EPS0;
use crate::{Error, Result};

/// Sweep direction of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Forward,
    Backward,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Forward => "forward",
            Branch::Backward => "backward",
        }
    }
}

/// Symmetric triangular ramp `-A -> +A -> -A` (or `+A -> -A -> +A` when
/// inverted), sampled uniformly in time.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularWave {
    /// Peak voltage A (V).
    pub amplitude: f64,
    /// |dV/dt| (V/s).
    pub slew_rate: f64,
    pub steps_per_branch: usize,
    pub inverted: bool,
}

impl Default for TriangularWave {
    fn default() -> Self {
        Self {
            amplitude: 3.0,
            slew_rate: 1.0,
            steps_per_branch: 600,
            inverted: false,
        }
    }
}

impl TriangularWave {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Configuration(format!(
                "waveform amplitude must be finite and >= 0, got {}",
                self.amplitude
            )));
        }
        if !(self.slew_rate > 0.0 && self.slew_rate.is_finite()) {
            return Err(Error::Configuration(format!(
                "slew rate must be positive, got {}",
                self.slew_rate
            )));
        }
        if self.steps_per_branch == 0 {
            return Err(Error::Configuration("steps_per_branch must be >= 1".into()));
        }
        Ok(())
    }

    /// Time between samples (s).
    pub fn time_step(&self) -> f64 {
        2.0 * self.amplitude / (self.slew_rate * self.steps_per_branch as f64)
    }

    /// The mirrored waveform `-V(t)`.
    pub fn negated(&self) -> Self {
        Self {
            inverted: !self.inverted,
            ..self.clone()
        }
    }

    /// `(time, voltage, branch)` for all `2N + 1` samples.
    pub fn samples(&self) -> Vec<(f64, f64, Branch)> {
        let n = self.steps_per_branch;
        let dt = self.time_step();
        let sign = if self.inverted { -1.0 } else { 1.0 };
        let dv = 2.0 * self.amplitude / n as f64;
        (0..=2 * n)
            .map(|k| {
                let (v, branch) = if k <= n {
                    (-self.amplitude + dv * k as f64, Branch::Forward)
                } else {
                    (self.amplitude - dv * (k - n) as f64, Branch::Backward)
                };
                (dt * k as f64, sign * v, branch)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PVRecord {
    pub time: f64,
    pub applied_voltage: f64,
    /// Field across the ferroelectric (V/m).
    pub ferro_field: f64,
    /// Area-weighted spontaneous polarization (C/m²).
    pub p_s: f64,
    /// `p_s + ε0·ε_r,F·E_F` (C/m²).
    pub p_t: f64,
    /// Area fraction of the grains with positive polarization.
    pub positive_fraction: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PVTrace {
    pub records: Vec<PVRecord>,
}

impl PVTrace {
    pub fn branch(&self, b: Branch) -> impl Iterator<Item = &PVRecord> {
        self.records.iter().filter(move |r| r.branch == b)
    }
}

/// Drive a metal–ferroelectric–metal capacitor with `wave`.
///
/// Every grain sees the uniform field `V/t_F`; with metal electrodes the grains
/// do not interact, so each grain history is integrated independently. The
/// starting state is the polarization stored in `ensemble`. The first sample
/// holds `V(0)` for one time step so the trace starts from a relaxed state.
/// Spacers carry no spontaneous polarization and share the background
/// permittivity, so they enter only through the area weights.
pub fn mfm_loop(
    ensemble: &GrainEnsemble,
    wave: &TriangularWave,
    eps_r_f: f64,
    t_f: f64,
) -> Result<PVTrace> {
    ensemble.validate()?;
    wave.validate()?;
    if !(t_f > 0.0) {
        return Err(Error::Configuration(format!(
            "ferroelectric thickness must be positive, got {t_f}"
        )));
    }
    let samples = wave.samples();
    let dt = wave.time_step();

    let histories = ensemble
        .grains
        .par_iter()
        .map(|g| {
            let lgk = LgkIntegrator::new(&g.coeffs, LgkOptions::default());
            let mut p = g.polarization;
            samples
                .iter()
                .map(|&(_, v, _)| {
                    if dt > 0.0 {
                        p = lgk.advance(p, v / t_f, dt)?;
                    }
                    Ok(p)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let total = ensemble.total_length();
    let weights: Vec<f64> = ensemble
        .grains
        .iter()
        .map(|g| g.length_along_channel / total)
        .collect();
    let grain_area: f64 = weights.iter().sum();

    let records = samples
        .iter()
        .enumerate()
        .map(|(k, &(time, v, branch))| {
            let p_s: f64 = histories
                .iter()
                .zip(&weights)
                .map(|(h, w)| w * h[k])
                .sum();
            let positive_fraction: f64 = histories
                .iter()
                .zip(&weights)
                .filter(|(h, _)| h[k] > 0.0)
                .map(|(_, w)| w)
                .sum::<f64>()
                / grain_area;
            let e = v / t_f;
            PVRecord {
                time,
                applied_voltage: v,
                ferro_field: e,
                p_s,
                p_t: p_s + EPS0 * eps_r_f * e,
                positive_fraction,
                branch,
            }
        })
        .collect();
    Ok(PVTrace { records })
}

/// 10–90 % switching-voltage spread of the forward branch.
///
/// Measured on the switched area fraction rather than on the mean
/// polarization, so the reversible response of unswitched grains does not
/// widen the transition. Crossings are located by linear interpolation
/// between samples. Returns `None` when fewer than 90 % of the grains switch.
pub fn switching_spread(trace: &PVTrace) -> Option<f64> {
    let fwd: Vec<(f64, f64)> = trace
        .branch(Branch::Forward)
        .map(|r| (r.applied_voltage, r.positive_fraction))
        .collect();
    let v10 = first_crossing(&fwd, 0.1)?;
    let v90 = first_crossing(&fwd, 0.9)?;
    Some((v90 - v10).abs())
}

/// First upward crossing of `level` by the ordered `(v, p)` samples.
fn first_crossing(pts: &[(f64, f64)], level: f64) -> Option<f64> {
    pts.windows(2).find_map(|w| {
        let ((v0, p0), (v1, p1)) = (w[0], w[1]);
        (p0 < level && p1 >= level).then(|| v0 + (level - p0) * (v1 - v0) / (p1 - p0))
    })
}
