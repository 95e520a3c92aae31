use crate::constants::NM;
use crate::ferro::GrainEnsemble;
use crate::stack::{Doping, Stack1D};
use crate::traps::TrapDistribution;
use crate::{Error, Result};

use super::conduction::MobilityModel;

/// Gate work function of the back-end-of-line preset (eV). A midgap metal
/// centres the polarization loop near -0.25 V; 6.6 eV shifts it by 2 V so the
/// loop straddles the 1.75 V read bias.
pub const BEOL_GATE_WORK_FUNCTION: f64 = 6.6;

/// Channel doping polarity relative to the n-type source and drain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviceMode {
    /// Donor-doped channel, normally on.
    Depletion,
    /// Acceptor-doped channel, normally off.
    Enhancement,
}

impl DeviceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DeviceMode::Depletion => "depletion",
            DeviceMode::Enhancement => "enhancement",
        }
    }

    /// Signed doping for a magnitude in cm^-3.
    pub fn doping(self, n_cm3: f64) -> Doping {
        match self {
            DeviceMode::Depletion => Doping::donor(n_cm3),
            DeviceMode::Enhancement => Doping::acceptor(n_cm3),
        }
    }
}

/// A ferroelectric FET: grains tiled along the channel over one shared
/// vertical stack.
#[derive(Debug, Clone, PartialEq)]
pub struct FeFETDesign {
    pub ensemble: GrainEnsemble,
    pub stack: Stack1D,
    /// `None` disables border traps.
    pub traps: Option<TrapDistribution>,
    pub mode: DeviceMode,
    pub mobility: MobilityModel,
    /// Device width (m).
    pub width: f64,
}

impl FeFETDesign {
    /// Thin-film SOI device with default border traps.
    pub fn soi(ensemble: GrainEnsemble) -> Self {
        Self {
            ensemble,
            stack: Stack1D::soi(),
            traps: Some(TrapDistribution::default()),
            mode: DeviceMode::Depletion,
            mobility: MobilityModel::default(),
            width: 1e-6,
        }
    }

    /// Polysilicon back-end-of-line device with constant 10 cm²/(V·s) mobility.
    pub fn beol(ensemble: GrainEnsemble, mode: DeviceMode, doping_cm3: f64, t_ch: f64) -> Self {
        let mut stack = Stack1D::beol(t_ch, mode.doping(doping_cm3));
        stack.gate_work_function = BEOL_GATE_WORK_FUNCTION;
        Self {
            ensemble,
            stack,
            traps: Some(TrapDistribution::default()),
            mode,
            mobility: MobilityModel::Constant { mu0: 10.0 },
            width: 1e-6,
        }
    }

    /// Grains plus spacers (m).
    pub fn gate_length(&self) -> f64 {
        self.ensemble.total_length()
    }

    pub fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        self.stack.validate()?;
        self.mobility.validate()?;
        if let Some(t) = &self.traps {
            t.validate()?;
        }
        if !(self.width > 0.0) {
            return Err(Error::Configuration("device width must be positive".into()));
        }
        let net = self.stack.doping.0;
        match self.mode {
            DeviceMode::Depletion if net < 0.0 => Err(Error::Configuration(
                "depletion mode needs a donor-doped channel".into(),
            )),
            DeviceMode::Enhancement if net > 0.0 => Err(Error::Configuration(
                "enhancement mode needs an acceptor-doped channel".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Sampled gate waveform `v_start -> v_peak -> v_start`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepProgram {
    pub v_start: f64,
    pub v_peak: f64,
    /// |dV_GS/dt| (V/s).
    pub slew_rate: f64,
    pub v_ds: f64,
    pub steps_per_branch: usize,
}

impl Default for SweepProgram {
    fn default() -> Self {
        Self {
            v_start: -3.0,
            v_peak: 3.0,
            slew_rate: 1.0,
            v_ds: 0.05,
            steps_per_branch: 120,
        }
    }
}

impl SweepProgram {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_peak > self.v_start) {
            return Err(Error::Configuration("sweep needs v_peak > v_start".into()));
        }
        if !(self.slew_rate > 0.0) {
            return Err(Error::Configuration("slew rate must be positive".into()));
        }
        if self.steps_per_branch == 0 {
            return Err(Error::Configuration("steps_per_branch must be >= 1".into()));
        }
        if !self.v_ds.is_finite() {
            return Err(Error::Configuration("v_ds must be finite".into()));
        }
        Ok(())
    }

    pub fn voltage_step(&self) -> f64 {
        (self.v_peak - self.v_start) / self.steps_per_branch as f64
    }

    /// Time spent at each bias point (s).
    pub fn hold_time(&self) -> f64 {
        self.voltage_step() / self.slew_rate
    }

    /// Bias points of both branches; each branch includes both end points so
    /// the two share one grid.
    pub fn samples(&self) -> Vec<(f64, super::Branch)> {
        let n = self.steps_per_branch;
        let dv = self.voltage_step();
        let fwd = (0..=n).map(|k| (self.v_start + dv * k as f64, super::Branch::Forward));
        let bwd = (0..=n).map(|k| (self.v_peak - dv * k as f64, super::Branch::Backward));
        fwd.chain(bwd).collect()
    }
}

/// Default BEOL channel thicknesses (m).
pub const BEOL_THICKNESSES: [f64; 2] = [40.0 * NM, 80.0 * NM];
/// Default BEOL channel dopings (cm^-3).
pub const BEOL_DOPINGS: [f64; 3] = [1e16, 1e17, 1e18];
