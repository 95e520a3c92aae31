//! Simulation configuration: a flat, sectioned TOML document in human units.
//!
//! Every key is optional. Missing keys take the preset of the selected study
//! (SOI device for `fefet-sweep`, BEOL device for `design-study`), and
//! [`parse_config`] fills them in so a parsed config is always complete.
//! Conversion to SI happens only in the `to_*` builders.

use serde::{Deserialize, Serialize};

use ferrosim_core::constants::NM;
use ferrosim_core::device::BEOL_GATE_WORK_FUNCTION;
use ferrosim_core::stack::Doping;
use ferrosim_core::traps::EnergyWindow;
use ferrosim_core::{
    DeviceMode, FeFETDesign, GrainEnsemble, LandauCoefficients, MobilityModel, Stack1D, StudyGrid,
    SweepProgram, TrapDistribution, TriangularWave,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    MfmLoop,
    FefetSweep,
    DesignStudy,
    LandauExtract,
}

impl StudyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StudyKind::MfmLoop => "mfm-loop",
            StudyKind::FefetSweep => "fefet-sweep",
            StudyKind::DesignStudy => "design-study",
            StudyKind::LandauExtract => "landau-extract",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Depletion,
    Enhancement,
}

impl From<ModeName> for DeviceMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Depletion => DeviceMode::Depletion,
            ModeName::Enhancement => DeviceMode::Enhancement,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MobilityName {
    Constant,
    EffectiveField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub study: Option<StudyKind>,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub output_dir: Option<String>,
    pub landau: LandauSection,
    pub grains: GrainSection,
    pub mfm: MfmSection,
    pub stack: StackSection,
    pub traps: TrapSection,
    pub device: DeviceSection,
    pub sweep: SweepSection,
    pub metrics: MetricsSection,
    pub grid: GridSection,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            study: None,
            seed: 1,
            jobs: None,
            output_dir: None,
            landau: LandauSection::default(),
            grains: GrainSection::default(),
            mfm: MfmSection::default(),
            stack: StackSection::default(),
            traps: TrapSection::default(),
            device: DeviceSection::default(),
            sweep: SweepSection::default(),
            metrics: MetricsSection::default(),
            grid: GridSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandauSection {
    /// m/F
    pub alpha: f64,
    /// m^5/(F·C^2)
    pub beta: f64,
    /// m^9/(F·C^4)
    pub gamma: f64,
    pub eps_r: f64,
    /// Ω·m
    pub resistivity: f64,
}

impl Default for LandauSection {
    fn default() -> Self {
        let c = LandauCoefficients::si_hfo2();
        Self {
            alpha: c.alpha,
            beta: c.beta,
            gamma: c.gamma,
            eps_r: c.eps_r_background,
            resistivity: c.resistivity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrainSection {
    pub count: Option<usize>,
    pub length_nm: f64,
    pub sigma_ec_ratio: f64,
    pub spacer_nm: f64,
}

impl Default for GrainSection {
    fn default() -> Self {
        Self {
            count: None,
            length_nm: 6.0,
            sigma_ec_ratio: 0.4,
            spacer_nm: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MfmSection {
    pub t_f_nm: f64,
    pub amplitude_v: f64,
    pub slew_v_per_s: f64,
    pub steps_per_branch: usize,
}

impl Default for MfmSection {
    fn default() -> Self {
        Self {
            t_f_nm: 10.0,
            amplitude_v: 3.0,
            slew_v_per_s: 1.0,
            steps_per_branch: 600,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StackSection {
    pub t_f_nm: f64,
    pub t_il_nm: f64,
    pub t_ch_nm: Option<f64>,
    pub t_box_nm: Option<f64>,
    pub eps_r_il: f64,
    pub eps_r_ch: f64,
    pub eps_r_box: f64,
    /// `"<cm^-3> donor"`, `"<cm^-3> acceptor"` or `"0"`.
    pub doping: Option<String>,
    pub gate_work_function_ev: Option<f64>,
    pub back_work_function_ev: f64,
    pub temperature_k: f64,
}

impl Default for StackSection {
    fn default() -> Self {
        let s = Stack1D::soi();
        Self {
            t_f_nm: s.t_f / NM,
            t_il_nm: s.t_il / NM,
            t_ch_nm: None,
            t_box_nm: None,
            eps_r_il: s.eps_r_il,
            eps_r_ch: s.eps_r_ch,
            eps_r_box: s.eps_r_box,
            doping: None,
            gate_work_function_ev: None,
            back_work_function_ev: s.back_work_function,
            temperature_k: s.temperature,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrapSection {
    pub enabled: bool,
    /// eV^-1 cm^-3
    pub density_acceptor: f64,
    pub density_donor: f64,
    /// Energy above the valence-band edge (eV).
    pub acceptor_window_ev: [f64; 2],
    pub donor_window_ev: [f64; 2],
    pub energy_grid_points: usize,
}

impl Default for TrapSection {
    fn default() -> Self {
        let t = TrapDistribution::default();
        Self {
            enabled: true,
            density_acceptor: t.density_acceptor,
            density_donor: t.density_donor,
            acceptor_window_ev: [t.acceptor_window.low, t.acceptor_window.high],
            donor_window_ev: [t.donor_window.low, t.donor_window.high],
            energy_grid_points: t.energy_grid_points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceSection {
    pub mode: Option<ModeName>,
    pub width_um: f64,
    pub mobility: Option<MobilityName>,
    pub mu0_cm2_per_vs: Option<f64>,
    pub e_crit_v_per_m: f64,
    pub mobility_exponent: f64,
}

impl Default for DeviceSection {
    fn default() -> Self {
        Self {
            mode: None,
            width_um: 1.0,
            mobility: None,
            mu0_cm2_per_vs: None,
            e_crit_v_per_m: 1e8,
            mobility_exponent: 1.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub v_start_v: f64,
    pub v_peak_v: f64,
    pub slew_v_per_s: f64,
    pub v_ds_v: f64,
    pub steps_per_branch: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        let p = SweepProgram::default();
        Self {
            v_start_v: p.v_start,
            v_peak_v: p.v_peak,
            slew_v_per_s: p.slew_rate,
            v_ds_v: p.v_ds,
            steps_per_branch: p.steps_per_branch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    pub i_ref_a_per_um: f64,
    pub v_read_v: f64,
}

impl Default for MetricsSection {
    fn default() -> Self {
        Self {
            i_ref_a_per_um: ferrosim_core::device::DEFAULT_I_REF,
            v_read_v: ferrosim_core::device::DEFAULT_V_READ,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub modes: Vec<ModeName>,
    pub dopings_cm3: Vec<f64>,
    pub t_ch_nm: Vec<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = StudyGrid::default();
        Self {
            modes: vec![ModeName::Depletion, ModeName::Enhancement],
            dopings_cm3: g.dopings_cm3,
            t_ch_nm: g.thicknesses.iter().map(|t| t / NM).collect(),
        }
    }
}

/// Parse a doping string: `"1e17 donor"`, `"1e16 acceptor"` or `"0"`.
pub fn parse_doping(s: &str) -> Result<Doping, String> {
    let mut parts = s.split_whitespace();
    let value: f64 = parts
        .next()
        .ok_or("empty doping")?
        .parse()
        .map_err(|e| format!("doping `{s}`: {e}"))?;
    if !(value >= 0.0 && value.is_finite()) {
        return Err(format!("doping `{s}`: magnitude must be finite and >= 0"));
    }
    let d = match parts.next() {
        Some("donor") => Doping::donor(value),
        Some("acceptor") => Doping::acceptor(value),
        None if value == 0.0 => Doping::intrinsic(),
        None => return Err(format!("doping `{s}`: add `donor` or `acceptor`")),
        Some(other) => return Err(format!("doping `{s}`: unknown polarity `{other}`")),
    };
    if parts.next().is_some() {
        return Err(format!("doping `{s}`: trailing text"));
    }
    Ok(d)
}

fn format_doping(d: Doping) -> String {
    match d.0 {
        x if x > 0.0 => format!("{x:e} donor"),
        x if x < 0.0 => format!("{:e} acceptor", -x),
        _ => "0".into(),
    }
}

/// Parse, apply study presets and validate. `kind` is the study selected on
/// the command line; it must agree with a `study` key in the document.
pub fn parse_config(text: &str, kind: Option<StudyKind>) -> Result<SimConfig, CliError> {
    let mut cfg: SimConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.study = match (cfg.study, kind) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Config(format!(
                "config is for `{}` but `{}` was requested",
                a.as_str(),
                b.as_str()
            )))
        }
        (Some(a), _) | (None, Some(a)) => Some(a),
        (None, None) => return Err(CliError::Config("missing study kind (key `study`)".into())),
    };
    cfg.apply_presets();
    cfg.validate()?;
    Ok(cfg)
}

impl SimConfig {
    pub fn kind(&self) -> StudyKind {
        self.study.expect("study set by parse_config")
    }

    fn apply_presets(&mut self) {
        let kind = self.kind();
        let beol = kind == StudyKind::DesignStudy;
        self.grains.count.get_or_insert(match kind {
            StudyKind::MfmLoop => 100,
            StudyKind::DesignStudy => 25,
            _ => 4,
        });
        let s = &mut self.stack;
        s.t_ch_nm.get_or_insert(if beol { 40.0 } else { 6.0 });
        s.t_box_nm.get_or_insert(if beol { 200.0 } else { 30.0 });
        s.gate_work_function_ev
            .get_or_insert(if beol { BEOL_GATE_WORK_FUNCTION } else { 4.6 });
        let d = &mut self.device;
        let mode = *d.mode.get_or_insert(ModeName::Depletion);
        s.doping.get_or_insert_with(|| {
            if beol {
                format_doping(DeviceMode::from(mode).doping(1e17))
            } else {
                "0".into()
            }
        });
        d.mobility.get_or_insert(if beol {
            MobilityName::Constant
        } else {
            MobilityName::EffectiveField
        });
        d.mu0_cm2_per_vs.get_or_insert(if beol { 10.0 } else { 300.0 });
    }

    fn validate(&self) -> Result<(), CliError> {
        let err = |m: String| Err(CliError::Config(m));
        let sigma = self.grains.sigma_ec_ratio;
        if !(0.0..1.0).contains(&sigma) {
            return err(format!("grains.sigma_ec_ratio must lie in [0, 1), got {sigma}"));
        }
        if self.grains.count == Some(0) {
            return err("grains.count must be >= 1".into());
        }
        if self.jobs == Some(0) {
            return err("jobs must be >= 1".into());
        }
        let doping = parse_doping(self.stack.doping.as_deref().unwrap_or("0")).map_err(CliError::Config)?;
        if self.kind() == StudyKind::FefetSweep {
            match (self.device.mode, doping.0) {
                (Some(ModeName::Depletion), x) if x < 0.0 => {
                    return err("stack.doping: depletion mode needs a donor doping".into())
                }
                (Some(ModeName::Enhancement), x) if x > 0.0 => {
                    return err("stack.doping: enhancement mode needs an acceptor doping".into())
                }
                _ => {}
            }
        }
        if self.kind() == StudyKind::DesignStudy
            && (self.grid.modes.is_empty() || self.grid.dopings_cm3.is_empty() || self.grid.t_ch_nm.is_empty())
        {
            return err("grid: modes, dopings_cm3 and t_ch_nm must be non-empty".into());
        }
        if self.grid.dopings_cm3.iter().any(|&d| !(d >= 0.0)) || self.grid.t_ch_nm.iter().any(|&t| !(t > 0.0)) {
            return err("grid: dopings must be >= 0 and thicknesses > 0".into());
        }
        // Build everything once so range errors surface at parse time.
        self.landau()?;
        self.wave()?;
        if matches!(self.kind(), StudyKind::FefetSweep | StudyKind::DesignStudy) {
            self.stack_for(doping, self.stack.t_ch_nm.unwrap_or(6.0) * NM).validate()?;
            self.traps()?;
            self.mobility().validate()?;
            self.program().validate()?;
        }
        Ok(())
    }

    pub fn landau(&self) -> Result<LandauCoefficients, CliError> {
        let l = &self.landau;
        Ok(LandauCoefficients::new(l.alpha, l.beta, l.gamma, l.eps_r, l.resistivity)?)
    }

    pub fn ensemble(&self) -> Result<GrainEnsemble, CliError> {
        let g = &self.grains;
        let mut ens = ferrosim_core::sample_ensemble(
            g.count.unwrap_or(1),
            g.length_nm * NM,
            &self.landau()?,
            g.sigma_ec_ratio,
            self.seed,
        )?;
        ens.spacer_thickness = g.spacer_nm * NM;
        Ok(ens)
    }

    pub fn wave(&self) -> Result<TriangularWave, CliError> {
        let w = TriangularWave {
            amplitude: self.mfm.amplitude_v,
            slew_rate: self.mfm.slew_v_per_s,
            steps_per_branch: self.mfm.steps_per_branch,
            inverted: false,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn doping(&self) -> Doping {
        parse_doping(self.stack.doping.as_deref().unwrap_or("0")).expect("validated")
    }

    fn stack_for(&self, doping: Doping, t_ch: f64) -> Stack1D {
        let s = &self.stack;
        Stack1D {
            t_f: s.t_f_nm * NM,
            t_il: s.t_il_nm * NM,
            t_ch,
            t_box: s.t_box_nm.unwrap_or(30.0) * NM,
            eps_r_f: self.landau.eps_r,
            eps_r_il: s.eps_r_il,
            eps_r_ch: s.eps_r_ch,
            eps_r_box: s.eps_r_box,
            doping,
            gate_work_function: s.gate_work_function_ev.unwrap_or(4.6),
            back_work_function: s.back_work_function_ev,
            temperature: s.temperature_k,
        }
    }

    pub fn traps(&self) -> Result<Option<TrapDistribution>, CliError> {
        let t = &self.traps;
        if !t.enabled {
            return Ok(None);
        }
        let d = TrapDistribution {
            density_acceptor: t.density_acceptor,
            density_donor: t.density_donor,
            acceptor_window: EnergyWindow {
                low: t.acceptor_window_ev[0],
                high: t.acceptor_window_ev[1],
            },
            donor_window: EnergyWindow {
                low: t.donor_window_ev[0],
                high: t.donor_window_ev[1],
            },
            energy_grid_points: t.energy_grid_points,
        };
        d.validate()?;
        Ok(Some(d))
    }

    pub fn mobility(&self) -> MobilityModel {
        let d = &self.device;
        let mu0 = d.mu0_cm2_per_vs.unwrap_or(300.0);
        match d.mobility.unwrap_or(MobilityName::EffectiveField) {
            MobilityName::Constant => MobilityModel::Constant { mu0 },
            MobilityName::EffectiveField => MobilityModel::EffectiveField {
                mu0,
                e_crit: d.e_crit_v_per_m,
                exponent: d.mobility_exponent,
            },
        }
    }

    pub fn program(&self) -> SweepProgram {
        let s = &self.sweep;
        SweepProgram {
            v_start: s.v_start_v,
            v_peak: s.v_peak_v,
            slew_rate: s.slew_v_per_s,
            v_ds: s.v_ds_v,
            steps_per_branch: s.steps_per_branch,
        }
    }

    /// Device for a single sweep.
    pub fn design(&self, ensemble: GrainEnsemble) -> Result<FeFETDesign, CliError> {
        let d = FeFETDesign {
            ensemble,
            stack: self.stack_for(self.doping(), self.stack.t_ch_nm.unwrap_or(6.0) * NM),
            traps: self.traps()?,
            mode: self.device.mode.unwrap_or(ModeName::Depletion).into(),
            mobility: self.mobility(),
            width: self.device.width_um * 1e-6,
        };
        d.validate()?;
        Ok(d)
    }

    /// Device for one point of the design grid.
    pub fn grid_design(
        &self,
        ensemble: GrainEnsemble,
        point: &ferrosim_core::DesignPoint,
    ) -> Result<FeFETDesign, CliError> {
        let d = FeFETDesign {
            ensemble,
            stack: self.stack_for(point.mode.doping(point.doping_cm3), point.t_ch),
            traps: self.traps()?,
            mode: point.mode,
            mobility: self.mobility(),
            width: self.device.width_um * 1e-6,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn study_grid(&self) -> StudyGrid {
        StudyGrid {
            modes: self.grid.modes.iter().map(|&m| m.into()).collect(),
            dopings_cm3: self.grid.dopings_cm3.clone(),
            thicknesses: self.grid.t_ch_nm.iter().map(|t| t * NM).collect(),
        }
    }

    /// The complete config as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
