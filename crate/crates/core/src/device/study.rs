use rayon::prelude::*;

use crate::{Error, Result};

use super::design::{DeviceMode, FeFETDesign, SweepProgram, BEOL_DOPINGS, BEOL_THICKNESSES};
use super::metrics::{hrs_lrs, memory_window, peak_current, ps_loop_width};
use super::sweep::{sweep_ids_vgs, IVTrace};
use super::Branch;

/// One design of a study grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignPoint {
    pub id: usize,
    pub mode: DeviceMode,
    /// Doping magnitude (cm^-3); polarity follows the mode.
    pub doping_cm3: f64,
    /// Channel thickness (m).
    pub t_ch: f64,
}

/// Cartesian product of modes, dopings and channel thicknesses.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyGrid {
    pub modes: Vec<DeviceMode>,
    pub dopings_cm3: Vec<f64>,
    pub thicknesses: Vec<f64>,
}

impl Default for StudyGrid {
    fn default() -> Self {
        Self {
            modes: vec![DeviceMode::Depletion, DeviceMode::Enhancement],
            dopings_cm3: BEOL_DOPINGS.to_vec(),
            thicknesses: BEOL_THICKNESSES.to_vec(),
        }
    }
}

impl StudyGrid {
    /// Designs ordered by mode, then doping, then thickness.
    pub fn points(&self) -> Vec<DesignPoint> {
        let mut out = Vec::new();
        for &mode in &self.modes {
            for &doping_cm3 in &self.dopings_cm3 {
                for &t_ch in &self.thicknesses {
                    out.push(DesignPoint {
                        id: out.len(),
                        mode,
                        doping_cm3,
                        t_ch,
                    });
                }
            }
        }
        out
    }
}

/// Figures of merit extracted from one sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignMetrics {
    /// Memory window at the reference current (V); `None` when undefined.
    pub memory_window: Option<f64>,
    pub hrs: f64,
    pub lrs: f64,
    pub ratio: f64,
    /// Peak currents (A/µm).
    pub peak_forward: f64,
    pub peak_backward: f64,
    /// Width of the mean-P_S loop (V).
    pub ps_loop_width: Option<f64>,
}

impl DesignMetrics {
    pub fn from_trace(trace: &IVTrace, i_ref: f64, v_read: f64) -> Result<Self> {
        let read = hrs_lrs(trace, v_read, trace.v_ds)?;
        Ok(Self {
            memory_window: memory_window(trace, i_ref).ok(),
            hrs: read.hrs,
            lrs: read.lrs,
            ratio: read.ratio,
            peak_forward: peak_current(trace, Branch::Forward),
            peak_backward: peak_current(trace, Branch::Backward),
            ps_loop_width: ps_loop_width(trace),
        })
    }
}

#[derive(Debug, Clone)]
pub struct DesignStudyRow {
    pub point: DesignPoint,
    /// Metrics, or the reason the design failed.
    pub outcome: std::result::Result<DesignMetrics, String>,
    /// Full or partial sweep, when one was produced.
    pub trace: Option<IVTrace>,
}

/// Sweep every design point on a pool of `jobs` workers.
///
/// `build` turns a grid point into a device; a failing design is recorded in
/// its row and the rest of the study continues. Rows come back in grid order.
pub fn design_study<F>(
    points: &[DesignPoint],
    build: F,
    program: &SweepProgram,
    i_ref: f64,
    v_read: f64,
    jobs: usize,
) -> Result<Vec<DesignStudyRow>>
where
    F: Fn(&DesignPoint) -> Result<FeFETDesign> + Sync,
{
    if points.is_empty() {
        return Err(Error::Configuration("design study grid is empty".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Configuration(format!("worker pool: {e}")))?;
    Ok(pool.install(|| {
        points
            .par_iter()
            .map(|point| {
                let swept = build(point).and_then(|d| sweep_ids_vgs(&d, program));
                match swept {
                    Ok(trace) => DesignStudyRow {
                        point: *point,
                        outcome: DesignMetrics::from_trace(&trace, i_ref, v_read).map_err(|e| e.to_string()),
                        trace: Some(trace),
                    },
                    Err(Error::Sweep { partial, source, v_gs }) => DesignStudyRow {
                        point: *point,
                        outcome: Err(format!("sweep aborted at V_GS = {v_gs} V: {source}")),
                        trace: Some(*partial),
                    },
                    Err(e) => DesignStudyRow {
                        point: *point,
                        outcome: Err(e.to_string()),
                        trace: None,
                    },
                }
            })
            .collect()
    }))
}
