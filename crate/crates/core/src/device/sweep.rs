use rayon::prelude::*;

use crate::stack::{SliceState, StackSolver};
use crate::{Error, Result};

use super::conduction::{segment_conductance, series_current};
use super::design::{FeFETDesign, SweepProgram};
use super::Branch;

/// One bias point of a gate sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct IVRecord {
    pub v_gs: f64,
    pub branch: Branch,
    /// Drain current per unit width (A/µm).
    pub i_ds: f64,
    /// Spontaneous polarization of each grain (C/m²).
    pub p_s: Vec<f64>,
    /// Electron sheet density under each grain (m^-2).
    pub n_inv: Vec<f64>,
    /// Trapped sheet charge under each grain (C/m²).
    pub trapped_charge: Vec<f64>,
    /// Some channel segment carried no electrons.
    pub open_channel: bool,
    /// Worst relative charge-balance error over the slices.
    pub neutrality_error: f64,
    /// Some carrier exponent hit the overflow guard.
    pub clamped: bool,
}

impl IVRecord {
    /// Mean electron sheet density over the slices (m^-2).
    pub fn n_inv_mean(&self) -> f64 {
        mean(&self.n_inv)
    }

    pub fn trapped_charge_mean(&self) -> f64 {
        mean(&self.trapped_charge)
    }

    /// Unweighted mean grain polarization (C/m²).
    pub fn p_s_mean(&self) -> f64 {
        mean(&self.p_s)
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Ordered records of a gate sweep, forward branch first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IVTrace {
    pub records: Vec<IVRecord>,
    pub v_ds: f64,
    /// Device width (m).
    pub width: f64,
}

impl IVTrace {
    pub fn branch(&self, b: Branch) -> impl Iterator<Item = &IVRecord> {
        self.records.iter().filter(move |r| r.branch == b)
    }

    /// `(V_GS, I_DS)` pairs of one branch in sweep order.
    pub fn curve(&self, b: Branch) -> Vec<(f64, f64)> {
        self.branch(b).map(|r| (r.v_gs, r.i_ds)).collect()
    }
}

/// Quasi-static I_DS–V_GS sweep.
///
/// Every slice starts from the polarization stored in the design's ensemble
/// and is advanced through the bias points, holding each for the program's
/// step time. Slices are solved in parallel within a bias step. On failure
/// the records collected so far travel inside [`Error::Sweep`].
pub fn sweep_ids_vgs(design: &FeFETDesign, program: &SweepProgram) -> Result<IVTrace> {
    design.validate()?;
    program.validate()?;
    let solver = StackSolver::new(design.stack.clone(), design.traps.clone())?;
    let grains = &design.ensemble.grains;
    let mut states: Vec<SliceState> = grains.iter().map(|g| SliceState::unsolved(g.polarization)).collect();
    let mut trace = IVTrace {
        records: Vec::new(),
        v_ds: program.v_ds,
        width: design.width,
    };
    let hold = program.hold_time();

    for (v, branch) in program.samples() {
        let next = states
            .par_iter()
            .zip(grains.par_iter())
            .map(|(s, g)| solver.self_consistent_point(s, &g.coeffs, v, hold))
            .collect::<Result<Vec<_>>>();
        match next {
            Ok(n) => states = n,
            Err(e) => {
                return Err(Error::Sweep {
                    v_gs: v,
                    partial: Box::new(trace),
                    source: Box::new(e),
                })
            }
        }
        trace.records.push(record(design, &states, v, branch, program.v_ds));
    }
    Ok(trace)
}

/// Channel segment conductances: one per grain, plus one per spacer using
/// the mean sheet density and mobility of its neighbours.
pub fn channel_conductances(design: &FeFETDesign, states: &[SliceState]) -> Vec<f64> {
    let ens = &design.ensemble;
    let mob: Vec<f64> = states
        .iter()
        .map(|s| design.mobility.mobility(s.effective_field))
        .collect();
    let mut g = Vec::with_capacity(2 * states.len());
    for (i, s) in states.iter().enumerate() {
        if i > 0 && ens.spacer_thickness > 0.0 {
            let n = 0.5 * (states[i - 1].n_inv + s.n_inv);
            let mu = 0.5 * (mob[i - 1] + mob[i]);
            g.push(segment_conductance(n, mu, ens.spacer_thickness, design.width));
        }
        g.push(segment_conductance(
            s.n_inv,
            mob[i],
            ens.grains[i].length_along_channel,
            design.width,
        ));
    }
    g
}

fn record(design: &FeFETDesign, states: &[SliceState], v: f64, branch: Branch, v_ds: f64) -> IVRecord {
    let current = series_current(&channel_conductances(design, states), v_ds);
    IVRecord {
        v_gs: v,
        branch,
        i_ds: current.current / (design.width * 1e6),
        p_s: states.iter().map(|s| s.polarization).collect(),
        n_inv: states.iter().map(|s| s.n_inv).collect(),
        trapped_charge: states.iter().map(|s| s.trapped_charge).collect(),
        open_channel: current.open,
        neutrality_error: states.iter().map(|s| s.neutrality_error).fold(0.0, f64::max),
        clamped: states.iter().any(|s| s.clamped),
    }
}

