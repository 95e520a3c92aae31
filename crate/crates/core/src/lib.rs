//! Grain-resolved quasi-static simulation of ferroelectric HfO2 capacitors
//! and ferroelectric FETs.
//!
//! The crate is organised bottom-up:
//!
//! * [`ferro`] holds single-grain Landau–Khalatnikov dynamics, coercive-field
//!   variability sampling and the metal–ferroelectric–metal loop driver.
//! * [`traps`] describes border traps in the interfacial oxide and their
//!   equilibrium charge.
//! * [`stack`] discretises one vertical slice of the gate stack and solves the
//!   nonlinear Poisson problem self-consistently with the grain polarization.
//! * [`device`] strings slices in series along the channel, runs gate sweeps
//!   and extracts memory metrics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod device;
mod error;
pub mod ferro;
pub mod stack;
pub mod traps;

pub use error::{Error, Result};

pub use device::{
    current_jumps, design_study, hrs_lrs, memory_window, ps_loop_width, series_current,
    slice_conductance, sweep_ids_vgs, Branch, DesignMetrics, DesignPoint, DesignStudyRow,
    DeviceMode, FeFETDesign, HrsLrs, IVRecord, IVTrace, MobilityModel, StudyGrid, SweepProgram,
};
pub use ferro::{
    extract_ec_pr, ferro_field, lgk_advance, mfm_loop, sample_ensemble, switching_spread, Grain,
    GrainEnsemble, LandauCoefficients, PVRecord, PVTrace, TriangularWave,
};
pub use stack::{
    build_mesh, semiconductor_charge, solve_poisson, Doping, Material, Mesh, PoissonOptions,
    SliceState, Stack1D, StackSolver,
};
pub use traps::{equilibrium_occupancy, trap_charge_density, EnergyWindow, TrapDistribution};
