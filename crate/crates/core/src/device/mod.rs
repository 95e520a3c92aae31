//! FeFET assembly: grain slices in series along the channel, quasi-static
//! gate sweeps, memory metrics and the design-space study.

mod conduction;
mod design;
mod metrics;
mod study;
mod sweep;

pub use crate::ferro::Branch;
pub use conduction::{segment_conductance, series_current, slice_conductance, MobilityModel, SeriesCurrent};
pub use design::{
    DeviceMode, FeFETDesign, SweepProgram, BEOL_DOPINGS, BEOL_GATE_WORK_FUNCTION, BEOL_THICKNESSES,
};
pub use metrics::{
    crossing_voltage, current_jumps, hrs_lrs, memory_window, peak_current, ps_loop_width, HrsLrs,
    DEFAULT_I_REF, DEFAULT_V_READ,
};
pub use study::{design_study, DesignMetrics, DesignPoint, DesignStudyRow, StudyGrid};
pub use sweep::{channel_conductances, sweep_ids_vgs, IVRecord, IVTrace};
