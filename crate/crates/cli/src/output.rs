//! CSV and manifest writers. Column headers are part of the file contract.

use std::fs;
use std::io::Write;
use std::path::Path;

use ferrosim_core::constants::{PER_CM2, NM};
use ferrosim_core::{DesignStudyRow, IVTrace, PVTrace};

use crate::config::SimConfig;
use crate::CliError;

pub const PV_HEADER: [&str; 6] = ["time_s", "v_V", "e_field_Vpm", "p_s_Cpm2", "p_t_Cpm2", "branch"];

pub const METRICS_HEADER: [&str; 13] = [
    "design_id",
    "mode",
    "doping_cm3",
    "t_ch_nm",
    "mw_V",
    "hrs_ohm",
    "lrs_ohm",
    "ratio",
    "peak_forward_A_per_um",
    "peak_backward_A_per_um",
    "ps_loop_width_V",
    "status",
    "message",
];

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Header of `iv_trace.csv` for a device with `grains` slices.
pub fn iv_header(grains: usize) -> Vec<String> {
    let mut h: Vec<String> = ["v_gs_V", "branch", "i_ds_A_per_um", "n_inv_mean_cm2", "q_trap_mean_Cpcm2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend((0..grains).map(|k| format!("p_s_grain_{k}_Cpm2")));
    h.extend((0..grains).map(|k| format!("n_inv_slice_{k}_cm2")));
    h
}

pub fn write_pv(path: &Path, trace: &PVTrace) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(PV_HEADER).map_err(csv_err(path))?;
    for r in &trace.records {
        w.write_record([
            num(r.time),
            num(r.applied_voltage),
            num(r.ferro_field),
            num(r.p_s),
            num(r.p_t),
            r.branch.as_str().to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_iv(path: &Path, trace: &IVTrace, grains: usize) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(iv_header(grains)).map_err(csv_err(path))?;
    for r in &trace.records {
        let mut row = vec![
            num(r.v_gs),
            r.branch.as_str().to_string(),
            num(r.i_ds),
            num(r.n_inv_mean() / PER_CM2),
            num(r.trapped_charge_mean() / PER_CM2),
        ];
        row.extend(r.p_s.iter().map(|&p| num(p)));
        row.extend(r.n_inv.iter().map(|&n| num(n / PER_CM2)));
        w.write_record(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_metrics(path: &Path, rows: &[DesignStudyRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(METRICS_HEADER).map_err(csv_err(path))?;
    for row in rows {
        let p = &row.point;
        let mut rec = vec![
            p.id.to_string(),
            p.mode.as_str().to_string(),
            num(p.doping_cm3),
            num(p.t_ch / NM),
        ];
        match &row.outcome {
            Ok(m) => rec.extend([
                opt(m.memory_window),
                num(m.hrs),
                num(m.lrs),
                num(m.ratio),
                num(m.peak_forward),
                num(m.peak_backward),
                opt(m.ps_loop_width),
                "ok".into(),
                String::new(),
            ]),
            Err(msg) => {
                rec.extend(std::iter::repeat_n(String::new(), 7));
                rec.extend(["failed".into(), msg.clone()]);
            }
        }
        w.write_record(rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// `manifest.toml`: provenance comments followed by the resolved config.
pub fn write_manifest(path: &Path, cfg: &SimConfig, status: &str) -> Result<(), CliError> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    let text = format!(
        "# ferrosim {}\n# seed = {}\n# status = {status}\n{}",
        env!("CARGO_PKG_VERSION"),
        cfg.seed,
        cfg.to_toml()
    );
    f.write_all(text.as_bytes()).map_err(io_err(path))
}
