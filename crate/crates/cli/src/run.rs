//! Study orchestration: build inputs from a config, run, write artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use ferrosim_core::{
    design_study, extract_ec_pr, mfm_loop, sweep_ids_vgs, switching_spread, Error as CoreError,
};

use crate::config::{SimConfig, StudyKind};
use crate::output;
use crate::CliError;

/// Overrides coming from the command line.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

/// What a finished run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
    /// Human-readable lines for stdout.
    pub report: Vec<String>,
}

/// Output directory precedence: flag, `FERROSIM_OUT`, config, `./out`.
pub fn resolve_output_dir(cfg: &SimConfig, flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os("FERROSIM_OUT").map(PathBuf::from))
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

pub fn resolve_jobs(cfg: &SimConfig, flag: Option<usize>) -> usize {
    flag.or(cfg.jobs)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

/// Run the configured study and write its artifacts.
///
/// A solver failure still leaves the partial trace and a manifest marked
/// `failed` on disk before the error is returned.
pub fn run_study(mut cfg: SimConfig, opts: &RunOptions) -> Result<RunSummary, CliError> {
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    let jobs = resolve_jobs(&cfg, opts.jobs);
    let dir = resolve_output_dir(&cfg, opts.out.as_deref());
    fs::create_dir_all(&dir).map_err(|source| CliError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut summary = RunSummary {
        output_dir: dir.clone(),
        files: Vec::new(),
        report: Vec::new(),
    };
    let outcome = match cfg.kind() {
        StudyKind::MfmLoop => run_mfm(&cfg, &dir, &mut summary),
        StudyKind::FefetSweep => run_sweep(&cfg, &dir, &mut summary),
        StudyKind::DesignStudy => run_design(&cfg, &dir, jobs, &mut summary),
        StudyKind::LandauExtract => run_landau(&cfg, &mut summary),
    };
    let manifest = dir.join("manifest.toml");
    let status = if outcome.is_ok() { "ok" } else { "failed" };
    output::write_manifest(&manifest, &cfg, status)?;
    summary.files.push(manifest);
    outcome.map(|_| summary)
}

fn run_landau(cfg: &SimConfig, summary: &mut RunSummary) -> Result<(), CliError> {
    let c = cfg.landau()?;
    let (ec, pr) = extract_ec_pr(&c)?;
    summary.report.push(format!("E_c = {ec:e} V/m"));
    summary.report.push(format!("P_r = {pr:e} C/m^2"));
    summary.report.push(format!("tau = {:e} s", c.tau()));
    Ok(())
}

fn run_mfm(cfg: &SimConfig, dir: &Path, summary: &mut RunSummary) -> Result<(), CliError> {
    let ens = cfg.ensemble()?;
    let trace = mfm_loop(&ens, &cfg.wave()?, cfg.landau.eps_r, cfg.mfm.t_f_nm * 1e-9)?;
    let path = dir.join("pv_trace.csv");
    output::write_pv(&path, &trace)?;
    summary.files.push(path);
    if let Some(s) = switching_spread(&trace) {
        summary.report.push(format!("switching spread = {s:.4} V"));
    }
    Ok(())
}

fn run_sweep(cfg: &SimConfig, dir: &Path, summary: &mut RunSummary) -> Result<(), CliError> {
    let design = cfg.design(cfg.ensemble()?)?;
    let grains = design.ensemble.len();
    let path = dir.join("iv_trace.csv");
    match sweep_ids_vgs(&design, &cfg.program()) {
        Ok(trace) => {
            output::write_iv(&path, &trace, grains)?;
            summary.files.push(path);
            let m = &cfg.metrics;
            match ferrosim_core::memory_window(&trace, m.i_ref_a_per_um) {
                Ok(mw) => summary.report.push(format!("memory window = {mw:.4} V")),
                Err(e) => summary.report.push(format!("memory window undefined: {e}")),
            }
            if let Some(w) = ferrosim_core::ps_loop_width(&trace) {
                summary.report.push(format!("polarization loop width = {w:.4} V"));
            }
            Ok(())
        }
        Err(CoreError::Sweep { v_gs, partial, source }) => {
            output::write_iv(&path, &partial, grains)?;
            summary.files.push(path);
            Err(CliError::Solver(CoreError::Sweep {
                v_gs,
                partial,
                source,
            }))
        }
        Err(e) => Err(e.into()),
    }
}

fn run_design(cfg: &SimConfig, dir: &Path, jobs: usize, summary: &mut RunSummary) -> Result<(), CliError> {
    let ens = cfg.ensemble()?;
    let points = cfg.study_grid().points();
    let m = &cfg.metrics;
    let rows = design_study(
        &points,
        |p| {
            cfg.grid_design(ens.clone(), p).map_err(|e| match e {
                CliError::Solver(inner) => inner,
                other => CoreError::Configuration(other.to_string()),
            })
        },
        &cfg.program(),
        m.i_ref_a_per_um,
        m.v_read_v,
        jobs,
    )?;
    let path = dir.join("metrics.csv");
    output::write_metrics(&path, &rows)?;
    summary.files.push(path);
    let failed: Vec<_> = rows.iter().filter(|r| r.outcome.is_err()).collect();
    for r in &rows {
        let p = &r.point;
        let line = match &r.outcome {
            Ok(m) => format!(
                "design {} ({} {:e} cm^-3, {} nm): ratio {:.3e}",
                p.id,
                p.mode.as_str(),
                p.doping_cm3,
                p.t_ch * 1e9,
                m.ratio
            ),
            Err(e) => format!("design {} failed: {e}", p.id),
        };
        summary.report.push(line);
    }
    match failed.first() {
        None => Ok(()),
        Some(r) => Err(CliError::Solver(CoreError::Configuration(format!(
            "{} of {} designs failed; first: design {}",
            failed.len(),
            rows.len(),
            r.point.id
        )))),
    }
}
