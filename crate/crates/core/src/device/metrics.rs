use crate::{Error, Result};

use super::sweep::IVTrace;
use super::Branch;

/// Default reference current for the memory window (A/µm).
pub const DEFAULT_I_REF: f64 = 1e-8;
/// Default read bias for HRS/LRS (V).
pub const DEFAULT_V_READ: f64 = 1.75;

/// Gate voltage where a branch first crosses `i_ref`, interpolated in log(I).
///
/// The forward branch is searched for an upward crossing, the backward
/// branch for a downward one.
pub fn crossing_voltage(trace: &IVTrace, branch: Branch, i_ref: f64) -> Option<f64> {
    let pts = trace.curve(branch);
    let rising = branch == Branch::Forward;
    pts.windows(2).find_map(|w| {
        let ((v0, i0), (v1, i1)) = (w[0], w[1]);
        let crosses = if rising {
            i0 < i_ref && i1 >= i_ref
        } else {
            i0 >= i_ref && i1 < i_ref
        };
        if !crosses {
            return None;
        }
        if i0 > 0.0 && i1 > 0.0 {
            let (l0, l1, lr) = (i0.ln(), i1.ln(), i_ref.ln());
            Some(v0 + (lr - l0) * (v1 - v0) / (l1 - l0))
        } else {
            Some(v0 + (i_ref - i0) * (v1 - v0) / (i1 - i0))
        }
    })
}

/// Memory window `|V_fwd(i_ref) - V_bwd(i_ref)|` (V).
pub fn memory_window(trace: &IVTrace, i_ref: f64) -> Result<f64> {
    let f = crossing_voltage(trace, Branch::Forward, i_ref).ok_or(Error::UndefinedMemoryWindow {
        branch: "forward",
        i_ref,
    })?;
    let b = crossing_voltage(trace, Branch::Backward, i_ref).ok_or(Error::UndefinedMemoryWindow {
        branch: "backward",
        i_ref,
    })?;
    Ok((f - b).abs())
}

/// Read-out resistances at one gate bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HrsLrs {
    /// High-resistance state (Ω); infinite when that branch carries no current.
    pub hrs: f64,
    /// Low-resistance state (Ω).
    pub lrs: f64,
    /// `hrs / lrs`, at least 1.
    pub ratio: f64,
    /// Branch holding the high-resistance state.
    pub hrs_branch: Branch,
    /// The ratio is not finite because the HRS branch is open.
    pub open: bool,
}

/// Branch current at `v`, interpolated in log(I) between grid points.
fn current_at(trace: &IVTrace, branch: Branch, v: f64) -> Option<f64> {
    let mut pts = trace.curve(branch);
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2).find_map(|w| {
        let ((v0, i0), (v1, i1)) = (w[0], w[1]);
        if !(v >= v0 && v <= v1) {
            return None;
        }
        if v1 == v0 {
            return Some(i0);
        }
        let t = (v - v0) / (v1 - v0);
        Some(if i0 > 0.0 && i1 > 0.0 {
            (i0.ln() + t * (i1.ln() - i0.ln())).exp()
        } else {
            i0 + t * (i1 - i0)
        })
    })
}

/// HRS and LRS at `v_read` and drain bias `v_ds`. The branch with the lower
/// current is the high-resistance state.
pub fn hrs_lrs(trace: &IVTrace, v_read: f64, v_ds: f64) -> Result<HrsLrs> {
    let f = current_at(trace, Branch::Forward, v_read).ok_or(Error::ReadOutOfRange(v_read))?;
    let b = current_at(trace, Branch::Backward, v_read).ok_or(Error::ReadOutOfRange(v_read))?;
    // per-µm currents to device currents
    let scale = trace.width * 1e6;
    let (low, high, hrs_branch) = if f <= b {
        (f, b, Branch::Forward)
    } else {
        (b, f, Branch::Backward)
    };
    let resistance = |i: f64| if i > 0.0 { v_ds / (i * scale) } else { f64::INFINITY };
    let (hrs, lrs) = (resistance(low), resistance(high));
    let open = !hrs.is_finite();
    let ratio = if low == high {
        1.0
    } else if open {
        f64::INFINITY
    } else {
        hrs / lrs
    };
    Ok(HrsLrs {
        hrs,
        lrs,
        ratio,
        hrs_branch,
        open,
    })
}

/// Width of the mean-P_S loop at `P_S = 0` (V): upward zero crossing on the
/// forward branch minus downward crossing on the backward branch.
pub fn ps_loop_width(trace: &IVTrace) -> Option<f64> {
    let zero = |branch: Branch, rising: bool| {
        let pts: Vec<(f64, f64)> = trace.branch(branch).map(|r| (r.v_gs, r.p_s_mean())).collect();
        pts.windows(2).find_map(|w| {
            let ((v0, p0), (v1, p1)) = (w[0], w[1]);
            let hit = if rising { p0 < 0.0 && p1 >= 0.0 } else { p0 > 0.0 && p1 <= 0.0 };
            hit.then(|| v0 - p0 * (v1 - v0) / (p1 - p0))
        })
    };
    Some(zero(Branch::Forward, true)? - zero(Branch::Backward, false)?)
}

/// Bias points of the forward branch where the current jumps against the
/// local trend.
///
/// A step counts as a jump when its ratio `I[k+1]/I[k]` exceeds both
/// neighbouring step ratios by more than `threshold` (0.2 = 20 %). Smooth
/// subthreshold growth and the bend into strong inversion never qualify, as
/// neither has an isolated peak in the step ratio. The returned voltages are
/// the upper ends of the jumping steps.
pub fn current_jumps(trace: &IVTrace, threshold: f64) -> Vec<f64> {
    let pts = trace.curve(Branch::Forward);
    let ratio = |k: usize| {
        let (a, b) = (pts[k].1, pts[k + 1].1);
        if a > 0.0 && b > 0.0 {
            b / a
        } else {
            1.0
        }
    };
    if pts.len() < 4 {
        return Vec::new();
    }
    (1..pts.len() - 2)
        .filter(|&k| {
            ratio(k) > (1.0 + threshold) * ratio(k - 1).max(ratio(k + 1))
        })
        .map(|k| pts[k + 1].0)
        .collect()
}

/// Largest current on a branch (A/µm).
pub fn peak_current(trace: &IVTrace, branch: Branch) -> f64 {
    trace.branch(branch).map(|r| r.i_ds).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::IVRecord;
    use approx::assert_relative_eq;

    fn rec(v: f64, branch: Branch, i: f64, p: f64) -> IVRecord {
        IVRecord {
            v_gs: v,
            branch,
            i_ds: i,
            p_s: vec![p],
            n_inv: vec![0.0],
            trapped_charge: vec![0.0],
            open_channel: false,
            neutrality_error: 0.0,
            clamped: false,
        }
    }

    /// Exponential subthreshold curve with threshold `vt` per branch.
    fn trace(vt_fwd: f64, vt_bwd: f64) -> IVTrace {
        let curve = |v: f64, vt: f64| {
            let x = 10f64.powf((v - vt) / 0.1);
            1e-8 * x / (1.0 + x / 1e4)
        };
        let grid: Vec<f64> = (0..=60).map(|k| -3.0 + 0.1 * k as f64).collect();
        let mut records: Vec<IVRecord> = grid
            .iter()
            .map(|&v| rec(v, Branch::Forward, curve(v, vt_fwd), if v > vt_fwd { 0.2 } else { -0.2 }))
            .collect();
        records.extend(
            grid.iter()
                .rev()
                .map(|&v| rec(v, Branch::Backward, curve(v, vt_bwd), if v > vt_bwd { 0.2 } else { -0.2 })),
        );
        IVTrace {
            records,
            v_ds: 0.05,
            width: 1e-6,
        }
    }

    #[test]
    fn identical_branches() {
        let t = trace(0.55, 0.55);
        assert!(memory_window(&t, 1e-8).unwrap().abs() < 1e-12);
        let r = hrs_lrs(&t, 1.0, 0.05).unwrap();
        assert_eq!(r.ratio, 1.0);
    }

    #[test]
    fn shifted_branch_gives_unit_window() {
        let t = trace(0.55, -0.45);
        assert_relative_eq!(memory_window(&t, 1e-8).unwrap(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(memory_window(&t, 1e-9).unwrap(), 1.0, max_relative = 1e-9);
        let r = hrs_lrs(&t, 0.0, 0.05).unwrap();
        assert_eq!(r.hrs_branch, Branch::Forward);
        assert!(r.ratio > 1.0);
        assert_relative_eq!(r.ratio, r.hrs / r.lrs);
        let w = ps_loop_width(&t).unwrap();
        assert!((w - 1.0).abs() < 0.11);
    }

    #[test]
    fn undefined_window_names_branch() {
        let t = trace(10.0, 0.0);
        match memory_window(&t, 1e-8) {
            Err(Error::UndefinedMemoryWindow { branch, .. }) => assert_eq!(branch, "forward"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn read_outside_sweep() {
        assert!(matches!(hrs_lrs(&trace(0.0, 0.0), 5.0, 0.05), Err(Error::ReadOutOfRange(_))));
    }

    #[test]
    fn open_hrs_branch() {
        let mut t = trace(0.0, -1.0);
        for r in t.records.iter_mut().filter(|r| r.branch == Branch::Forward) {
            r.i_ds = 0.0;
        }
        let r = hrs_lrs(&t, 0.5, 0.05).unwrap();
        assert!(r.open && r.hrs.is_infinite() && r.lrs.is_finite());
    }

    #[test]
    fn jumps_against_smooth_trend() {
        let mut t = trace(0.55, 0.55);
        assert!(current_jumps(&t, 0.2).is_empty());
        // two grains switching: extra factors at two bias points
        for r in t.records.iter_mut().filter(|r| r.branch == Branch::Forward) {
            if r.v_gs > 0.0 - 1e-9 {
                r.i_ds *= 1.4;
            }
            if r.v_gs > 0.3 - 1e-9 {
                r.i_ds *= 1.5;
            }
        }
        let jumps = current_jumps(&t, 0.2);
        assert_eq!(jumps.len(), 2, "{jumps:?}");
        assert!((jumps[0] - 0.0).abs() < 1e-9 && (jumps[1] - 0.3).abs() < 1e-9);
    }
}
