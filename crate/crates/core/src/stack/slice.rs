use crate::ferro::{LandauCoefficients, LgkIntegrator, LgkOptions};
use crate::traps::TrapDistribution;
use crate::{Error, Result};

use super::mesh::{build_mesh, Mesh, Stack1D};
use super::poisson::{PoissonOptions, PoissonProblem, PoissonSolution};

/// Controls for the polarization/electrostatics fixed-point loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterOptions {
    /// Fraction of the LGK update applied per outer iteration.
    pub damping: f64,
    /// Damping used for the single retry after a failed loop.
    pub fallback_damping: f64,
    /// Converged once |ΔP_S| falls below this (C/m²).
    pub tol: f64,
    pub max_iterations: usize,
    /// ΔP_S that has not decreased over this many iterations is an oscillation.
    pub oscillation_window: usize,
    /// How many times a hold may be halved after the loop fails.
    pub max_splits: usize,
}

impl Default for OuterOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            fallback_damping: 0.25,
            tol: 1e-8,
            max_iterations: 400,
            oscillation_window: 20,
            max_splits: 40,
        }
    }
}

/// Converged state of one slice at one gate bias.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceState {
    /// Grain spontaneous polarization (C/m²).
    pub polarization: f64,
    pub v_gate: f64,
    /// Potential per mesh node (V); empty before the first solve.
    pub psi: Vec<f64>,
    /// Electron density per node (m^-3), zero outside the channel.
    pub n: Vec<f64>,
    pub p: Vec<f64>,
    /// Trap charge density per node (C/m³), zero outside the interlayer.
    pub trap_charge: Vec<f64>,
    /// Electron sheet density `∫ n dx` (m^-2).
    pub n_inv: f64,
    /// Trapped sheet charge (C/m²).
    pub trapped_charge: f64,
    /// Field across the ferroelectric (V/m).
    pub ferro_field: f64,
    /// Electron-weighted normal field in the channel (V/m).
    pub effective_field: f64,
    pub converged: bool,
    pub poisson_residual: f64,
    /// Last |ΔP_S| of the outer loop (C/m²).
    pub polarization_update: f64,
    pub outer_iterations: usize,
    /// |Σ sheet charges| relative to the largest component.
    pub neutrality_error: f64,
    /// A carrier exponent hit the overflow guard.
    pub clamped: bool,
}

impl SliceState {
    /// Unsolved state holding only a polarization.
    pub fn unsolved(polarization: f64) -> Self {
        Self {
            polarization,
            v_gate: f64::NAN,
            psi: Vec::new(),
            n: Vec::new(),
            p: Vec::new(),
            trap_charge: Vec::new(),
            n_inv: 0.0,
            trapped_charge: 0.0,
            ferro_field: 0.0,
            effective_field: 0.0,
            converged: false,
            poisson_residual: f64::NAN,
            polarization_update: f64::NAN,
            outer_iterations: 0,
            neutrality_error: f64::NAN,
            clamped: false,
        }
    }
}

/// Solver for one vertical slice: Poisson at fixed polarization, and the
/// self-consistent point coupling it to the grain's LGK kinetics.
#[derive(Debug, Clone)]
pub struct StackSolver {
    problem: PoissonProblem,
    pub poisson: PoissonOptions,
    pub outer: OuterOptions,
    pub lgk: LgkOptions,
}

impl StackSolver {
    pub fn new(stack: Stack1D, traps: Option<TrapDistribution>) -> Result<Self> {
        let mesh = build_mesh(&stack)?;
        Self::with_mesh(stack, mesh, traps)
    }

    pub fn with_mesh(stack: Stack1D, mesh: Mesh, traps: Option<TrapDistribution>) -> Result<Self> {
        Ok(Self {
            problem: PoissonProblem::new(stack, mesh, traps)?,
            poisson: PoissonOptions::default(),
            outer: OuterOptions::default(),
            lgk: LgkOptions::default(),
        })
    }

    pub fn problem(&self) -> &PoissonProblem {
        &self.problem
    }

    pub fn stack(&self) -> &Stack1D {
        &self.problem.stack
    }

    pub fn mesh(&self) -> &Mesh {
        &self.problem.mesh
    }

    /// Electrostatics at frozen polarization.
    pub fn solve_frozen(&self, polarization: f64, v_gate: f64, guess: Option<&[f64]>) -> Result<SliceState> {
        let sol = self.problem.solve(polarization, v_gate, &self.poisson, guess)?;
        Ok(self.state(sol, polarization, v_gate, 0, 0.0))
    }

    /// Advance `prev` to gate bias `v_gate`, holding it for `wave_dt`.
    ///
    /// Each outer iteration solves Poisson at the current `P_S`, linearizes
    /// the ferroelectric field around it (`E_F + dE_F/dP·(P - P_S)`), and
    /// integrates the grain from its previous-bias polarization under that
    /// field. The result is blended in with the damping factor. A failed loop
    /// is retried once with the fallback damping. If that fails too, the hold
    /// is split into two halves solved in sequence: across a switching event
    /// the linearization only holds over a short stretch of the trajectory.
    pub fn self_consistent_point(
        &self,
        prev: &SliceState,
        coeffs: &LandauCoefficients,
        v_gate: f64,
        wave_dt: f64,
    ) -> Result<SliceState> {
        if !(wave_dt >= 0.0) {
            return Err(Error::Configuration(format!("wave_dt must be >= 0, got {wave_dt}")));
        }
        self.hold(prev, coeffs, v_gate, wave_dt, 0)
    }

    fn hold(
        &self,
        prev: &SliceState,
        coeffs: &LandauCoefficients,
        v_gate: f64,
        dt: f64,
        depth: usize,
    ) -> Result<SliceState> {
        let attempt = match self.outer_loop(prev, coeffs, v_gate, dt, self.outer.damping) {
            Err(Error::SelfConsistency { .. }) => {
                self.outer_loop(prev, coeffs, v_gate, dt, self.outer.fallback_damping)
            }
            other => other,
        };
        match attempt {
            Err(Error::SelfConsistency { .. }) if depth < self.outer.max_splits && dt > 0.0 => {
                let mid = self.hold(prev, coeffs, v_gate, 0.5 * dt, depth + 1)?;
                let mut end = self.hold(&mid, coeffs, v_gate, 0.5 * dt, depth + 1)?;
                end.outer_iterations += mid.outer_iterations;
                Ok(end)
            }
            other => other,
        }
    }

    fn outer_loop(
        &self,
        prev: &SliceState,
        coeffs: &LandauCoefficients,
        v_gate: f64,
        wave_dt: f64,
        damping: f64,
    ) -> Result<SliceState> {
        let lgk = LgkIntegrator::new(coeffs, self.lgk);
        let fi = self.problem.fe_il_node();
        let t_f = self.problem.ferro_thickness();
        let p_start = prev.polarization;
        let mut p = p_start;
        let mut guess = (!prev.psi.is_empty()).then(|| prev.psi.clone());
        let mut history: Vec<f64> = Vec::new();
        let window = self.outer.oscillation_window;

        for it in 1..=self.outer.max_iterations {
            let sol = self.problem.solve(p, v_gate, &self.poisson, guess.as_deref())?;
            let target = if wave_dt > 0.0 {
                let e_f = self.problem.ferro_field(&sol.psi);
                let slope = -self.problem.polarization_sensitivity(&sol.psi, p, &self.poisson)[fi] / t_f;
                lgk.advance_affine(p_start, e_f, slope, p, wave_dt)?
            } else {
                p_start
            };
            let delta = (target - p).abs();
            history.push(delta);
            if delta < self.outer.tol {
                return Ok(self.state(sol, p, v_gate, it, delta));
            }
            if history.len() > window && delta >= history[history.len() - 1 - window] {
                return Err(Error::SelfConsistency {
                    iterations: it,
                    damping,
                    reason: format!("|dP_S| did not decrease over {window} iterations"),
                    history,
                });
            }
            p += damping * (target - p);
            guess = Some(sol.psi);
        }
        Err(Error::SelfConsistency {
            iterations: self.outer.max_iterations,
            damping,
            reason: "iteration limit reached".into(),
            history,
        })
    }

    fn state(&self, sol: PoissonSolution, p_s: f64, v_gate: f64, iterations: usize, update: f64) -> SliceState {
        let pr = &self.problem;
        let (n, holes) = pr.carriers(&sol.psi, &self.poisson);
        let trap_charge = pr.trap_density(&sol.psi, &self.poisson);
        let balance = pr.charge_balance(&sol.psi, p_s, &self.poisson);
        let largest = balance.largest();
        SliceState {
            polarization: p_s,
            v_gate,
            n_inv: pr.electron_sheet(&n),
            trapped_charge: pr.trap_sheet(&trap_charge),
            ferro_field: pr.ferro_field(&sol.psi),
            effective_field: pr.effective_field(&sol.psi, &n),
            converged: true,
            poisson_residual: sol.residual,
            polarization_update: update,
            outer_iterations: iterations,
            neutrality_error: if largest > 0.0 { balance.total().abs() / largest } else { 0.0 },
            clamped: sol.clamped,
            psi: sol.psi,
            n,
            p: holes,
            trap_charge,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{CHI_SI, EG_SI, Q};
    use crate::ferro::extract_ec_pr;

    fn midgap_soi() -> Stack1D {
        let mut s = Stack1D::soi();
        s.gate_work_function = CHI_SI + 0.5 * EG_SI;
        s.back_work_function = s.gate_work_function;
        s
    }

    #[test]
    fn flat_band_converges_immediately() {
        let solver = StackSolver::new(midgap_soi(), None).unwrap();
        let coeffs = LandauCoefficients::si_hfo2();
        let s = solver
            .self_consistent_point(&SliceState::unsolved(0.0), &coeffs, 0.0, 0.05)
            .unwrap();
        assert_eq!(s.outer_iterations, 1);
        assert_eq!(s.polarization, 0.0);
        assert!(s.converged);
    }

    #[test]
    fn trapped_charge_exceeds_inversion_at_high_bias() {
        let solver = StackSolver::new(Stack1D::soi(), Some(TrapDistribution::default())).unwrap();
        let coeffs = LandauCoefficients::si_hfo2();
        let (_, pr) = extract_ec_pr(&coeffs).unwrap();
        let mut s = SliceState::unsolved(-pr);
        for k in 0..=30 {
            s = solver
                .self_consistent_point(&s, &coeffs, -3.0 + 0.2 * k as f64, 0.2)
                .unwrap();
            assert!(s.neutrality_error < 1e-6);
            assert!(s.polarization_update < 1e-4);
        }
        assert!(s.trapped_charge.abs() > Q * s.n_inv, "{} vs {}", s.trapped_charge, Q * s.n_inv);
    }

    #[test]
    fn without_traps_inversion_is_large() {
        let solver = StackSolver::new(Stack1D::soi(), None).unwrap();
        let coeffs = LandauCoefficients::si_hfo2();
        let (_, pr) = extract_ec_pr(&coeffs).unwrap();
        let mut s = SliceState::unsolved(-pr);
        for k in 0..=30 {
            s = solver
                .self_consistent_point(&s, &coeffs, -3.0 + 0.2 * k as f64, 0.2)
                .unwrap();
        }
        // comparable to the polarization scale rather than to a few µC/cm²
        assert!(Q * s.n_inv > 0.1 * pr, "q·N_inv {}", Q * s.n_inv);
    }

    #[test]
    fn inversion_non_decreasing_in_gate_bias() {
        let solver = StackSolver::new(Stack1D::soi(), Some(TrapDistribution::default())).unwrap();
        for p in [-0.2, 0.0, 0.15] {
            let mut prev: Option<SliceState> = None;
            for k in 0..=60 {
                let v = -3.0 + 0.1 * k as f64;
                let s = solver
                    .solve_frozen(p, v, prev.as_ref().map(|s| s.psi.as_slice()))
                    .unwrap();
                if let Some(pv) = &prev {
                    assert!(s.n_inv >= pv.n_inv * (1.0 - 1e-12), "P {p}, V {v}");
                }
                prev = Some(s);
            }
        }
    }

    #[test]
    fn mesh_halving_changes_inversion_little() {
        let stack = Stack1D::soi();
        let coarse = StackSolver::new(stack.clone(), Some(TrapDistribution::default())).unwrap();
        let fine_mesh = coarse.mesh().bisected();
        let fine = StackSolver::with_mesh(stack, fine_mesh, Some(TrapDistribution::default())).unwrap();
        for (p, v) in [(0.18, 3.0), (0.0, 1.0), (-0.18, 0.5)] {
            let a = coarse.solve_frozen(p, v, None).unwrap().n_inv;
            let b = fine.solve_frozen(p, v, None).unwrap().n_inv;
            assert!((a - b).abs() < 0.005 * b, "P {p} V {v}: {a:e} vs {b:e}");
        }
    }

    #[test]
    fn negative_hold_rejected() {
        let solver = StackSolver::new(Stack1D::soi(), None).unwrap();
        let coeffs = LandauCoefficients::si_hfo2();
        assert!(solver
            .self_consistent_point(&SliceState::unsolved(0.0), &coeffs, 0.0, -1.0)
            .is_err());
    }
}
