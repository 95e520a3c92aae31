use crate::constants::{thermal_voltage, CHI_SI, EG_SI, EPS0, NM};
use crate::traps::TrapDistribution;
use crate::{Error, Result};

use super::mesh::{Material, Mesh, Stack1D};
use super::semiconductor::{neutral_potential, semiconductor_charge};
use super::tridiag::solve_tridiagonal;

/// Newton controls for the slice Poisson problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonOptions {
    /// Residual ∞-norm target in units of ε0·V_T/(1 nm).
    pub tol: f64,
    pub max_iterations: usize,
    /// Per-node update clamp in thermal voltages.
    pub max_update: f64,
    /// Electron and hole quasi-Fermi potentials (V).
    pub phi_n: f64,
    pub phi_p: f64,
}

impl Default for PoissonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iterations: 200,
            max_update: 1.0,
            phi_n: 0.0,
            phi_p: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    /// Electrostatic potential per node, referenced to the intrinsic level (V).
    pub psi: Vec<f64>,
    pub iterations: usize,
    /// Final normalized residual ∞-norm.
    pub residual: f64,
    pub residual_history: Vec<f64>,
    /// Some carrier exponent hit the overflow guard.
    pub clamped: bool,
}

/// Sheet charges of a solved slice (C/m²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeBalance {
    pub gate: f64,
    /// Bound charge at the gate/ferroelectric interface (-P_S).
    pub bound_top: f64,
    /// Bound charge at the ferroelectric/interlayer interface (+P_S).
    pub bound_bottom: f64,
    pub trap: f64,
    pub semiconductor: f64,
    pub back: f64,
}

impl ChargeBalance {
    pub fn total(&self) -> f64 {
        self.gate + self.bound_top + self.bound_bottom + self.trap + self.semiconductor + self.back
    }

    pub fn largest(&self) -> f64 {
        [
            self.gate,
            self.bound_top,
            self.bound_bottom,
            self.trap,
            self.semiconductor,
            self.back,
        ]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Finite-volume discretization of one slice.
///
/// Displacement `D = -ε dψ/dx + P_S` is constant per element (`P_S` only in
/// ferroelectric elements), and node `i` balances
/// `D[i+½] - D[i-½] = Q_i` with `Q_i` the lumped semiconductor and trap
/// charge of its control volume. The gate and back contact are Dirichlet.
#[derive(Debug, Clone)]
pub struct PoissonProblem {
    pub stack: Stack1D,
    pub mesh: Mesh,
    pub traps: Option<TrapDistribution>,
    /// ε/h per element (F/m²).
    coupling: Vec<f64>,
    vol_semi: Vec<f64>,
    vol_il: Vec<f64>,
    is_fe: Vec<bool>,
    /// Ferroelectric/interlayer interface node.
    fe_il: usize,
    q_ref: f64,
}

struct Assembly {
    f: Vec<f64>,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    clamped: bool,
}

impl PoissonProblem {
    pub fn new(stack: Stack1D, mesh: Mesh, traps: Option<TrapDistribution>) -> Result<Self> {
        stack.validate()?;
        if let Some(t) = &traps {
            t.validate()?;
        }
        let fe_il = mesh
            .interface_after(Material::Ferroelectric)
            .ok_or_else(|| Error::Configuration("mesh has no ferroelectric layer".into()))?;
        let coupling = (0..mesh.material.len())
            .map(|k| EPS0 * stack.eps_r(mesh.material[k]) / mesh.spacing(k))
            .collect();
        let vol_semi = (0..mesh.len())
            .map(|i| mesh.volume(i, Material::Semiconductor))
            .collect();
        let vol_il = (0..mesh.len())
            .map(|i| mesh.volume(i, Material::Interlayer))
            .collect();
        let is_fe = mesh.material.iter().map(|&m| m == Material::Ferroelectric).collect();
        let q_ref = EPS0 * thermal_voltage(stack.temperature) / NM;
        Ok(Self {
            stack,
            mesh,
            traps: traps.filter(|t| !t.is_empty()),
            coupling,
            vol_semi,
            vol_il,
            is_fe,
            fe_il,
            q_ref,
        })
    }

    pub fn fe_il_node(&self) -> usize {
        self.fe_il
    }

    /// Dirichlet values at the gate and back contact for gate bias `v_gate`.
    pub fn boundary(&self, v_gate: f64) -> (f64, f64) {
        let reference = CHI_SI + 0.5 * EG_SI;
        (
            v_gate - (self.stack.gate_work_function - reference),
            -(self.stack.back_work_function - reference),
        )
    }

    /// Starting profile: neutral channel, linear drops across the oxides.
    pub fn initial_guess(&self, v_gate: f64) -> Vec<f64> {
        let (top, back) = self.boundary(v_gate);
        let bulk = neutral_potential(self.stack.doping, self.stack.temperature);
        let x = &self.mesh.x;
        let x_fi = x[self.fe_il];
        let sb = self
            .mesh
            .interface_after(Material::Semiconductor)
            .expect("mesh has a channel");
        let (x_sb, x_end) = (x[sb], *x.last().expect("nodes"));
        x.iter()
            .enumerate()
            .map(|(i, &xi)| {
                if i <= self.fe_il {
                    top + (bulk - top) * xi / x_fi
                } else if i <= sb {
                    bulk
                } else {
                    bulk + (back - bulk) * (xi - x_sb) / (x_end - x_sb)
                }
            })
            .collect()
    }

    /// Displacement per element (C/m²).
    pub fn displacement(&self, psi: &[f64], p_s: f64) -> Vec<f64> {
        (0..self.coupling.len())
            .map(|k| {
                let d = -self.coupling[k] * (psi[k + 1] - psi[k]);
                if self.is_fe[k] {
                    d + p_s
                } else {
                    d
                }
            })
            .collect()
    }

    fn trap_fermi_level(opts: &PoissonOptions) -> f64 {
        -opts.phi_n
    }

    /// Node charge (C/m²) and its derivative.
    fn node_charge(&self, i: usize, psi: f64, opts: &PoissonOptions) -> (f64, f64, bool) {
        let t = self.stack.temperature;
        let (mut q, mut dq, mut clamped) = (0.0, 0.0, false);
        if self.vol_semi[i] > 0.0 {
            let c = semiconductor_charge(psi, opts.phi_n, opts.phi_p, self.stack.doping, t);
            q += c.rho * self.vol_semi[i];
            dq += c.drho_dpsi * self.vol_semi[i];
            clamped = c.clamped;
        }
        if let (Some(traps), true) = (&self.traps, self.vol_il[i] > 0.0) {
            let (rho, drho) = traps.charge(psi, Self::trap_fermi_level(opts), t);
            q += rho * self.vol_il[i];
            dq += drho * self.vol_il[i];
        }
        (q, dq, clamped)
    }

    /// Residual and Jacobian over the interior nodes `1..n-1`.
    fn assemble(&self, psi: &[f64], p_s: f64, opts: &PoissonOptions) -> Assembly {
        let n = psi.len();
        let d = self.displacement(psi, p_s);
        let m = n - 2;
        let mut asm = Assembly {
            f: vec![0.0; m],
            lower: vec![0.0; m],
            diag: vec![0.0; m],
            upper: vec![0.0; m],
            clamped: false,
        };
        for i in 1..n - 1 {
            let (q, dq, clamped) = self.node_charge(i, psi[i], opts);
            asm.clamped |= clamped;
            let r = i - 1;
            asm.f[r] = d[i] - d[i - 1] - q;
            asm.diag[r] = self.coupling[i] + self.coupling[i - 1] - dq;
            asm.lower[r] = -self.coupling[i - 1];
            asm.upper[r] = -self.coupling[i];
        }
        asm
    }

    fn norm(&self, f: &[f64]) -> f64 {
        f.iter().fold(0.0f64, |m, v| m.max(v.abs())) / self.q_ref
    }

    /// Damped Newton solve at fixed polarization.
    pub fn solve(
        &self,
        p_s: f64,
        v_gate: f64,
        opts: &PoissonOptions,
        initial: Option<&[f64]>,
    ) -> Result<PoissonSolution> {
        if !(p_s.abs() < 1.0) {
            return Err(Error::Configuration(format!("|P_S| must be < 1 C/m^2, got {p_s}")));
        }
        let n = self.mesh.len();
        match initial {
            Some(g) if g.len() == n => self.newton(p_s, v_gate, opts, g.to_vec()),
            _ => self
                .newton(p_s, v_gate, opts, self.initial_guess(v_gate))
                .or_else(|first| self.ramp(p_s, v_gate, opts).map_err(|_| first)),
        }
    }

    /// Bias continuation from flat band for cold starts far from equilibrium,
    /// where the per-node step clamp cannot cover the distance in time.
    fn ramp(&self, p_s: f64, v_gate: f64, opts: &PoissonOptions) -> Result<PoissonSolution> {
        let bulk = neutral_potential(self.stack.doping, self.stack.temperature);
        let v_fb = v_gate - (self.boundary(v_gate).0 - bulk);
        let mut psi = self.initial_guess(v_fb);
        let (mut lambda, mut step) = (0.0f64, 0.125f64);
        loop {
            let next = (lambda + step).min(1.0);
            let v = v_fb + next * (v_gate - v_fb);
            match self.newton(next * p_s, v, opts, psi.clone()) {
                Ok(sol) if next >= 1.0 => return Ok(sol),
                Ok(sol) => {
                    psi = sol.psi;
                    lambda = next;
                    step = (step * 2.0).min(0.25);
                }
                Err(e) if step < 1e-3 => return Err(e),
                Err(_) => step *= 0.5,
            }
        }
    }

    fn newton(
        &self,
        p_s: f64,
        v_gate: f64,
        opts: &PoissonOptions,
        mut psi: Vec<f64>,
    ) -> Result<PoissonSolution> {
        let n = psi.len();
        let (top, back) = self.boundary(v_gate);
        psi[0] = top;
        psi[n - 1] = back;
        let cap = opts.max_update * thermal_voltage(self.stack.temperature);
        let mut history = Vec::new();
        let mut polished = false;

        for it in 0..=opts.max_iterations {
            let mut asm = self.assemble(&psi, p_s, opts);
            let r = self.norm(&asm.f);
            history.push(r);
            if !r.is_finite() {
                break;
            }
            if r < opts.tol && polished {
                return Ok(PoissonSolution {
                    psi,
                    iterations: it,
                    residual: r,
                    residual_history: history,
                    clamped: asm.clamped,
                });
            }
            if it == opts.max_iterations {
                break;
            }
            // one extra Newton step after reaching tol, so neutrality holds
            // to near round-off
            polished = r < opts.tol;
            for v in &mut asm.f {
                *v = -*v;
            }
            solve_tridiagonal(&asm.lower, &asm.diag, &asm.upper, &mut asm.f);
            for (p, d) in psi[1..n - 1].iter_mut().zip(&asm.f) {
                *p += d.clamp(-cap, cap);
            }
        }
        Err(Error::PoissonNonConvergence {
            iterations: opts.max_iterations,
            residual_history: history,
        })
    }

    /// `dψ/dP_S` at a converged profile.
    pub fn polarization_sensitivity(&self, psi: &[f64], p_s: f64, opts: &PoissonOptions) -> Vec<f64> {
        let asm = self.assemble(psi, p_s, opts);
        let n = psi.len();
        // dF/dP is -1 at the FE/IL node, so J·dψ = e_FI
        let mut rhs = vec![0.0; n - 2];
        rhs[self.fe_il - 1] = 1.0;
        solve_tridiagonal(&asm.lower, &asm.diag, &asm.upper, &mut rhs);
        let mut out = vec![0.0; n];
        out[1..n - 1].copy_from_slice(&rhs);
        out
    }

    /// Uniform field across the ferroelectric (V/m).
    pub fn ferro_field(&self, psi: &[f64]) -> f64 {
        (psi[0] - psi[self.fe_il]) / (self.mesh.x[self.fe_il] - self.mesh.x[0])
    }

    pub fn ferro_thickness(&self) -> f64 {
        self.mesh.x[self.fe_il] - self.mesh.x[0]
    }

    /// Electron and hole densities on channel nodes (zero elsewhere).
    pub fn carriers(&self, psi: &[f64], opts: &PoissonOptions) -> (Vec<f64>, Vec<f64>) {
        psi.iter()
            .enumerate()
            .map(|(i, &v)| {
                if self.vol_semi[i] > 0.0 {
                    let c = semiconductor_charge(v, opts.phi_n, opts.phi_p, self.stack.doping, self.stack.temperature);
                    (c.n, c.p)
                } else {
                    (0.0, 0.0)
                }
            })
            .unzip()
    }

    /// Trap charge density on interlayer nodes (zero elsewhere).
    pub fn trap_density(&self, psi: &[f64], opts: &PoissonOptions) -> Vec<f64> {
        psi.iter()
            .enumerate()
            .map(|(i, &v)| match &self.traps {
                Some(t) if self.vol_il[i] > 0.0 => {
                    t.charge(v, Self::trap_fermi_level(opts), self.stack.temperature).0
                }
                _ => 0.0,
            })
            .collect()
    }

    /// `∫ n dx` over the channel (m^-2).
    pub fn electron_sheet(&self, n: &[f64]) -> f64 {
        n.iter().zip(&self.vol_semi).map(|(a, b)| a * b).sum()
    }

    /// `∫ ρ_trap dx` over the interlayer (C/m²).
    pub fn trap_sheet(&self, rho: &[f64]) -> f64 {
        rho.iter().zip(&self.vol_il).map(|(a, b)| a * b).sum()
    }

    /// Electron-weighted mean |E| in the channel (V/m).
    #[allow(clippy::needless_range_loop)]
    pub fn effective_field(&self, psi: &[f64], n: &[f64]) -> f64 {
        let x = &self.mesh.x;
        let last = x.len() - 1;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..x.len() {
            let w = n[i] * self.vol_semi[i];
            if w <= 0.0 {
                continue;
            }
            let (l, r) = (i.saturating_sub(1), (i + 1).min(last));
            let e = (psi[l] - psi[r]) / (x[r] - x[l]);
            num += w * e.abs();
            den += w;
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    /// Sheet charges of every component at a solved profile.
    pub fn charge_balance(&self, psi: &[f64], p_s: f64, opts: &PoissonOptions) -> ChargeBalance {
        let d = self.displacement(psi, p_s);
        let t = self.stack.temperature;
        let mut semi = 0.0;
        let mut trap = 0.0;
        for (i, &v) in psi.iter().enumerate() {
            if self.vol_semi[i] > 0.0 {
                semi += semiconductor_charge(v, opts.phi_n, opts.phi_p, self.stack.doping, t).rho
                    * self.vol_semi[i];
            }
            if let (Some(tr), true) = (&self.traps, self.vol_il[i] > 0.0) {
                trap += tr.charge(v, Self::trap_fermi_level(opts), t).0 * self.vol_il[i];
            }
        }
        ChargeBalance {
            gate: d[0],
            bound_top: if self.is_fe[0] { -p_s } else { 0.0 },
            bound_bottom: p_s,
            trap,
            semiconductor: semi,
            back: -d[d.len() - 1],
        }
    }
}

/// Solve the slice Poisson problem at fixed polarization `p_s` and gate bias.
pub fn solve_poisson(
    stack: &Stack1D,
    mesh: &Mesh,
    traps: Option<&TrapDistribution>,
    p_s: f64,
    v_gate: f64,
    opts: &PoissonOptions,
) -> Result<PoissonSolution> {
    PoissonProblem::new(stack.clone(), mesh.clone(), traps.cloned())?.solve(p_s, v_gate, opts, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{NI_SI, Q, EPS_R_SI};
    use crate::stack::{build_mesh, Doping};

    fn problem(stack: Stack1D, traps: Option<TrapDistribution>) -> PoissonProblem {
        let mesh = build_mesh(&stack).unwrap();
        PoissonProblem::new(stack, mesh, traps).unwrap()
    }

    #[test]
    fn flat_band_is_flat() {
        let mut stack = Stack1D::soi();
        stack.doping = Doping::acceptor(1e17);
        let bulk = neutral_potential(stack.doping, 300.0);
        stack.gate_work_function = CHI_SI + 0.5 * EG_SI - bulk;
        stack.back_work_function = stack.gate_work_function;
        let pr = problem(stack, None);
        let sol = pr.solve(0.0, 0.0, &PoissonOptions::default(), None).unwrap();
        for (i, &v) in sol.psi.iter().enumerate() {
            if pr.vol_semi[i] > 0.0 {
                assert!((v - bulk).abs() < 1e-9, "node {i}: {v} vs {bulk}");
            }
        }
    }

    #[test]
    fn tolerance_consistency() {
        let pr = problem(Stack1D::soi(), Some(TrapDistribution::default()));
        for (p, v) in [(0.1, 1.5), (-0.18, -2.0), (0.0, 0.3)] {
            let loose = pr.solve(p, v, &PoissonOptions::default(), None).unwrap();
            let tight = pr
                .solve(p, v, &PoissonOptions { tol: 1e-10, ..Default::default() }, None)
                .unwrap();
            for (a, b) in loose.psi.iter().zip(&tight.psi) {
                assert!((a - b).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn neutrality_and_flux_jumps() {
        let opts = PoissonOptions::default();
        let pr = problem(Stack1D::soi(), Some(TrapDistribution::default()));
        for (p, v) in [(0.15, 2.5), (-0.19, -3.0), (0.05, 0.0)] {
            let sol = pr.solve(p, v, &opts, None).unwrap();
            let b = pr.charge_balance(&sol.psi, p, &opts);
            assert!(b.total().abs() < 1e-6 * b.largest(), "{b:?}");
            // interface nodes: D jump equals the lumped node charge
            let d = pr.displacement(&sol.psi, p);
            for i in 1..pr.mesh.len() - 1 {
                if pr.mesh.material[i - 1] != pr.mesh.material[i] {
                    let (q, _, _) = pr.node_charge(i, sol.psi[i], &opts);
                    let jump = d[i] - d[i - 1];
                    assert!((jump - q).abs() < 1e-6 * pr.q_ref, "node {i}");
                }
            }
        }
    }

    #[test]
    fn polarization_acts_as_interface_sheet() {
        let pr = problem(Stack1D::soi(), None);
        let sol = pr.solve(0.1, 0.0, &PoissonOptions::default(), None).unwrap();
        let d = pr.displacement(&sol.psi, 0.1);
        let fi = pr.fe_il_node();
        // D is continuous through the charge-free FE/IL interface
        assert!((d[fi] - d[fi - 1]).abs() < 1e-9);
        // ε·E jumps by P across it
        let e_fe = EPS0 * 30.0 * (sol.psi[fi - 1] - sol.psi[fi]) / pr.mesh.spacing(fi - 1);
        let e_il = EPS0 * 3.9 * (sol.psi[fi] - sol.psi[fi + 1]) / pr.mesh.spacing(fi);
        assert!(((e_il - e_fe) - 0.1).abs() < 1e-8);
    }

    #[test]
    fn sensitivity_matches_finite_difference() {
        let opts = PoissonOptions { tol: 1e-12, ..Default::default() };
        let pr = problem(Stack1D::soi(), Some(TrapDistribution::default()));
        let (p, v, h) = (0.05, 1.0, 1e-6);
        let sol = pr.solve(p, v, &opts, None).unwrap();
        let up = pr.solve(p + h, v, &opts, Some(&sol.psi)).unwrap();
        let dn = pr.solve(p - h, v, &opts, Some(&sol.psi)).unwrap();
        let s = pr.polarization_sensitivity(&sol.psi, p, &opts);
        let fi = pr.fe_il_node();
        let fd = (up.psi[fi] - dn.psi[fi]) / (2.0 * h);
        assert!((s[fi] - fd).abs() < 1e-4 * fd.abs(), "{} vs {fd}", s[fi]);
    }

    /// Charge-sheet MIS oracle: solve
    /// `V_G - V_FB = ψ_s + sqrt(2 q ε_s N_A (ψ_s + V_T e^{(ψ_s - 2φ_B)/V_T}))/C_ox`
    /// by bisection and compare the surface potential at the bias where the
    /// electron term equals the depletion term (ψ_s ≈ 2φ_B).
    #[test]
    fn mis_surface_potential_near_two_phi_b() {
        let na = 1e16;
        let vt = thermal_voltage(300.0);
        let phi_b = vt * (na * 1e6 / NI_SI).ln();
        let mut stack = Stack1D::soi();
        // a thick channel behaves as bulk; the ferroelectric is a plain dielectric at P=0
        stack.t_ch = 600.0 * NM;
        stack.t_box = 1.0 * NM;
        stack.doping = Doping::acceptor(na);
        let bulk = neutral_potential(stack.doping, 300.0);
        stack.gate_work_function = CHI_SI + 0.5 * EG_SI - bulk;
        stack.back_work_function = stack.gate_work_function;
        let c_ox = 1.0 / (stack.t_f / (EPS0 * 30.0) + stack.t_il / (EPS0 * 3.9));
        let eps_s = EPS0 * EPS_R_SI;
        let nam = na * 1e6;
        let gate = |psi_s: f64| {
            let q = (2.0 * Q * eps_s * nam * (psi_s + vt * ((psi_s - 2.0 * phi_b) / vt).exp())).sqrt();
            psi_s + q / c_ox
        };
        let psi_s = 2.0 * phi_b;
        let v_g = gate(psi_s);
        let pr = problem(stack, None);
        let sol = pr.solve(0.0, v_g, &PoissonOptions::default(), None).unwrap();
        let surface = sol.psi[pr.mesh.interface_after(Material::Interlayer).unwrap()] - bulk;
        assert!((surface - psi_s).abs() < 0.02, "ψ_s {surface} vs {psi_s}");
    }

    #[test]
    fn reports_non_convergence() {
        let pr = problem(Stack1D::soi(), None);
        let opts = PoissonOptions { max_iterations: 1, ..Default::default() };
        match pr.solve(0.1, 3.0, &opts, None) {
            Err(Error::PoissonNonConvergence { residual_history, .. }) => {
                assert_eq!(residual_history.len(), 2)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cold_start_far_from_flat_band_converges() {
        let mut stack = Stack1D::beol(40.0 * NM, crate::stack::Doping::donor(1e16));
        stack.gate_work_function = 6.6;
        let pr = problem(stack, None);
        let opts = PoissonOptions::default();
        let sol = pr.solve(-0.2, -3.0, &opts, None).unwrap();
        // the continuation result must satisfy the original problem
        let again = pr.solve(-0.2, -3.0, &opts, Some(&sol.psi)).unwrap();
        assert!(again.iterations <= 2);
        assert!(sol.psi.iter().zip(&again.psi).all(|(a, b)| (a - b).abs() < 1e-6));
    }
}
