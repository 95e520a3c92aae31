//! Border traps in the interfacial oxide.
//!
//! Traps are spread uniformly over the IL thickness and over an energy window
//! measured from the silicon valence-band edge. The levels follow the local
//! electrostatic potential rigidly, and occupancy is the equilibrium
//! Fermi–Dirac value against the channel electron quasi-Fermi level.

use crate::constants::{thermal_voltage, EG_SI, PER_CM3, Q};
use crate::{Error, Result};

/// Energy range of one trap species, in eV above the valence-band edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyWindow {
    pub low: f64,
    pub high: f64,
}

impl EnergyWindow {
    pub const SI_GAP: Self = Self {
        low: 0.0,
        high: EG_SI,
    };

    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrapDistribution {
    /// Acceptor-like density (eV^-1 cm^-3); negative when occupied.
    pub density_acceptor: f64,
    /// Donor-like density (eV^-1 cm^-3); positive when empty.
    pub density_donor: f64,
    pub acceptor_window: EnergyWindow,
    pub donor_window: EnergyWindow,
    pub energy_grid_points: usize,
}

impl Default for TrapDistribution {
    fn default() -> Self {
        Self {
            density_acceptor: 8e20,
            density_donor: 4e20,
            acceptor_window: EnergyWindow::SI_GAP,
            donor_window: EnergyWindow::SI_GAP,
            energy_grid_points: 201,
        }
    }
}

impl TrapDistribution {
    /// Distribution with both densities zero.
    pub fn none() -> Self {
        Self {
            density_acceptor: 0.0,
            density_donor: 0.0,
            ..Self::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.density_acceptor == 0.0 && self.density_donor == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.density_acceptor >= 0.0 && self.density_donor >= 0.0) {
            return Err(Error::Configuration("trap densities must be >= 0".into()));
        }
        for (name, w) in [("acceptor", self.acceptor_window), ("donor", self.donor_window)] {
            if !(w.low < w.high) {
                return Err(Error::Configuration(format!(
                    "{name} trap window must satisfy low < high, got ({}, {})",
                    w.low, w.high
                )));
            }
        }
        if self.energy_grid_points < 2 {
            return Err(Error::Configuration("trap energy grid needs >= 2 points".into()));
        }
        Ok(())
    }

    /// Trap charge density (C/m³) and its derivative with respect to the
    /// local potential (C/(m³·V)).
    ///
    /// `psi` is the electrostatic potential referenced to the intrinsic level
    /// and `fermi_level` the electron Fermi energy on the same scale (eV), so
    /// the valence-band edge sits at `-psi - Eg/2`.
    pub fn charge(&self, psi: f64, fermi_level: f64, t: f64) -> (f64, f64) {
        if self.is_empty() {
            return (0.0, 0.0);
        }
        let vt = thermal_voltage(t);
        let e_v = -psi - 0.5 * EG_SI;
        let (occ_a, docc_a) = self.integrate(self.acceptor_window, e_v, fermi_level, vt);
        let (occ_d, docc_d) = self.integrate(self.donor_window, e_v, fermi_level, vt);
        let da = self.density_acceptor * PER_CM3;
        let dd = self.density_donor * PER_CM3;
        let rho = Q * (-da * occ_a + dd * (self.donor_window.width() - occ_d));
        let drho = -Q * (da * docc_a + dd * docc_d);
        (rho, drho)
    }

    /// Trapezoidal `∫ f dE` and `∫ f(1-f)/V_T dE` over a window.
    fn integrate(&self, w: EnergyWindow, e_v: f64, e_f: f64, vt: f64) -> (f64, f64) {
        let n = self.energy_grid_points;
        let h = w.width() / (n - 1) as f64;
        let (mut occ, mut docc) = (0.0, 0.0);
        for i in 0..n {
            let weight = if i == 0 || i == n - 1 { 0.5 * h } else { h };
            let f = fermi(e_v + w.low + h * i as f64 - e_f, vt);
            occ += weight * f;
            docc += weight * f * (1.0 - f) / vt;
        }
        (occ, docc)
    }
}

#[inline]
fn fermi(de: f64, vt: f64) -> f64 {
    let x = de / vt;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Fermi–Dirac occupancy of a level at `e_t` for Fermi energy `e_f` (eV).
pub fn equilibrium_occupancy(e_t: f64, e_f: f64, t: f64) -> f64 {
    fermi(e_t - e_f, thermal_voltage(t))
}

/// Trap charge density (C/m³) at each IL node with local potential `psi`.
pub fn trap_charge_density(dist: &TrapDistribution, psi: &[f64], fermi_level: f64, t: f64) -> Vec<f64> {
    psi.iter().map(|&v| dist.charge(v, fermi_level, t).0).collect()
}
