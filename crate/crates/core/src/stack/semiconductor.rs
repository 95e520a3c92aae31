use crate::constants::{thermal_voltage, NI_SI, Q};

use super::mesh::Doping;

/// Exponents beyond this many thermal voltages continue linearly.
const MAX_EXPONENT: f64 = 40.0;

/// Boltzmann carrier densities and net charge at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Carriers {
    /// Electrons (m^-3).
    pub n: f64,
    /// Holes (m^-3).
    pub p: f64,
    /// Net charge q(p - n + N_D - N_A) (C/m³).
    pub rho: f64,
    /// dρ/dψ (C/(m³·V)).
    pub drho_dpsi: f64,
    /// An exponent hit the ±40 V_T guard.
    pub clamped: bool,
}

/// `exp(x)` with linear continuation beyond ±MAX_EXPONENT, and its derivative.
#[inline]
fn guarded_exp(x: f64) -> (f64, f64, bool) {
    if x > MAX_EXPONENT {
        let e = MAX_EXPONENT.exp();
        (e * (1.0 + x - MAX_EXPONENT), e, true)
    } else if x < -MAX_EXPONENT {
        // keep the density positive: decay continues as a tiny linear tail
        let e = (-MAX_EXPONENT).exp();
        ((e * (1.0 + x + MAX_EXPONENT)).max(0.0), e, true)
    } else {
        let e = x.exp();
        (e, e, false)
    }
}

/// Carrier densities for potential `psi` and quasi-Fermi potentials
/// `phi_n`, `phi_p`, all referenced to the intrinsic level (V).
pub fn semiconductor_charge(psi: f64, phi_n: f64, phi_p: f64, doping: Doping, t: f64) -> Carriers {
    let vt = thermal_voltage(t);
    let (en, den, cn) = guarded_exp((psi - phi_n) / vt);
    let (ep, dep, cp) = guarded_exp((phi_p - psi) / vt);
    let n = NI_SI * en;
    let p = NI_SI * ep;
    Carriers {
        n,
        p,
        rho: Q * (p - n + doping.net_per_m3()),
        drho_dpsi: -Q * NI_SI * (den + dep) / vt,
        clamped: cn || cp,
    }
}

/// Equilibrium potential of a neutral region with the given doping (V).
pub fn neutral_potential(doping: Doping, t: f64) -> f64 {
    thermal_voltage(t) * (doping.net_per_m3() / (2.0 * NI_SI)).asinh()
}
