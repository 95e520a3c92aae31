//! Physical constants and silicon material parameters (SI units).

/// Elementary charge (C).
pub const Q: f64 = 1.602_176_634e-19;
/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Boltzmann constant (J/K).
pub const KB: f64 = 1.380_649e-23;

/// Intrinsic carrier density of silicon at 300 K (m^-3).
pub const NI_SI: f64 = 1.0e16;
/// Silicon band gap at 300 K (eV).
pub const EG_SI: f64 = 1.12;
/// Silicon electron affinity (eV).
pub const CHI_SI: f64 = 4.05;

pub const EPS_R_SI: f64 = 11.7;
pub const EPS_R_SIO2: f64 = 3.9;

/// Thermal voltage kT/q at temperature `t` (V).
#[inline]
pub fn thermal_voltage(t: f64) -> f64 {
    KB * t / Q
}

/// cm^-3 -> m^-3
pub const PER_CM3: f64 = 1e6;
/// cm^-2 -> m^-2
pub const PER_CM2: f64 = 1e4;
pub const NM: f64 = 1e-9;
