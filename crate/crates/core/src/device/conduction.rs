use crate::constants::Q;
use crate::stack::SliceState;
use crate::{Error, Result};

/// Low-field channel mobility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MobilityModel {
    /// Fixed mobility (cm²/(V·s)).
    Constant { mu0: f64 },
    /// `mu0 / (1 + (E_eff/E_crit)^exponent)`, with E_eff the electron-weighted
    /// normal field in the channel.
    EffectiveField { mu0: f64, e_crit: f64, exponent: f64 },
}

impl Default for MobilityModel {
    fn default() -> Self {
        Self::EffectiveField {
            mu0: 300.0,
            e_crit: 1e8,
            exponent: 1.6,
        }
    }
}

impl MobilityModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Constant { mu0 } => mu0 > 0.0,
            Self::EffectiveField { mu0, e_crit, exponent } => mu0 > 0.0 && e_crit > 0.0 && exponent > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Configuration(format!("invalid mobility model {self:?}")))
        }
    }

    /// Mobility in m²/(V·s) at normal field `e_eff` (V/m).
    pub fn mobility(&self, e_eff: f64) -> f64 {
        let cm2 = match *self {
            Self::Constant { mu0 } => mu0,
            Self::EffectiveField { mu0, e_crit, exponent } => {
                mu0 / (1.0 + (e_eff.abs() / e_crit).powf(exponent))
            }
        };
        cm2 * 1e-4
    }
}

/// Sheet conductance of a channel segment: `W·q·μ·N / L` (S).
pub fn segment_conductance(n_sheet: f64, mobility: f64, length: f64, width: f64) -> f64 {
    width * Q * mobility * n_sheet.max(0.0) / length
}

/// Conductance of the channel segment under one grain (S).
pub fn slice_conductance(state: &SliceState, mobility: &MobilityModel, grain_length: f64, width: f64) -> f64 {
    segment_conductance(state.n_inv, mobility.mobility(state.effective_field), grain_length, width)
}

/// Drain current through segments in series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCurrent {
    /// Current (A).
    pub current: f64,
    /// Some segment had zero conductance.
    pub open: bool,
}

/// `I = v_ds / Σ 1/G_i`; any zero conductance opens the channel.
pub fn series_current(conductances: &[f64], v_ds: f64) -> SeriesCurrent {
    if conductances.iter().any(|&g| !(g > 0.0)) {
        return SeriesCurrent {
            current: 0.0,
            open: true,
        };
    }
    let resistance: f64 = conductances.iter().map(|g| 1.0 / g).sum();
    SeriesCurrent {
        current: v_ds / resistance,
        open: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn state(n_inv: f64) -> SliceState {
        SliceState {
            n_inv,
            ..SliceState::unsolved(0.0)
        }
    }

    #[test]
    fn conductance_examples() {
        let mu = MobilityModel::Constant { mu0: 10.0 };
        assert_eq!(slice_conductance(&state(0.0), &mu, 6e-9, 1e-6), 0.0);
        let g = slice_conductance(&state(1e16), &mu, 6e-9, 1e-6);
        assert_relative_eq!(g, 1.602176634e-19 * 10e-4 * 1e16 * 1e-6 / 6e-9, max_relative = 1e-14);
        let g2 = slice_conductance(&state(2e16), &mu, 6e-9, 1e-6);
        assert_relative_eq!(g2, 2.0 * g, max_relative = 1e-14);
    }

    #[test]
    fn effective_field_mobility() {
        let m = MobilityModel::default();
        assert_relative_eq!(m.mobility(0.0), 300e-4);
        assert_relative_eq!(m.mobility(1e8), 150e-4);
        assert!(m.mobility(2e8) < m.mobility(1e8));
    }

    #[test]
    fn series_examples() {
        let i = series_current(&[2.0; 5], 0.05);
        assert_relative_eq!(i.current, 0.05 * 2.0 / 5.0);
        let open = series_current(&[1.0, 0.0, 1.0], 0.05);
        assert_eq!(open.current, 0.0);
        assert!(open.open);
        let tiny = series_current(&[1.0, 1e-30, 1.0], 0.05);
        assert!(tiny.current < 1e-31);
    }

    proptest! {
        #[test]
        fn series_bounded_by_weakest(g in prop::collection::vec(1e-12f64..1e3, 1..30), v in 0.0f64..1.0) {
            let i = series_current(&g, v).current;
            let min = g.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!(i <= v * min * (1.0 + 1e-12));
        }
    }
}
