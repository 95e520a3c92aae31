use crate::{Error, Result};

/// Landau expansion coefficients and kinetic resistivity of one grain.
///
/// The thermodynamic field is `E(P) = 2αP + 4βP³ + 6γP⁵`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandauCoefficients {
    /// α (m/F), negative in the double-well regime.
    pub alpha: f64,
    /// β (m⁵/(F·C²)).
    pub beta: f64,
    /// γ (m⁹/(F·C⁴)).
    pub gamma: f64,
    /// Background relative permittivity ε_r,F.
    pub eps_r_background: f64,
    /// Switching resistivity ρ (Ω·m).
    pub resistivity: f64,
}

impl Default for LandauCoefficients {
    fn default() -> Self {
        Self::si_hfo2()
    }
}

impl LandauCoefficients {
    /// Calibrated Si:HfO2 parameters (10 nm MFM capacitor).
    pub const fn si_hfo2() -> Self {
        Self {
            alpha: -5.37e8,
            beta: 9.62e8,
            gamma: 9.59e10,
            eps_r_background: 30.0,
            resistivity: 30.0,
        }
    }

    /// Validated constructor.
    pub fn new(
        alpha: f64,
        beta: f64,
        gamma: f64,
        eps_r_background: f64,
        resistivity: f64,
    ) -> Result<Self> {
        let c = Self {
            alpha,
            beta,
            gamma,
            eps_r_background,
            resistivity,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.alpha,
            self.beta,
            self.gamma,
            self.eps_r_background,
            self.resistivity,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCoefficients("non-finite value".into()));
        }
        if self.alpha >= 0.0 {
            return Err(Error::InvalidCoefficients(format!(
                "alpha must be negative, got {}",
                self.alpha
            )));
        }
        if self.beta <= 0.0 || self.gamma <= 0.0 {
            return Err(Error::InvalidCoefficients(format!(
                "beta and gamma must be positive, got beta={} gamma={}",
                self.beta, self.gamma
            )));
        }
        if self.resistivity <= 0.0 {
            return Err(Error::InvalidCoefficients(format!(
                "resistivity must be positive, got {}",
                self.resistivity
            )));
        }
        if self.eps_r_background < 1.0 {
            return Err(Error::InvalidCoefficients(format!(
                "background permittivity must be >= 1, got {}",
                self.eps_r_background
            )));
        }
        Ok(())
    }

    /// Multiply α, β and γ by `k`. Scales E_c by `k` and leaves P_r unchanged.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            alpha: self.alpha * k,
            beta: self.beta * k,
            gamma: self.gamma * k,
            ..*self
        }
    }

    /// Kinetic time constant τ = ρ / (2|α|).
    pub fn tau(&self) -> f64 {
        self.resistivity / (2.0 * self.alpha.abs())
    }
}

/// Thermodynamic field E(P) = 2αP + 4βP³ + 6γP⁵ (V/m). Odd in P.
#[inline]
pub fn ferro_field(p: f64, c: &LandauCoefficients) -> f64 {
    let p2 = p * p;
    p * (2.0 * c.alpha + p2 * (4.0 * c.beta + 6.0 * c.gamma * p2))
}

/// dE/dP (m/F).
#[inline]
pub fn ferro_field_slope(p: f64, c: &LandauCoefficients) -> f64 {
    let p2 = p * p;
    2.0 * c.alpha + p2 * (12.0 * c.beta + 30.0 * c.gamma * p2)
}

/// Positive root of `a x² + b x + c = 0`, computed without cancellation.
fn positive_root(a: f64, b: f64, c: f64) -> Option<f64> {
    let disc = b * b - 4.0 * a * c;
    if !(disc >= 0.0) {
        return None;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let r1 = q / a;
    let r2 = if q != 0.0 { c / q } else { r1 };
    [r1, r2]
        .into_iter()
        .filter(|r| *r > 0.0 && r.is_finite())
        .reduce(f64::max)
}

/// Coercive field and remanent polarization `(E_c, P_r)` of the double well.
///
/// P_r² is the positive root of `6γx² + 4βx + 2α = 0`; the spinodal P*² the
/// positive root of `30γy² + 12βy + 2α = 0`, and `E_c = |E(P*)|`.
pub fn extract_ec_pr(c: &LandauCoefficients) -> Result<(f64, f64)> {
    let pr2 = positive_root(6.0 * c.gamma, 4.0 * c.beta, 2.0 * c.alpha).ok_or_else(|| {
        Error::InvalidCoefficients("no remanent root: E(P) = 0 has no double well".into())
    })?;
    let ps2 = positive_root(30.0 * c.gamma, 12.0 * c.beta, 2.0 * c.alpha).ok_or_else(|| {
        Error::InvalidCoefficients("no spinodal root: dE/dP = 0 has no real solution".into())
    })?;
    let ec = ferro_field(ps2.sqrt(), c).abs();
    Ok((ec, pr2.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Bisection on a sign change, independent of the closed form.
    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let mut flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Scan (0, 1] for the first sign change of `f`, then bisect it.
    fn first_root(f: impl Fn(f64) -> f64 + Copy) -> f64 {
        let n = 20_000;
        let mut prev = 1e-6;
        for i in 1..=n {
            let x = i as f64 / n as f64;
            if (f(prev) < 0.0) != (f(x) < 0.0) {
                return bisect(f, prev, x);
            }
            prev = x;
        }
        panic!("no root in (0, 1]");
    }

    fn oracle(c: &LandauCoefficients) -> (f64, f64) {
        let pr = first_root(|p| ferro_field(p, c));
        let ps = first_root(|p| ferro_field_slope(p, c));
        (ferro_field(ps, c).abs(), pr)
    }

    #[test]
    fn calibrated_coefficients_match_bracketing_oracle() {
        let c = LandauCoefficients::si_hfo2();
        let (ec, pr) = extract_ec_pr(&c).unwrap();
        let (ec_o, pr_o) = oracle(&c);
        assert_relative_eq!(pr, pr_o, max_relative = 1e-9);
        assert_relative_eq!(ec, ec_o, max_relative = 1e-9);
        // frozen from the oracle
        assert_relative_eq!(pr, 0.199_98, max_relative = 1e-4);
        assert_relative_eq!(ec, 1.098_6e8, max_relative = 1e-3);
    }

    #[test]
    fn remanent_root_zeroes_the_field() {
        let c = LandauCoefficients::si_hfo2();
        let (_, pr) = extract_ec_pr(&c).unwrap();
        assert!(ferro_field(pr, &c).abs() < 1e-6 * 1e8);
        assert_eq!(ferro_field(0.0, &c), 0.0);
    }

    #[test]
    fn beta_zero_limit() {
        let c = LandauCoefficients {
            beta: 0.0,
            ..LandauCoefficients::si_hfo2()
        };
        let (_, pr) = extract_ec_pr(&c).unwrap();
        let expected = (c.alpha.abs() / (3.0 * c.gamma)).powf(0.25);
        assert_relative_eq!(pr, expected, max_relative = 1e-12);
    }

    #[test]
    fn scaling_scales_ec_only() {
        let c = LandauCoefficients::si_hfo2();
        let (ec, pr) = extract_ec_pr(&c).unwrap();
        for k in [0.3, 1.7, 4.0] {
            let (eck, prk) = extract_ec_pr(&c.scaled(k)).unwrap();
            assert_relative_eq!(eck, k * ec, max_relative = 1e-12);
            assert_relative_eq!(prk, pr, max_relative = 1e-12);
        }
    }

    #[test]
    fn tau_is_28ns() {
        let tau = LandauCoefficients::si_hfo2().tau();
        assert_relative_eq!(tau, 27.93e-9, max_relative = 1e-3);
    }

    #[test]
    fn rejects_single_well() {
        assert!(LandauCoefficients::new(5.0e8, 1e9, 1e11, 30.0, 30.0).is_err());
        assert!(LandauCoefficients::new(-5.0e8, 1e9, -1e11, 30.0, 30.0).is_err());
        assert!(LandauCoefficients::new(-5.0e8, 1e9, 1e11, 0.5, 30.0).is_err());
        assert!(LandauCoefficients::new(-5.0e8, 1e9, 1e11, 30.0, 0.0).is_err());
        let bad = LandauCoefficients {
            alpha: 1e8,
            ..LandauCoefficients::si_hfo2()
        };
        assert!(matches!(
            extract_ec_pr(&bad),
            Err(Error::InvalidCoefficients(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn closed_form_matches_oracle(
            a in 1e8f64..2e9,
            b in 0.0f64..5e9,
            g in 1e10f64..5e11,
        ) {
            let c = LandauCoefficients::new(-a, b, g, 30.0, 30.0).unwrap();
            let (ec, pr) = extract_ec_pr(&c).unwrap();
            let (ec_o, pr_o) = oracle(&c);
            prop_assert!(((pr - pr_o) / pr_o).abs() < 1e-9);
            prop_assert!(((ec - ec_o) / ec_o).abs() < 1e-9);
        }

        #[test]
        fn field_is_odd(p in -1.0f64..1.0) {
            let c = LandauCoefficients::si_hfo2();
            prop_assert_eq!(ferro_field(-p, &c), -ferro_field(p, &c));
        }
    }
}
