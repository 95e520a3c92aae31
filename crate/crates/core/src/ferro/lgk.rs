use super::landau::{ferro_field, ferro_field_slope, LandauCoefficients};
use crate::{Error, Result};

/// Step control for the implicit LGK integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgkOptions {
    /// Scalar Newton iterations allowed per implicit step.
    pub max_newton_iterations: usize,
    /// First substep as a fraction of τ = ρ/(2|α|).
    pub initial_step_fraction: f64,
    pub rtol: f64,
    /// Absolute tolerance (C/m²).
    pub atol: f64,
    /// Largest polarization change accepted in one substep (C/m²).
    pub max_step_change: f64,
    /// Substeps shorter than this fraction of τ abort the integration.
    pub min_step_fraction: f64,
}

impl Default for LgkOptions {
    fn default() -> Self {
        Self {
            max_newton_iterations: 100,
            initial_step_fraction: 0.1,
            rtol: 1e-5,
            atol: 1e-9,
            max_step_change: 0.02,
            min_step_fraction: 1e-9,
        }
    }
}

/// Backward-Euler integrator for `ρ dP/dt = E_ext(P) − E(P)`.
///
/// The external field may depend affinely on `P`; the coupled slice solver
/// uses this to carry the depolarization feedback of the surrounding stack.
/// Substeps start at `τ/10` and are then sized by step-doubling error
/// control, so long quasi-static holds cost a few dozen steps once the grain
/// has relaxed.
#[derive(Debug, Clone, Copy)]
pub struct LgkIntegrator<'a> {
    coeffs: &'a LandauCoefficients,
    opts: LgkOptions,
}

/// Affine external field `e0 + slope·(P − p_ref)`.
#[derive(Debug, Clone, Copy)]
struct Drive {
    e0: f64,
    slope: f64,
    p_ref: f64,
}

impl Drive {
    #[inline]
    fn at(&self, p: f64) -> f64 {
        self.e0 + self.slope * (p - self.p_ref)
    }
}

impl<'a> LgkIntegrator<'a> {
    pub fn new(coeffs: &'a LandauCoefficients, opts: LgkOptions) -> Self {
        Self { coeffs, opts }
    }

    /// Advance under a constant applied field.
    pub fn advance(&self, p: f64, e_applied: f64, dt: f64) -> Result<f64> {
        self.advance_affine(p, e_applied, 0.0, p, dt)
    }

    /// Advance under `E_ext(P) = e0 + slope·(P − p_ref)`.
    pub fn advance_affine(&self, p: f64, e0: f64, slope: f64, p_ref: f64, dt: f64) -> Result<f64> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::Configuration(format!("time step must be >= 0, got {dt}")));
        }
        if dt == 0.0 {
            return Ok(p);
        }
        let drive = Drive { e0, slope, p_ref };
        let tau = self.coeffs.tau();
        let h_min = self.opts.min_step_fraction * tau;
        let mut h = (self.opts.initial_step_fraction * tau).min(dt);
        let mut t = 0.0;
        let mut p = p;
        let mut last_err: Option<Error> = None;

        while t < dt {
            let h_try = h.min(dt - t);
            let attempt = self.implicit_step(p, h_try, &drive).and_then(|full| {
                let mid = self.implicit_step(p, 0.5 * h_try, &drive)?;
                let fine = self.implicit_step(mid, 0.5 * h_try, &drive)?;
                Ok((full, fine))
            });
            match attempt {
                Ok((full, fine)) => {
                    let err = (fine - full).abs();
                    let tol = self.opts.atol + self.opts.rtol * fine.abs();
                    if err <= tol && (fine - p).abs() <= self.opts.max_step_change {
                        p = fine;
                        t += h_try;
                        // first-order local error scales with h²
                        let grow = if err > 0.0 {
                            (0.9 * (tol / err).sqrt()).clamp(0.5, 4.0)
                        } else {
                            4.0
                        };
                        h = h_try * grow;
                        continue;
                    }
                    let shrink = if err > tol {
                        (0.9 * (tol / err).sqrt()).clamp(0.1, 0.5)
                    } else {
                        0.5
                    };
                    h = h_try * shrink;
                }
                Err(e) => {
                    last_err = Some(e);
                    h = 0.5 * h_try;
                }
            }
            if h < h_min {
                return Err(last_err.unwrap_or(Error::Integration {
                    polarization: p,
                    step: h,
                    iterations: 0,
                    residual: f64::NAN,
                }));
            }
        }
        Ok(p)
    }

    /// Solve `ρ(P' − P)/h = E_ext(P') − E(P')` for `P'` by scalar Newton.
    fn implicit_step(&self, p: f64, h: f64, drive: &Drive) -> Result<f64> {
        let c = self.coeffs;
        let rho_h = c.resistivity / h;
        let mut x = p;
        let mut g = 0.0;
        for _ in 0..self.opts.max_newton_iterations {
            g = rho_h * (x - p) - drive.at(x) + ferro_field(x, c);
            let dg = rho_h - drive.slope + ferro_field_slope(x, c);
            let mut dx = -g / dg;
            if !dx.is_finite() {
                break;
            }
            dx = dx.clamp(-0.05, 0.05);
            x += dx;
            if dx.abs() <= 1e-15 + 1e-13 * x.abs() {
                return Ok(x);
            }
        }
        Err(Error::Integration {
            polarization: x,
            step: h,
            iterations: self.opts.max_newton_iterations,
            residual: g,
        })
    }
}

/// Integrate `ρ dP/dt = E_applied − E(P)` over `dt` with default step control.
pub fn lgk_advance(p: f64, e_applied: f64, dt: f64, coeffs: &LandauCoefficients) -> Result<f64> {
    LgkIntegrator::new(coeffs, LgkOptions::default()).advance(p, e_applied, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ferro::extract_ec_pr;
    use approx::assert_relative_eq;

    fn coeffs() -> LandauCoefficients {
        LandauCoefficients::si_hfo2()
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        assert_eq!(lgk_advance(0.0, 0.0, 1e-3, &coeffs()).unwrap(), 0.0);
        assert_eq!(lgk_advance(0.0, 0.0, 1.0, &coeffs()).unwrap(), 0.0);
    }

    #[test]
    fn linear_growth_rate_matches_tau() {
        let c = coeffs();
        let tau = c.tau();
        let p0 = 1e-5;
        let t = 2.0 * tau;
        let p = lgk_advance(p0, 0.0, t, &c).unwrap();
        let rate = (p / p0).ln() / t;
        let measured_tau = 1.0 / rate;
        assert_relative_eq!(measured_tau, 27.93e-9, max_relative = 0.02);
    }

    /// Stable root of E(P) = e with dE/dP > 0 and sign(P) = sign(e),
    /// found by bisection above the spinodal.
    fn stable_root(e: f64, c: &LandauCoefficients) -> f64 {
        let (mut lo, mut hi) = (0.14, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ferro_field(mid, c) < e {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn switches_to_positive_root_above_coercive_field() {
        let c = coeffs();
        let (ec, pr) = extract_ec_pr(&c).unwrap();
        let e = 2.0 * ec;
        let p = lgk_advance(-pr, e, 100.0 * c.tau(), &c).unwrap();
        let target = stable_root(e, &c);
        assert!(ferro_field_slope(target, &c) > 0.0);
        assert_relative_eq!(p, target, max_relative = 1e-6);
    }

    #[test]
    fn stays_put_below_coercive_field() {
        let c = coeffs();
        let (ec, pr) = extract_ec_pr(&c).unwrap();
        let p = lgk_advance(-pr, 0.9 * ec, 1.0, &c).unwrap();
        assert!(p < 0.0);
        assert!(ferro_field(p, &c) - 0.9 * ec < 1.0);
    }

    #[test]
    fn long_hold_is_cheap_and_converged() {
        let c = coeffs();
        let (_, pr) = extract_ec_pr(&c).unwrap();
        // one second of hold is ~3.6e7 τ
        let p = lgk_advance(-pr, 3e8, 1.0, &c).unwrap();
        assert_relative_eq!(p, stable_root(3e8, &c), max_relative = 1e-8);
    }

    #[test]
    fn newton_failure_is_reported() {
        let c = coeffs();
        let opts = LgkOptions {
            max_newton_iterations: 0,
            ..LgkOptions::default()
        };
        let err = LgkIntegrator::new(&c, opts)
            .advance(0.1, 1e8, 1e-6)
            .unwrap_err();
        assert!(matches!(err, Error::Integration { .. }));
    }

    #[test]
    fn negative_dt_is_rejected() {
        assert!(lgk_advance(0.0, 0.0, -1.0, &coeffs()).is_err());
    }
}
