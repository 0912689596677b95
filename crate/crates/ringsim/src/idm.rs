//! Intelligent Driver Model acceleration law and the per-type parameter presets.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// IDM controller parameters for one vehicle type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdmParams {
    /// Maximum acceleration, m/s².
    pub alpha: f64,
    /// Comfortable deceleration, m/s².
    pub beta: f64,
    /// Acceleration exponent.
    pub kappa: f64,
    /// Minimum spacing, m.
    pub eta: f64,
    /// Desired time gap, s.
    pub tau: f64,
    /// Desired velocity, m/s.
    pub v_d: f64,
}

impl IdmParams {
    pub const EV_ACC: IdmParams = IdmParams {
        alpha: 2.01,
        beta: 8.97,
        kappa: 4.02,
        eta: 2.02,
        tau: 1.63,
        v_d: 33.34,
    };

    pub const ICE_ACC: IdmParams = IdmParams {
        alpha: 0.60,
        beta: 5.20,
        kappa: 15.50,
        eta: 6.30,
        tau: 2.20,
        v_d: 44.11,
    };

    pub const HDV: IdmParams = IdmParams {
        alpha: 1.06,
        beta: 2.00,
        kappa: 4.00,
        eta: 3.40,
        tau: 1.26,
        v_d: 30.00,
    };

    pub fn validate(&self) -> Result<(), ConfigError> {
        let checks = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("kappa", self.kappa),
            ("eta", self.eta),
            ("tau", self.tau),
            ("v_d", self.v_d),
        ];
        for (name, value) in checks {
            #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
            if !(value > 0.0) {
                return Err(ConfigError::Invalid(format!(
                    "IDM parameter {name} must be > 0, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Hard acceleration limits applied to every controller output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelBounds {
    /// Lower bound (strongest deceleration), m/s².
    pub min: f64,
    /// Upper bound, m/s².
    pub max: f64,
}

impl Default for AccelBounds {
    fn default() -> Self {
        AccelBounds {
            min: -10.0,
            max: 5.0,
        }
    }
}

impl AccelBounds {
    pub fn clamp(&self, a: f64) -> f64 {
        a.clamp(self.min, self.max)
    }
}

/// Desired spacing at speed `v` with relative speed `dv = v_pred - v`.
/// The dynamic term grows with the approach rate `-dv`, the form that
/// keeps car-following stable; it can drive the result negative when
/// the predecessor is pulling away fast, which the squared ratio in the
/// acceleration law absorbs.
pub fn desired_spacing(p: &IdmParams, v: f64, dv: f64) -> f64 {
    p.eta + p.tau * v - v * dv / (2.0 * (p.alpha * p.beta).sqrt())
}

/// IDM acceleration, clamped to `bounds`.
///
/// `s` must be strictly positive; a non-positive gap means collision
/// detection upstream failed.
pub fn idm_accel(p: &IdmParams, v: f64, s: f64, dv: f64, bounds: &AccelBounds) -> f64 {
    assert!(s > 0.0, "idm_accel called with non-positive gap {s}");
    let free = (v / p.v_d).powf(p.kappa);
    let interaction = (desired_spacing(p, v, dv) / s).powi(2);
    bounds.clamp(p.alpha * (1.0 - free - interaction))
}

/// Equilibrium speed for a uniform platoon at gap `g`: the `v` with
/// `idm_accel(p, v, g, 0) == 0`, found by bisection on `[0, v_d]`.
pub fn equilibrium_speed(p: &IdmParams, g: f64) -> f64 {
    let residual = |v: f64| 1.0 - (v / p.v_d).powf(p.kappa) - (desired_spacing(p, v, 0.0) / g).powi(2);
    let (mut lo, mut hi) = (0.0_f64, p.v_d);
    // residual is strictly decreasing in v
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
