//! Time-to-value mapping of a manufacturing order.
//!
//! A curve holds its full value up to the plateau end `D`, decays linearly to
//! zero at `Z`, and afterwards either stays at zero or, when a penalty rate is
//! configured, keeps falling into negative territory. Times are absolute
//! seconds on the planning clock, so the owning order's arrival time is the
//! left end of the plateau.

use serde::{Deserialize, Serialize};

use crate::model::ProcessingOption;

/// Value curve shared by all jobs of one order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueCurve {
    /// Plateau end, seconds.
    pub d_s: f64,
    /// Zero point, seconds.
    pub z_s: f64,
    /// Per-second slope of the negative tail after `z_s`; zero disables penalties.
    #[serde(default)]
    pub penalty_rate: f64,
}

impl ValueCurve {
    pub fn new(d_s: f64, z_s: f64) -> Self {
        Self {
            d_s,
            z_s,
            penalty_rate: 0.0,
        }
    }

    pub fn with_penalty(mut self, penalty_rate: f64) -> Self {
        self.penalty_rate = penalty_rate;
        self
    }

    /// Dimensionless value factor at completion time `t`.
    #[inline]
    pub fn factor(&self, t: f64) -> f64 {
        if t <= self.d_s {
            1.0
        } else if t < self.z_s {
            (self.z_s - t) / (self.z_s - self.d_s)
        } else {
            // zero at t == Z, so the tail is continuous
            self.penalty_rate * (self.z_s - t)
        }
    }
}

/// Value factor of curve `c` at time `t`.
#[inline]
pub fn curve_factor(t: f64, c: &ValueCurve) -> f64 {
    c.factor(t)
}

/// Realized profit of producing with `opt` and finishing at `et`.
#[inline]
pub fn element_profit(opt: &ProcessingOption, et: f64, c: &ValueCurve) -> f64 {
    opt.max_profit * c.factor(et)
}
