use serde::{Deserialize, Serialize};

use crate::error::{MepError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Neb,
    String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stepper {
    /// Explicit Euler with a fixed step.
    Euler,
    /// FIRE: damped inertial dynamics with adaptive step (NEB only).
    Fire,
}

/// Parameters of the path dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    /// NEB spring constant `c`.
    pub spring_c: f64,
    /// Time step (initial step for FIRE).
    pub dt: f64,
    /// Stop once `max_k |F_k|_inf <= force_tol`.
    pub force_tol: f64,
    pub max_steps: usize,
    pub method: Method,
    pub stepper: Stepper,
    /// Upper bound on the FIRE step.
    pub fire_dt_max: f64,
    /// Relative tolerance under which two image energies are treated as equal
    /// by the upwind tangent.
    pub tie_rtol: f64,
    /// Record a trace row every this many steps (0 disables tracing).
    pub trace_every: usize,
    /// Shrink `dt` to an explicit-stability estimate from the Hessians and
    /// spring stiffness on the initial path.
    pub auto_dt: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            spring_c: 1.0,
            dt: 1e-3,
            force_tol: 1e-8,
            max_steps: 5_000_000,
            method: Method::Neb,
            stepper: Stepper::Euler,
            fire_dt_max: 2e-2,
            tie_rtol: crate::path::DEFAULT_TIE_RTOL,
            trace_every: 0,
            auto_dt: false,
        }
    }
}

impl EvolveConfig {
    /// FIRE-accelerated NEB.
    pub fn fire() -> Self {
        Self {
            stepper: Stepper::Fire,
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, force_tol: f64) -> Self {
        self.force_tol = force_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(MepError::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("spring_c", self.spring_c)?;
        positive("dt", self.dt)?;
        positive("force_tol", self.force_tol)?;
        positive("fire_dt_max", self.fire_dt_max)?;
        if !(self.tie_rtol >= 0.0) {
            return Err(MepError::Config("tie_rtol must be nonnegative".into()));
        }
        if self.method == Method::String && self.stepper == Stepper::Fire {
            return Err(MepError::Config("the string method uses the Euler stepper".into()));
        }
        Ok(())
    }
}
