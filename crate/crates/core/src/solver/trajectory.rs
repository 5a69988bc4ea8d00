use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Classical fixed-step fourth-order Runge–Kutta.
    Rk4,
    /// Dormand–Prince 5(4) embedded pair with step-size control.
    Rk45,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step for RK4, initial step for RK45 (days).
    pub dt: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Smallest admissible component value; `None` disables positivity
    /// handling.
    pub positivity_floor: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk45,
            dt: 0.1,
            rtol: 1e-8,
            atol: 1e-10,
            max_steps: 2_000_000,
            positivity_floor: Some(0.0),
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(dt: f64) -> Self {
        Self {
            method: Method::Rk4,
            dt,
            ..Self::default()
        }
    }

    pub fn rk45(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn with_floor(mut self, floor: Option<f64>) -> Self {
        self.positivity_floor = floor;
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.dt > 0.0
            && self.dt.is_finite()
            && self.rtol > 0.0
            && self.atol > 0.0
            && self.max_steps >= 1
            && self.positivity_floor.is_none_or(f64::is_finite);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "integrator config needs dt, rtol, atol > 0 and max_steps >= 1: {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub method: Method,
    pub dt: f64,
    pub rtol: f64,
    pub atol: f64,
    pub rhs: String,
}

impl From<&IntegratorConfig> for TrajectoryMeta {
    fn from(cfg: &IntegratorConfig) -> Self {
        Self {
            method: cfg.method,
            dt: cfg.dt,
            rtol: cfg.rtol,
            atol: cfg.atol,
            rhs: String::from("anonymous"),
        }
    }
}

/// Time-stamped samples of an ODE solution together with the vector field
/// at each sample (used for Hermite interpolation).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    times: Vec<f64>,
    states: Vec<[f64; N]>,
    derivatives: Vec<[f64; N]>,
    meta: TrajectoryMeta,
}

impl<const N: usize> Trajectory<N> {
    pub fn new(
        times: Vec<f64>,
        states: Vec<[f64; N]>,
        derivatives: Vec<[f64; N]>,
        meta: TrajectoryMeta,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() || times.len() != derivatives.len() {
            return Err(Error::InvalidParameter(format!(
                "trajectory needs matching non-empty columns, got {} times, {} states, {} derivatives",
                times.len(),
                states.len(),
                derivatives.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        if states.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "trajectory states must be finite".into(),
            ));
        }
        Ok(Self {
            times,
            states,
            derivatives,
            meta,
        })
    }

    pub(crate) fn from_parts_unchecked(
        times: Vec<f64>,
        states: Vec<[f64; N]>,
        derivatives: Vec<[f64; N]>,
        meta: TrajectoryMeta,
    ) -> Self {
        debug_assert_eq!(times.len(), states.len());
        Self {
            times,
            states,
            derivatives,
            meta,
        }
    }

    pub fn labelled(mut self, rhs: impl Into<String>) -> Self {
        self.meta.rhs = rhs.into();
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[[f64; N]] {
        &self.states
    }

    pub fn derivatives(&self) -> &[[f64; N]] {
        &self.derivatives
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn last_state(&self) -> [f64; N] {
        *self.states.last().expect("non-empty")
    }

    pub fn component(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|x| x[index]).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64; N])> + '_ {
        self.times.iter().copied().zip(self.states.iter())
    }
}
