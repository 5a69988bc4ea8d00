//! Normalized regulated SIR used for fitting: with the intrinsic rate fixed
//! at `c̃ = 1`,
//!
//! `dI/dt = (S̃ β̂ - γ) I`, `dβ̂/dt = -α (β̂ - K/(1 + u I))`, `y = S̃ β̂ I`.
//!
//! The susceptibles are frozen at `S̃` over the fitting window.

use serde::{Deserialize, Serialize};

use crate::dynamics::measured_output;
use crate::solver::{integrate, IntegratorConfig, Trajectory};
use crate::{Error, Result};

/// Fixed RK4 step (days). A fixed grid keeps the simulated output a smooth
/// function of the parameters, which the simplex and the finite-difference
/// sensitivities both rely on.
pub const FIT_DT: f64 = 1.0 / 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedParams {
    pub gamma: f64,
    pub alpha: f64,
    pub k: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitInit {
    pub i0: f64,
    pub beta_hat0: f64,
}

impl NormalizedParams {
    pub fn to_array(self) -> [f64; 4] {
        [self.gamma, self.alpha, self.k, self.u]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        Self {
            gamma: x[0],
            alpha: x[1],
            k: x[2],
            u: x[3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma", self.gamma),
            ("alpha", self.alpha),
            ("K", self.k),
            ("u", self.u),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be positive and finite"
                )));
            }
        }
        Ok(())
    }

    /// Late-time incidence at the endemic state, `γ I_e` with
    /// `I_e = (S̃K/γ - 1)/u`; zero when `S̃K ≤ γ`.
    pub fn plateau_output(&self, s_tilde: f64) -> f64 {
        (self.gamma * (s_tilde * self.k / self.gamma - 1.0) / self.u).max(0.0)
    }
}

/// Packs the six fitted quantities `(γ, α, K, u, I₀, β̂₀)`.
pub fn pack(params: &NormalizedParams, init: &FitInit) -> [f64; 6] {
    [
        params.gamma,
        params.alpha,
        params.k,
        params.u,
        init.i0,
        init.beta_hat0,
    ]
}

pub fn unpack(x: &[f64; 6]) -> (NormalizedParams, FitInit) {
    (
        NormalizedParams {
            gamma: x[0],
            alpha: x[1],
            k: x[2],
            u: x[3],
        },
        FitInit {
            i0: x[4],
            beta_hat0: x[5],
        },
    )
}

/// Trajectory of `(I, β̂)` with an explicit intrinsic rate `c̃`; the fitting
/// model is `c̃ = 1`.
pub fn simulate_scaled(
    c_tilde: f64,
    params: &NormalizedParams,
    init: &FitInit,
    s_tilde: f64,
    horizon: f64,
) -> Result<Trajectory<2>> {
    params.validate()?;
    if !(s_tilde > 0.0) || !(init.i0 >= 0.0) || !(init.beta_hat0 >= 0.0) || !(horizon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need S̃ > 0 and nonnegative I0, β̂0, horizon (got {s_tilde}, {}, {}, {horizon})",
            init.i0, init.beta_hat0
        )));
    }
    let c_s = c_tilde * s_tilde;
    let p = *params;
    let rhs = move |_t: f64, x: &[f64; 2]| {
        Ok([
            (c_s * x[1] - p.gamma) * x[0],
            -p.alpha * (x[1] - p.k / (1.0 + p.u * x[0])),
        ])
    };
    integrate(
        rhs,
        [init.i0, init.beta_hat0],
        (0.0, horizon),
        &IntegratorConfig::rk4(FIT_DT),
    )
    .map(|t| t.labelled("normalized"))
    .map_err(|e| match e {
        Error::Divergence { .. } | Error::NonFiniteRhs { .. } => {
            Error::Fit(format!("simulation failed for {params:?}, {init:?}: {e}"))
        }
        other => other,
    })
}

pub fn simulate_normalized(
    params: &NormalizedParams,
    init: &FitInit,
    s_tilde: f64,
    horizon: f64,
) -> Result<Trajectory<2>> {
    simulate_scaled(1.0, params, init, s_tilde, horizon)
}

/// Daily output `y(k) = c̃ S̃ β̂(k) I(k)` for `k = 0, …, days - 1`, on the
/// same RK4 grid as [`simulate_scaled`] but without storing the substeps.
pub fn simulate_scaled_output(
    c_tilde: f64,
    params: &NormalizedParams,
    init: &FitInit,
    s_tilde: f64,
    days: usize,
) -> Result<Vec<f64>> {
    params.validate()?;
    if !(s_tilde > 0.0) || !(init.i0 >= 0.0) || !(init.beta_hat0 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need S̃ > 0 and nonnegative I0, β̂0 (got {s_tilde}, {}, {})",
            init.i0, init.beta_hat0
        )));
    }
    let c_s = c_tilde * s_tilde;
    let NormalizedParams { gamma, alpha, k, u } = *params;
    let f = |i: f64, b: f64| ((c_s * b - gamma) * i, -alpha * (b - k / (1.0 + u * i)));
    let steps_per_day = (1.0 / FIT_DT).round() as usize;
    let h = FIT_DT;
    let (mut i, mut b) = (init.i0, init.beta_hat0);
    let mut out = Vec::with_capacity(days);
    for day in 0..days {
        if day > 0 {
            for _ in 0..steps_per_day {
                let k1 = f(i, b);
                let k2 = f(i + 0.5 * h * k1.0, b + 0.5 * h * k1.1);
                let k3 = f(i + 0.5 * h * k2.0, b + 0.5 * h * k2.1);
                let k4 = f(i + h * k3.0, b + h * k3.1);
                i += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                b += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            }
            if !(i.is_finite() && b.is_finite() && i >= 0.0 && b >= 0.0) {
                return Err(Error::Fit(format!(
                    "simulation left the positive quadrant on day {day} for {params:?}, {init:?}"
                )));
            }
        }
        out.push(measured_output(c_s, b, i));
    }
    Ok(out)
}

/// Daily incidence of the normalized model.
pub fn simulate_fit_output(
    params: &NormalizedParams,
    init: &FitInit,
    s_tilde: f64,
    days: usize,
) -> Result<Vec<f64>> {
    simulate_scaled_output(1.0, params, init, s_tilde, days)
}
