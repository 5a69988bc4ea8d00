//! Comparison of the full model against its singular-perturbation reduction
//! as the population scale `ε` shrinks.
//!
//! The reduced solution is the composite of the slow equation and the fast
//! boundary layer: `I_c(t) = I_fast(t) - I_e(S̃₀) + I_e(S̄(εt))`, likewise
//! for `β`, and `S̃_c = S̄`. Away from the layer the fast correction is
//! exponentially small, so this is the QSS map evaluated along `S̄`.

use serde::{Deserialize, Serialize};

use super::experiments::simulate_fast;
use crate::dynamics::law::{endemic_scaled_infectives, ContactRateLaw};
use crate::dynamics::{rhs_full, rhs_slow, EpidemicParams, FullState};
use crate::solver::{integrate, sample_at, IntegratorConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TikhonovInit {
    /// Rescaled susceptibles `S̃(0) = ε S(0)`.
    pub s_tilde0: f64,
    pub i0: f64,
    pub beta0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TikhonovError {
    pub epsilon: f64,
    /// Sup-norm deviations of `S̃`, `I`, `β` outside the boundary layer.
    pub s: f64,
    pub i: f64,
    pub beta: f64,
    pub samples: usize,
}

impl TikhonovError {
    pub fn max_component(&self) -> f64 {
        self.s.max(self.i).max(self.beta)
    }
}

/// Fast-time width of the excluded boundary layer, `5 / min(α, γ)`.
pub fn boundary_layer_width(params: &EpidemicParams) -> f64 {
    5.0 / params.alpha.min(params.gamma)
}

pub fn tikhonov_config() -> IntegratorConfig {
    IntegratorConfig::rk45(1e-11, 1e-13)
}

/// For each `ε`, the full model (with `c = c̃ ε`, `S = S̃/ε`) is integrated
/// over fast time `[0, T_slow/ε]` and compared against the composite reduced
/// solution at every accepted step past the boundary layer.
pub fn tikhonov_sweep<L: ContactRateLaw + ?Sized>(
    params: &EpidemicParams,
    law: &L,
    init: TikhonovInit,
    epsilons: &[f64],
    t_slow: f64,
) -> Result<Vec<TikhonovError>> {
    let cfg = tikhonov_config();
    let c_tilde = params.c_tilde();
    let qss_i = |s_bar: f64| -> Result<f64> {
        endemic_scaled_infectives(law, params.gamma, c_tilde * s_bar)
            .map(|x| x / params.u)
            .ok_or_else(|| {
                Error::Domain(format!(
                    "no endemic state along the slow solution at S̃ = {s_bar}"
                ))
            })
    };
    let qss_beta = |s_bar: f64| params.gamma / (c_tilde * s_bar);

    let slow = integrate(
        |_tau, x: &[f64; 1]| Ok([rhs_slow(x[0], params, law)]),
        [init.s_tilde0],
        (0.0, t_slow),
        &cfg,
    )?;
    let (i_e0, beta_e0) = (qss_i(init.s_tilde0)?, qss_beta(init.s_tilde0));

    epsilons
        .iter()
        .map(|&eps| {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "epsilon {eps} outside (0, 1)"
                )));
            }
            let p =
                EpidemicParams::from_rescaled(c_tilde, params.gamma, params.alpha, params.u, eps)?;
            let horizon = t_slow / eps;
            let full = integrate(
                |_t, x: &[f64; 4]| Ok(rhs_full(&FullState::from_array(*x), &p, law)?.to_array()),
                [init.s_tilde0 / eps, init.i0, 0.0, init.beta0],
                (0.0, horizon),
                &cfg,
            )?;
            let fast = simulate_fast(
                law,
                &p,
                c_tilde * init.s_tilde0,
                (init.i0, init.beta0),
                horizon,
                &cfg,
            )?;

            let layer = boundary_layer_width(params);
            let times: Vec<f64> = full
                .times()
                .iter()
                .copied()
                .filter(|&t| t >= layer)
                .collect();
            let taus: Vec<f64> = times.iter().map(|t| eps * t).collect();
            let slow_at = sample_at(&slow, &taus)?;
            let fast_at = sample_at(&fast, &times)?;
            let start = full.times().len() - times.len();

            let mut err = TikhonovError {
                epsilon: eps,
                s: 0.0,
                i: 0.0,
                beta: 0.0,
                samples: times.len(),
            };
            for k in 0..times.len() {
                let x = full.states()[start + k];
                let s_bar = slow_at.states()[k][0];
                let f = fast_at.states()[k];
                let i_c = f[0] - i_e0 + qss_i(s_bar)?;
                let beta_c = f[1] - beta_e0 + qss_beta(s_bar);
                err.s = err.s.max((eps * x[0] - s_bar).abs());
                err.i = err.i.max((x[1] - i_c).abs());
                err.beta = err.beta.max((x[3] - beta_c).abs());
            }
            Ok(err)
        })
        .collect()
}
