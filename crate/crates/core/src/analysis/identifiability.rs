//! Local identifiability of the fitting model from the rank of its output
//! sensitivity matrix.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::fitting::model::{simulate_scaled_output, FitInit, NormalizedParams};
use crate::Result;

/// Relative finite-difference step.
pub const FD_STEP: f64 = 1e-6;
/// Singular values below this fraction of the largest count as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;

pub const PARAMETER_NAMES: [&str; 7] = ["gamma", "alpha", "K", "u", "I0", "beta_hat0", "c_tilde"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifiabilityReport {
    pub rank: usize,
    pub parameters: Vec<String>,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub samples: usize,
}

impl IdentifiabilityReport {
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.parameters.len()
    }
}

fn output(theta: &[f64], s_tilde: f64, days: usize) -> Result<Vec<f64>> {
    let params = NormalizedParams {
        gamma: theta[0],
        alpha: theta[1],
        k: theta[2],
        u: theta[3],
    };
    let init = FitInit {
        i0: theta[4],
        beta_hat0: theta[5],
    };
    let c_tilde = theta.get(6).copied().unwrap_or(1.0);
    simulate_scaled_output(c_tilde, &params, &init, s_tilde, days)
}

fn rank_of(theta: &[f64], s_tilde: f64, horizon: usize) -> Result<IdentifiabilityReport> {
    let days = horizon + 1;
    let mut sens = DMatrix::<f64>::zeros(days, theta.len());
    for j in 0..theta.len() {
        let (mut up, mut down) = (theta.to_vec(), theta.to_vec());
        up[j] *= 1.0 + FD_STEP;
        down[j] *= 1.0 - FD_STEP;
        let (yu, yd) = (output(&up, s_tilde, days)?, output(&down, s_tilde, days)?);
        // column of dy/d(ln θ_j)
        for t in 0..days {
            sens[(t, j)] = (yu[t] - yd[t]) / (2.0 * FD_STEP);
        }
    }
    let mut sv: Vec<f64> = sens.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = if top > 0.0 {
        sv.iter().filter(|&&s| s / top > RANK_THRESHOLD).count()
    } else {
        0
    };
    Ok(IdentifiabilityReport {
        rank,
        parameters: PARAMETER_NAMES[..theta.len()]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        singular_values: sv,
        samples: days,
    })
}

/// Rank of the sensitivity of daily `y(0..=horizon)` with respect to
/// `(γ, α, K, u, I₀, β̂₀)`.
pub fn identifiability_rank(
    params: &NormalizedParams,
    s_tilde: f64,
    init: &FitInit,
    horizon: usize,
) -> Result<IdentifiabilityReport> {
    let theta = [
        params.gamma,
        params.alpha,
        params.k,
        params.u,
        init.i0,
        init.beta_hat0,
    ];
    rank_of(&theta, s_tilde, horizon)
}

/// As [`identifiability_rank`] with the intrinsic rate `c̃` (at 1) added as
/// a seventh parameter.
pub fn identifiability_rank_with_c_tilde(
    params: &NormalizedParams,
    s_tilde: f64,
    init: &FitInit,
    horizon: usize,
) -> Result<IdentifiabilityReport> {
    let theta = [
        params.gamma,
        params.alpha,
        params.k,
        params.u,
        init.i0,
        init.beta_hat0,
        1.0,
    ];
    rank_of(&theta, s_tilde, horizon)
}
