use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use regsir_core::analysis::{
    check_assumptions, disease_free_state, endemic_state, AssumptionReport, LyapunovFunction,
    SteadyStateInfo,
};
use regsir_core::dynamics::{monod_threshold, r0, rhs_fast, ContactRateLaw, FastState};

use super::Outputs;
use crate::config::Resolved;
use crate::error::CliError;
use crate::output::json_bytes;
use crate::Context;

const LYAPUNOV_SAMPLES: usize = 400;
const NULLCLINE_POINTS: usize = 101;
const GRID: usize = 21;

#[derive(Debug, Serialize, Deserialize)]
pub struct LyapunovSummary {
    pub samples: usize,
    pub min_v: f64,
    /// Largest `dV/dt` over the samples; nonpositive when the certificate holds.
    pub max_v_dot: f64,
    pub nonincreasing: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Nullclines {
    /// `dI/dt = 0` away from `I = 0` along `β = γ/c_s`.
    pub infectives_beta: f64,
    /// `dβ/dt = 0` along `β = g⁻¹(h(uI))`, as `(I, β)` pairs.
    pub contact_rate: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Arrow {
    pub i: f64,
    pub beta: f64,
    pub di: f64,
    pub dbeta: f64,
    /// Unit direction after scaling each axis by the plotted range.
    pub dx: f64,
    pub dy: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub c_s: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub k: f64,
    pub u: f64,
    pub r0: f64,
    /// Rescaled susceptibles below which no endemic state exists.
    pub threshold_s_tilde: f64,
    pub assumptions: AssumptionReport,
    pub steady_states: Vec<SteadyStateInfo>,
    pub lyapunov: Option<LyapunovSummary>,
    pub nullclines: Nullclines,
    pub vector_field: Vec<Arrow>,
}

pub fn run(ctx: &Context) -> Result<Outputs, CliError> {
    let report = analyze(ctx)?;
    Ok(vec![(ctx.out.clone(), json_bytes(&report)?)])
}

pub fn analyze(ctx: &Context) -> Result<AnalyzeReport, CliError> {
    let Resolved {
        params, law, c_s, ..
    } = ctx.config.resolve()?;
    let disease_free = disease_free_state(&law, &params, c_s);
    let endemic = endemic_state(&law, &params, c_s);
    let beta0 = ctx
        .config
        .beta0
        .or(disease_free.map(|s| s.beta))
        .unwrap_or(law.k);
    let steady_states: Vec<SteadyStateInfo> = disease_free.into_iter().chain(endemic).collect();

    let lyapunov = match endemic {
        Some(e) => {
            let v = LyapunovFunction::new(&law, &params, c_s)?;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let (p_e, beta_e) = (e.i.ln(), e.beta);
            let (mut min_v, mut max_v_dot) = (f64::INFINITY, f64::NEG_INFINITY);
            for _ in 0..LYAPUNOV_SAMPLES {
                let p = p_e + rng.random_range(-3.0..3.0);
                let beta = beta_e * rng.random_range(0.05..3.0);
                let s = v.evaluate(p, beta);
                min_v = min_v.min(s.v);
                max_v_dot = max_v_dot.max(s.v_dot);
            }
            Some(LyapunovSummary {
                samples: LYAPUNOV_SAMPLES,
                min_v,
                max_v_dot,
                nonincreasing: max_v_dot <= 0.0,
            })
        }
        None => None,
    };

    let i_max = endemic.map_or(10.0 / params.u, |e| 2.5 * e.i);
    let beta_star = params.gamma / c_s;
    let beta_max = 2.0 * beta_star.max(beta0);
    let contact_rate = (0..NULLCLINE_POINTS)
        .filter_map(|k| {
            let i = i_max * k as f64 / (NULLCLINE_POINTS - 1) as f64;
            law.g_inv(law.h(params.u * i)).map(|b| [i, b])
        })
        .collect();

    let mut vector_field = Vec::with_capacity(GRID * GRID);
    for a in 0..GRID {
        for b in 0..GRID {
            let i = i_max * a as f64 / (GRID - 1) as f64;
            let beta = beta_max * b as f64 / (GRID - 1) as f64;
            let d = rhs_fast(&FastState { i, beta, c_s }, &params, &law)?;
            let (x, y) = (d.di / i_max, d.dbeta / beta_max);
            let norm = x.hypot(y);
            let (dx, dy) = if norm > 0.0 {
                (x / norm, y / norm)
            } else {
                (0.0, 0.0)
            };
            vector_field.push(Arrow {
                i,
                beta,
                di: d.di,
                dbeta: d.dbeta,
                dx,
                dy,
            });
        }
    }

    Ok(AnalyzeReport {
        c_s,
        gamma: params.gamma,
        alpha: params.alpha,
        k: law.k,
        u: params.u,
        r0: r0(c_s, beta0, params.gamma),
        threshold_s_tilde: monod_threshold(&params, &law),
        assumptions: check_assumptions(&law, &params, c_s),
        steady_states,
        lyapunov,
        nullclines: Nullclines {
            infectives_beta: beta_star,
            contact_rate,
        },
        vector_field,
    })
}
