//! Control experiments on the fast subsystem: adaptation to a step in the
//! perception gain `u`, fold-change detection, and QSS assignment.

use serde::{Deserialize, Serialize};

use super::steady::{endemic_state, slowest_rate};
use crate::dynamics::law::{endemic_scaled_infectives, ContactRateLaw};
use crate::dynamics::{rhs_fast, EpidemicParams, FastState};
use crate::solver::{integrate, sample_at, IntegratorConfig, Trajectory};
use crate::{Error, Result};

/// Half-width of the settling band around `γ/c_s`, relative.
pub const SETTLING_BAND: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UStep {
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptationReport {
    pub beta_target: f64,
    pub max_beta_deviation: f64,
    /// First time after which `β` stays inside the settling band.
    pub settling_time: Option<f64>,
    pub terminal_beta_error: f64,
    pub terminal_i: f64,
    pub expected_terminal_i: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FcdReport {
    pub max_beta_difference: f64,
    /// `sup |ū₁ I₁ - ū₂ I₂|`
    pub max_scaled_i_difference: f64,
    pub samples: usize,
}

/// Integration settings shared by the experiments: tight enough that
/// terminal and paired errors sit well below `1e-6`.
pub fn experiment_config() -> IntegratorConfig {
    IntegratorConfig::rk45(1e-10, 1e-12)
}

fn no_endemic<L: ContactRateLaw + ?Sized>(law: &L, gamma: f64, c_s: f64) -> Error {
    let img = law.h_image();
    Error::NoEndemicState {
        value: law.g(gamma / c_s),
        lower: img.lower,
        upper: img.upper,
    }
}

/// Horizon long enough for the local transient to decay by `e^{-50}`.
pub fn settling_horizon<L: ContactRateLaw + ?Sized>(
    law: &L,
    params: &EpidemicParams,
    c_s: f64,
) -> f64 {
    50.0 / slowest_rate(law, params, c_s)
}

/// Simulates the fast subsystem under gain `params.u` from `(i0, β0)`.
pub fn simulate_fast<L: ContactRateLaw + ?Sized>(
    law: &L,
    params: &EpidemicParams,
    c_s: f64,
    init: (f64, f64),
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<2>> {
    let rhs = |_t: f64, x: &[f64; 2]| {
        let d = rhs_fast(
            &FastState {
                i: x[0],
                beta: x[1],
                c_s,
            },
            params,
            law,
        )?;
        Ok([d.di, d.dbeta])
    };
    Ok(integrate(rhs, [init.0, init.1], (0.0, horizon), cfg)?.labelled("fast"))
}

/// Starts at the endemic point for `u_before` and switches the gain to
/// `u_after` at `t = 0`.
pub fn adaptation_experiment<L: ContactRateLaw + ?Sized>(
    params: &EpidemicParams,
    law: &L,
    c_s: f64,
    step: UStep,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<(Trajectory<2>, AdaptationReport)> {
    let before = params.with_u(step.before)?;
    let after = params.with_u(step.after)?;
    let start =
        endemic_state(law, &before, c_s).ok_or_else(|| no_endemic(law, params.gamma, c_s))?;
    let end = endemic_state(law, &after, c_s).ok_or_else(|| no_endemic(law, params.gamma, c_s))?;
    let traj = simulate_fast(law, &after, c_s, (start.i, start.beta), horizon, cfg)?;

    let target = params.gamma / c_s;
    let band = SETTLING_BAND * target;
    let betas = traj.component(1);
    let max_beta_deviation = betas.iter().map(|b| (b - target).abs()).fold(0.0, f64::max);
    let settling_time = match betas.iter().rposition(|b| (b - target).abs() > band) {
        None => Some(traj.t_start()),
        Some(k) if k + 1 < betas.len() => Some(traj.times()[k + 1]),
        Some(_) => None,
    };
    let last = traj.last_state();
    let report = AdaptationReport {
        beta_target: target,
        max_beta_deviation,
        settling_time,
        terminal_beta_error: (last[1] - target).abs(),
        terminal_i: last[0],
        expected_terminal_i: end.i,
    };
    Ok((traj, report))
}

/// Fold-change step `ū → q ū` applied at two base levels, each started from
/// its own pre-step endemic state; compares the two responses on a shared
/// grid of `samples` points.
#[allow(clippy::too_many_arguments)]
pub fn fcd_experiment<L: ContactRateLaw + ?Sized>(
    params: &EpidemicParams,
    law: &L,
    c_s: f64,
    q: f64,
    u_bar_1: f64,
    u_bar_2: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<FcdReport> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "fold q = {q} must be positive"
        )));
    }
    let run = |u_bar: f64| -> Result<Trajectory<2>> {
        let pre = params.with_u(u_bar)?;
        let start =
            endemic_state(law, &pre, c_s).ok_or_else(|| no_endemic(law, params.gamma, c_s))?;
        simulate_fast(
            law,
            &params.with_u(q * u_bar)?,
            c_s,
            (start.i, start.beta),
            horizon,
            cfg,
        )
    };
    let samples = 4001;
    let grid: Vec<f64> = (0..samples)
        .map(|k| horizon * k as f64 / (samples - 1) as f64)
        .collect();
    let a = sample_at(&run(u_bar_1)?, &grid)?;
    let b = sample_at(&run(u_bar_2)?, &grid)?;
    let mut report = FcdReport {
        max_beta_difference: 0.0,
        max_scaled_i_difference: 0.0,
        samples,
    };
    for (x, y) in a.states().iter().zip(b.states()) {
        report.max_beta_difference = report.max_beta_difference.max((x[1] - y[1]).abs());
        report.max_scaled_i_difference = report
            .max_scaled_i_difference
            .max((u_bar_1 * x[0] - u_bar_2 * y[0]).abs());
    }
    Ok(report)
}

/// Gain that places the endemic state at `I*`: `u = h⁻¹(g(γ/c_s)) / I*`.
pub fn assign_u<L: ContactRateLaw + ?Sized>(
    i_star: f64,
    law: &L,
    params: &EpidemicParams,
    c_s: f64,
) -> Result<f64> {
    if !(i_star > 0.0 && i_star.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "target infectives {i_star} must be positive"
        )));
    }
    let x = endemic_scaled_infectives(law, params.gamma, c_s)
        .ok_or_else(|| no_endemic(law, params.gamma, c_s))?;
    Ok(x / i_star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{FnLaw, MonodLaw};
    use approx::assert_relative_eq;

    const C_S: f64 = 17.5392;

    fn nominal() -> (EpidemicParams, MonodLaw) {
        let p = EpidemicParams::new(C_S / 80e6, 0.091, 0.0679, 0.0008, 1e-6).unwrap();
        (p, MonodLaw::new(0.0229).unwrap())
    }

    #[test]
    fn no_step_means_no_motion() {
        let (p, law) = nominal();
        let step = UStep {
            before: p.u,
            after: p.u,
        };
        let (traj, rep) =
            adaptation_experiment(&p, &law, C_S, step, 300.0, &experiment_config()).unwrap();
        let first = traj.states()[0];
        assert!(traj
            .states()
            .iter()
            .all(|x| (x[0] - first[0]).abs() <= 1e-9 * first[0]));
        assert!(rep.max_beta_deviation < 1e-15);
        assert_eq!(rep.settling_time, Some(0.0));
    }

    #[test]
    fn beta_returns_after_tenfold_step() {
        let (p, law) = nominal();
        let after = p.with_u(10.0 * p.u).unwrap();
        let horizon = settling_horizon(&law, &after, C_S);
        let step = UStep {
            before: p.u,
            after: 10.0 * p.u,
        };
        let (_, rep) =
            adaptation_experiment(&p, &law, C_S, step, horizon, &experiment_config()).unwrap();
        assert!(rep.max_beta_deviation > 0.1 * rep.beta_target);
        assert!(rep.settling_time.is_some());
        assert!(rep.terminal_beta_error <= 1e-6, "{rep:?}");
        assert_relative_eq!(rep.terminal_i, rep.expected_terminal_i, max_relative = 1e-5);
        assert_relative_eq!(
            rep.expected_terminal_i,
            4267.138461538461 / 10.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn adaptation_reports_missing_endemic_state() {
        let (p, law) = nominal();
        let step = UStep {
            before: p.u,
            after: 2.0 * p.u,
        };
        let err =
            adaptation_experiment(&p, &law, 1.0, step, 10.0, &experiment_config()).unwrap_err();
        assert!(matches!(err, Error::NoEndemicState { .. }));
    }

    #[test]
    fn fold_change_detection() {
        let (p, law) = nominal();
        let same =
            fcd_experiment(&p, &law, C_S, 10.0, 1e-4, 1e-4, 500.0, &experiment_config()).unwrap();
        assert_eq!(same.max_beta_difference, 0.0);
        assert_eq!(same.max_scaled_i_difference, 0.0);
        let rep =
            fcd_experiment(&p, &law, C_S, 10.0, 1e-4, 1e-3, 500.0, &experiment_config()).unwrap();
        assert!(rep.max_beta_difference <= 1e-6, "{rep:?}");
        assert!(rep.max_scaled_i_difference <= 1e-6, "{rep:?}");
    }

    #[test]
    fn assignment_round_trip() {
        let (p, law) = nominal();
        let u = assign_u(4267.138461538461, &law, &p, C_S).unwrap();
        assert_relative_eq!(u, 0.0008, max_relative = 1e-12);
        assert_relative_eq!(
            assign_u(4267.1, &law, &p, C_S).unwrap(),
            0.0008,
            max_relative = 1e-5
        );
        let half = assign_u(2133.5, &law, &p, C_S).unwrap();
        assert_relative_eq!(
            half,
            2.0 * assign_u(4267.0, &law, &p, C_S).unwrap(),
            max_relative = 1e-14
        );
        for i_star in [1.0, 37.5, 1e5] {
            let u = assign_u(i_star, &law, &p, C_S).unwrap();
            let e = endemic_state(&law, &p.with_u(u).unwrap(), C_S).unwrap();
            assert_relative_eq!(e.i, i_star, max_relative = 1e-9);
        }
        assert!(assign_u(10.0, &law, &p, 1.0).is_err());
        assert!(assign_u(0.0, &law, &p, C_S).is_err());
    }

    #[test]
    fn assignment_for_general_law() {
        let (p, _) = nominal();
        let law = FnLaw::new("exp", |b| b, |x| 0.03 * (-x).exp()).with_domain_upper(1e3);
        for i_star in [10.0, 1e3] {
            let u = assign_u(i_star, &law, &p, C_S).unwrap();
            let e = endemic_state(&law, &p.with_u(u).unwrap(), C_S).unwrap();
            assert_relative_eq!(e.i, i_star, max_relative = 1e-9);
        }
    }
}
