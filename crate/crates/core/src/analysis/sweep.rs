//! Full-model runs over population sizes with `c S(0)` held fixed.

use serde::{Deserialize, Serialize};

use crate::dynamics::law::{endemic_scaled_infectives, ContactRateLaw};
use crate::dynamics::{rhs_full, EpidemicParams, FullState};
use crate::solver::{integrate, IntegratorConfig, Trajectory};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    /// The product `c S(0)`, common to every population.
    pub c_s: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub u: f64,
    pub i0: f64,
    pub beta0: f64,
    pub horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCase {
    pub population: f64,
    pub terminal_s: f64,
    pub terminal_i: f64,
    /// QSS level at the initial `c S(0)`.
    pub qss: f64,
    /// QSS level at the terminal susceptibles, `I_e(c S(T))`.
    pub qss_current: f64,
    /// `(I(T) - qss) / qss`
    pub deviation: f64,
    /// `(I(T) - qss_current) / qss_current`; zero level gives `NaN`.
    pub deviation_current: f64,
}

pub fn run_population<L: ContactRateLaw + ?Sized>(
    settings: &SweepSettings,
    law: &L,
    population: f64,
    cfg: &IntegratorConfig,
) -> Result<(Trajectory<4>, SweepCase)> {
    if !(population > settings.i0) {
        return Err(Error::InvalidParameter(format!(
            "population {population} must exceed the initial infectives {}",
            settings.i0
        )));
    }
    let c = settings.c_s / population;
    let params = EpidemicParams::new(c, settings.gamma, settings.alpha, settings.u, 1e-6)?;
    let qss_at = |c_s: f64| {
        endemic_scaled_infectives(law, settings.gamma, c_s).map_or(0.0, |x| x / settings.u)
    };
    let qss = endemic_scaled_infectives(law, settings.gamma, settings.c_s)
        .map(|x| x / settings.u)
        .ok_or_else(|| {
            let img = law.h_image();
            Error::NoEndemicState {
                value: law.g(settings.gamma / settings.c_s),
                lower: img.lower,
                upper: img.upper,
            }
        })?;
    let x0 = [population - settings.i0, settings.i0, 0.0, settings.beta0];
    let traj = integrate(
        |_t, x: &[f64; 4]| Ok(rhs_full(&FullState::from_array(*x), &params, law)?.to_array()),
        x0,
        (0.0, settings.horizon),
        cfg,
    )?
    .labelled("full");
    let last = traj.last_state();
    let qss_current = qss_at(c * last[0]);
    let case = SweepCase {
        population,
        terminal_s: last[0],
        terminal_i: last[1],
        qss,
        qss_current,
        deviation: (last[1] - qss) / qss,
        deviation_current: if qss_current > 0.0 {
            (last[1] - qss_current) / qss_current
        } else {
            f64::NAN
        },
    };
    Ok((traj, case))
}

pub fn population_sweep<L: ContactRateLaw + ?Sized>(
    settings: &SweepSettings,
    law: &L,
    populations: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<(Trajectory<4>, SweepCase)>> {
    populations
        .iter()
        .map(|&n| run_population(settings, law, n, cfg))
        .collect()
}
