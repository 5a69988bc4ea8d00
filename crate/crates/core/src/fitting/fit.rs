//! Least-squares estimation of `(γ, α, K, u, I₀, β̂₀)` by multi-start simplex
//! descent in log-parameter space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::data::IncidenceSeries;
use super::model::{pack, simulate_fit_output, unpack, FitInit, NormalizedParams};
use super::nelder_mead::{minimize, SimplexOptions};
use crate::analysis::identifiability::identifiability_rank;
use crate::{Error, Result};

pub const DEFAULT_SEEDS: usize = 16;
pub const MIN_WINDOW_DAYS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossSpace {
    Linear,
    /// Residuals of `ln(1 + y)`.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitTarget {
    Smoothed,
    Raw,
}

/// Boxes for `(γ, α, K, u, I₀, β̂₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: [f64; 6],
    pub upper: [f64; 6],
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            lower: [0.01, 0.001, 1e-4, 1e-7, 1.0, 1e-5],
            upper: [1.0, 1.0, 1.0, 1e-1, 1e6, 1.0],
        }
    }
}

impl Bounds {
    pub fn validate(&self) -> Result<()> {
        for k in 0..6 {
            let (lo, hi) = (self.lower[k], self.upper[k]);
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "bound {k}: need 0 < {lo} < {hi}"
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64; 6]) -> bool {
        (0..6).all(|k| x[k] >= self.lower[k] && x[k] <= self.upper[k])
    }

    /// Geometric centre of the box.
    pub fn center(&self) -> [f64; 6] {
        let mut c = [0.0; 6];
        for k in 0..6 {
            c[k] = (self.lower[k] * self.upper[k]).sqrt();
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitProblem {
    pub data: IncidenceSeries,
    /// Rescaled population, held fixed.
    pub s_tilde: f64,
    /// Inclusive day indices into the series; the model starts at the first.
    pub window: (usize, usize),
    pub bounds: Bounds,
    pub loss_space: LossSpace,
    pub target: FitTarget,
    /// First start of the multi-start search; the box centre when absent.
    pub initial_guess: Option<[f64; 6]>,
}

impl FitProblem {
    /// Whole series, default bounds, linear loss on the smoothed series.
    pub fn new(data: IncidenceSeries, s_tilde: f64) -> Result<Self> {
        let end = data.len().saturating_sub(1);
        let problem = Self {
            data,
            s_tilde,
            window: (0, end),
            bounds: Bounds::default(),
            loss_space: LossSpace::Linear,
            target: FitTarget::Smoothed,
            initial_guess: None,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_window(mut self, start: usize, end: usize) -> Result<Self> {
        self.window = (start, end);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s_tilde > 0.0 && self.s_tilde.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "S̃ = {} must be positive",
                self.s_tilde
            )));
        }
        let (a, b) = self.window;
        if b >= self.data.len() || a > b {
            return Err(Error::InvalidParameter(format!(
                "window [{a}, {b}] outside series of {} days",
                self.data.len()
            )));
        }
        if b - a + 1 < MIN_WINDOW_DAYS {
            return Err(Error::InvalidParameter(format!(
                "window has {} days, need at least {MIN_WINDOW_DAYS}",
                b - a + 1
            )));
        }
        self.bounds.validate()?;
        if let Some(g) = &self.initial_guess {
            if !self.bounds.contains(g) {
                return Err(Error::InvalidParameter(format!(
                    "initial guess {g:?} outside bounds"
                )));
            }
        }
        Ok(())
    }

    pub fn days(&self) -> usize {
        self.window.1 - self.window.0 + 1
    }

    /// Target values over the window; `None` where the smoothed series is
    /// undefined.
    pub fn targets(&self) -> Vec<Option<f64>> {
        let (a, b) = self.window;
        match self.target {
            FitTarget::Raw => self.data.raw[a..=b].iter().map(|&v| Some(v)).collect(),
            FitTarget::Smoothed => self.data.smoothed[a..=b].to_vec(),
        }
    }

    fn residual(&self, model: f64, data: f64) -> f64 {
        match self.loss_space {
            LossSpace::Linear => model - data,
            LossSpace::Log => model.ln_1p() - data.ln_1p(),
        }
    }

    fn sum_squares(&self, model: &[f64], targets: &[Option<f64>]) -> f64 {
        model
            .iter()
            .zip(targets)
            .filter_map(|(&m, t)| t.map(|d| self.residual(m, d).powi(2)))
            .sum()
    }

    /// Residual sum of squares of the model with these parameters.
    pub fn loss(&self, params: &NormalizedParams, init: &FitInit) -> Result<f64> {
        let y = simulate_fit_output(params, init, self.s_tilde, self.days())?;
        Ok(self.sum_squares(&y, &self.targets()))
    }

    /// Root-mean-square residual in cases per day over the defined targets.
    pub fn rms_error(&self, params: &NormalizedParams, init: &FitInit) -> Result<f64> {
        let y = simulate_fit_output(params, init, self.s_tilde, self.days())?;
        let (sum, n) = y
            .iter()
            .zip(self.targets())
            .filter_map(|(&m, t)| t.map(|d| (m - d).powi(2)))
            .fold((0.0, 0usize), |(s, n), r| (s + r, n + 1));
        if n == 0 {
            return Err(Error::EmptySeries(
                "fitting window has no target values".into(),
            ));
        }
        Ok((sum / n as f64).sqrt())
    }

    /// Model output over the window.
    pub fn fitted_curve(&self, params: &NormalizedParams, init: &FitInit) -> Result<Vec<f64>> {
        simulate_fit_output(params, init, self.s_tilde, self.days())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Random starts in addition to the initial guess.
    pub seeds: usize,
    pub seed: u64,
    pub simplex: SimplexOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            seeds: DEFAULT_SEEDS,
            seed: 0,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: NormalizedParams,
    pub init: FitInit,
    pub loss: f64,
    pub rms_error: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub restarts_used: usize,
    /// Best loss after each start.
    pub best_so_far: Vec<f64>,
}

impl FitResult {
    /// `(γ, α, K, u, I₀, β̂₀)`
    pub fn to_array(&self) -> [f64; 6] {
        pack(&self.params, &self.init)
    }
}

pub fn fit(problem: &FitProblem, options: &FitOptions) -> Result<FitResult> {
    problem.validate()?;
    let bounds = problem.bounds;
    let guess = problem.initial_guess.unwrap_or_else(|| bounds.center());
    let (gp, gi) = unpack(&guess);
    let report = identifiability_rank(&gp, problem.s_tilde, &gi, problem.days() - 1)?;
    if !report.is_full_rank() {
        return Err(Error::NotIdentifiable {
            rank: report.rank,
            expected: 6,
        });
    }

    let targets = problem.targets();
    let days = problem.days();
    let objective = |z: &[f64; 6]| -> f64 {
        let (p, i) = unpack(&z.map(f64::exp));
        match simulate_fit_output(&p, &i, problem.s_tilde, days) {
            Ok(y) => problem.sum_squares(&y, &targets),
            Err(_) => f64::INFINITY,
        }
    };
    let (lo, hi) = (bounds.lower.map(f64::ln), bounds.upper.map(f64::ln));

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut starts = vec![guess.map(f64::ln)];
    for _ in 0..options.seeds {
        let mut z = [0.0; 6];
        for k in 0..6 {
            z[k] = rng.random_range(lo[k]..=hi[k]);
        }
        starts.push(z);
    }

    let mut best: Option<(f64, [f64; 6], bool)> = None;
    let (mut iterations, mut evaluations) = (0, 0);
    let mut best_so_far = Vec::with_capacity(starts.len());
    for z0 in &starts {
        let r = minimize(objective, *z0, lo, hi, &options.simplex);
        iterations += r.iterations;
        evaluations += r.evaluations;
        if best.as_ref().is_none_or(|b| r.value < b.0) {
            best = Some((r.value, r.x, r.converged));
        }
        best_so_far.push(best.as_ref().map_or(f64::INFINITY, |b| b.0));
    }
    let (value, z, converged) = best.expect("at least one start");
    if !value.is_finite() {
        return Err(Error::Fit(format!(
            "all {} starts diverged ({evaluations} evaluations)",
            starts.len()
        )));
    }
    let x = pack_clamped(z.map(f64::exp), &bounds);
    let (params, init) = unpack(&x);
    Ok(FitResult {
        params,
        init,
        loss: problem.loss(&params, &init)?,
        rms_error: problem.rms_error(&params, &init)?,
        iterations,
        evaluations,
        converged,
        restarts_used: starts.len(),
        best_so_far,
    })
}

// exp(ln b) can round just outside the box
fn pack_clamped(mut x: [f64; 6], bounds: &Bounds) -> [f64; 6] {
    for k in 0..6 {
        x[k] = x[k].clamp(bounds.lower[k], bounds.upper[k]);
    }
    x
}

/// Convenience for callers holding parameters as a flat array.
pub fn loss_at(problem: &FitProblem, x: &[f64; 6]) -> Result<f64> {
    let (p, i) = unpack(x);
    problem.loss(&p, &i)
}
