use std::path::Path;

use serde::{Deserialize, Serialize};

use regsir_core::fitting::{Bounds, FitTarget, LossSpace, NormalizedParams};
use regsir_core::{EpidemicParams, IntegratorConfig, MonodLaw};

use crate::error::CliError;

pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Parameter file shared by every command. Each command reads the fields it
/// needs and rejects the file if one of them is missing.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    /// Monod nominal contact rate `K`.
    pub k: Option<f64>,
    pub u: Option<f64>,
    /// Intrinsic infection rate.
    pub c: Option<f64>,
    /// Composite `c S`.
    pub c_s: Option<f64>,
    pub population: Option<f64>,
    pub epsilon: Option<f64>,
    /// Rescaled susceptibles `ε S`.
    pub s_tilde: Option<f64>,
    pub i0: Option<f64>,
    pub beta0: Option<f64>,
    pub r0: Option<f64>,
    pub integrator: IntegratorConfig,
    pub fit: FitConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Inclusive day indices; whole series when absent.
    pub window: Option<[usize; 2]>,
    pub loss_space: LossSpace,
    pub target: FitTarget,
    pub seeds: usize,
    pub smoothing_window: usize,
    pub bounds: Option<Bounds>,
    pub initial_guess: Option<[f64; 6]>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            window: None,
            loss_space: LossSpace::Linear,
            target: FitTarget::Smoothed,
            seeds: regsir_core::fitting::fit::DEFAULT_SEEDS,
            smoothing_window: 7,
            bounds: None,
            initial_guess: None,
        }
    }
}

/// Model quantities after filling in the derived ones.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Resolved {
    pub params: EpidemicParams,
    #[serde(skip)]
    pub law: MonodLaw,
    pub k: f64,
    pub c_s: f64,
    pub population: Option<f64>,
    pub s_tilde0: Option<f64>,
}

fn need(v: Option<f64>, name: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Invalid(format!("parameter file is missing `{name}`")))
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        cfg.integrator.validate()?;
        Ok(cfg)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(DEFAULT_EPSILON)
    }

    pub fn law(&self) -> Result<MonodLaw, CliError> {
        Ok(MonodLaw::new(need(self.k, "k")?)?)
    }

    /// `(γ, α, K, u)` and the composite rate, with `c`, `c_s`, the
    /// population and `S̃` reconciled.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let (gamma, alpha, u) = (
            need(self.gamma, "gamma")?,
            need(self.alpha, "alpha")?,
            need(self.u, "u")?,
        );
        let law = self.law()?;
        let eps = self.epsilon();
        let c_s = match (self.c_s, self.c, self.population) {
            (Some(cs), Some(c), Some(n)) => {
                if ((c * n - cs) / cs).abs() > 1e-12 {
                    return Err(CliError::Invalid(format!(
                        "c_s = {cs} disagrees with c·population = {}",
                        c * n
                    )));
                }
                cs
            }
            (Some(cs), _, _) => cs,
            (None, Some(c), Some(n)) => c * n,
            _ => {
                return Err(CliError::Invalid(
                    "give `c_s`, or `c` together with `population`".into(),
                ))
            }
        };
        let s_tilde0 = self.s_tilde.or(self.population.map(|n| eps * n));
        let c = match (self.c, self.population, s_tilde0) {
            (Some(c), _, _) => c,
            (None, Some(n), _) => c_s / n,
            (None, None, Some(s)) => c_s * eps / s,
            (None, None, None) => c_s * eps,
        };
        let params = EpidemicParams::new(c, gamma, alpha, u, eps)?;
        Ok(Resolved {
            params,
            law,
            k: law.k,
            c_s,
            population: self.population,
            s_tilde0,
        })
    }

    pub fn normalized(&self) -> Result<(NormalizedParams, f64), CliError> {
        let p = NormalizedParams {
            gamma: need(self.gamma, "gamma")?,
            alpha: need(self.alpha, "alpha")?,
            k: need(self.k, "k")?,
            u: need(self.u, "u")?,
        };
        p.validate()?;
        let s_tilde = self
            .s_tilde
            .or(self.population.map(|n| self.epsilon() * n))
            .ok_or_else(|| CliError::Invalid("give `s_tilde` or `population`".into()))?;
        Ok((p, s_tilde))
    }

    pub fn integrator(&self) -> IntegratorConfig {
        self.integrator
    }
}
