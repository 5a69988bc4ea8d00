use serde::{Deserialize, Serialize};

use super::law::{a4_holds, ContactRateLaw};
use crate::{Error, Result};

/// Biological and societal constants of the regulated SIR model.
///
/// The rescaled infection rate `c̃ = c/ε` is derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpidemicParams {
    /// Intrinsic infection rate (1/(person·day)).
    pub c: f64,
    /// Removal rate (1/day).
    pub gamma: f64,
    /// Contact-rate relaxation rate (1/day).
    pub alpha: f64,
    /// Perception gain (1/person).
    pub u: f64,
    /// Population rescaling factor, `S̃ = ε S`.
    pub epsilon: f64,
}

impl EpidemicParams {
    pub fn new(c: f64, gamma: f64, alpha: f64, u: f64, epsilon: f64) -> Result<Self> {
        let p = Self {
            c,
            gamma,
            alpha,
            u,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from the rescaled infection rate `c̃`.
    pub fn from_rescaled(
        c_tilde: f64,
        gamma: f64,
        alpha: f64,
        u: f64,
        epsilon: f64,
    ) -> Result<Self> {
        Self::new(c_tilde * epsilon, gamma, alpha, u, epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("c", self.c),
            ("gamma", self.gamma),
            ("alpha", self.alpha),
            ("u", self.u),
            ("epsilon", self.epsilon),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn c_tilde(&self) -> f64 {
        self.c / self.epsilon
    }

    /// Same parameters with a new `ε`, keeping `c̃` fixed.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::from_rescaled(self.c_tilde(), self.gamma, self.alpha, self.u, epsilon)
    }

    pub fn with_u(&self, u: f64) -> Result<Self> {
        Self::new(self.c, self.gamma, self.alpha, u, self.epsilon)
    }
}

/// State of the full model. `R` is carried only for conservation checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullState {
    pub s: f64,
    pub i: f64,
    pub r: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullDerivative {
    pub ds: f64,
    pub di: f64,
    pub dr: f64,
    pub dbeta: f64,
}

impl FullState {
    pub fn to_array(self) -> [f64; 4] {
        [self.s, self.i, self.r, self.beta]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        Self {
            s: x[0],
            i: x[1],
            r: x[2],
            beta: x[3],
        }
    }

    pub fn total(&self) -> f64 {
        self.s + self.i + self.r
    }
}

impl FullDerivative {
    pub fn to_array(self) -> [f64; 4] {
        [self.ds, self.di, self.dr, self.dbeta]
    }
}

/// State of the fast subsystem with the susceptibles frozen into `c_s = c S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FastState {
    pub i: f64,
    pub beta: f64,
    pub c_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastDerivative {
    pub di: f64,
    pub dbeta: f64,
}

/// Fast subsystem in log-infectives `p = ln I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFastState {
    pub p: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFastDerivative {
    pub dp: f64,
    pub dbeta: f64,
}

impl FastState {
    pub fn to_log(&self) -> Result<LogFastState> {
        if !(self.i > 0.0) {
            return Err(Error::Domain(format!(
                "log transform needs I > 0, got {}",
                self.i
            )));
        }
        Ok(LogFastState {
            p: self.i.ln(),
            beta: self.beta,
        })
    }
}

pub(crate) fn eval_g<L: ContactRateLaw + ?Sized>(law: &L, beta: f64) -> Result<f64> {
    let v = law.g(beta);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation {
            law: law.descriptor().to_string(),
            map: "g",
            input: beta,
        })
    }
}

pub(crate) fn eval_h<L: ContactRateLaw + ?Sized>(law: &L, x: f64) -> Result<f64> {
    let v = law.h(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation {
            law: law.descriptor().to_string(),
            map: "h",
            input: x,
        })
    }
}

/// Contact-rate equation `dβ/dt = -α (g(β) - h(u I))`.
pub fn contact_rate_derivative<L: ContactRateLaw + ?Sized>(
    beta: f64,
    i: f64,
    params: &EpidemicParams,
    law: &L,
) -> Result<f64> {
    Ok(-params.alpha * (eval_g(law, beta)? - eval_h(law, params.u * i)?))
}

/// Right-hand side of the SIR model coupled to contact-rate regulation.
pub fn rhs_full<L: ContactRateLaw + ?Sized>(
    state: &FullState,
    params: &EpidemicParams,
    law: &L,
) -> Result<FullDerivative> {
    let infection = params.c * state.beta * state.s * state.i;
    let removal = params.gamma * state.i;
    Ok(FullDerivative {
        ds: -infection,
        di: infection - removal,
        dr: removal,
        dbeta: contact_rate_derivative(state.beta, state.i, params, law)?,
    })
}

/// Fast subsystem: `dI/dt = (c_s β - γ) I`, contact-rate regulation unchanged.
pub fn rhs_fast<L: ContactRateLaw + ?Sized>(
    state: &FastState,
    params: &EpidemicParams,
    law: &L,
) -> Result<FastDerivative> {
    Ok(FastDerivative {
        di: (state.c_s * state.beta - params.gamma) * state.i,
        dbeta: contact_rate_derivative(state.beta, state.i, params, law)?,
    })
}

pub fn rhs_log_fast<L: ContactRateLaw + ?Sized>(
    state: &LogFastState,
    c_s: f64,
    params: &EpidemicParams,
    law: &L,
) -> Result<LogFastDerivative> {
    let i = state.p.exp();
    if !state.p.is_finite() || !i.is_finite() {
        return Err(Error::Range(state.p));
    }
    Ok(LogFastDerivative {
        dp: c_s * state.beta - params.gamma,
        dbeta: contact_rate_derivative(state.beta, i, params, law)?,
    })
}

/// Reduced equation for the rescaled susceptibles in slow time `τ = ε t`:
/// `dS̄/dτ = -(γ/u) h⁻¹(g(γ/(c̃ S̄)))` where the endemic state exists, zero
/// elsewhere.
pub fn rhs_slow<L: ContactRateLaw + ?Sized>(s_bar: f64, params: &EpidemicParams, law: &L) -> f64 {
    let c_s = params.c_tilde() * s_bar;
    if !(s_bar > 0.0) || !a4_holds(law, params.gamma, c_s) {
        return 0.0;
    }
    match law.h_inv(law.g(params.gamma / c_s)) {
        Some(x) => -(params.gamma / params.u) * x,
        None => 0.0,
    }
}

/// Daily incidence of the normalized model, `y = S̃ β̂ I`.
pub fn measured_output(s_tilde: f64, beta_hat: f64, i: f64) -> f64 {
    s_tilde * beta_hat * i
}

/// Outbreak threshold `R₀ = b S₀ / γ`.
pub fn r0(b: f64, s0: f64, gamma: f64) -> f64 {
    b * s0 / gamma
}
