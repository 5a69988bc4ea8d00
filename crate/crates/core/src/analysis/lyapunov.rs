//! Lyapunov certificate for the endemic state of the fast subsystem, in
//! log-infective coordinates `p = ln I`:
//!
//! `V(p, β) = ∫_{p_e}^{p} (h(u e^{p_e}) - h(u e^q)) dq + (c_s β - γ)² / (2 c_s α)`
//!
//! whose derivative along trajectories is
//! `V̇ = (c_s β - γ)(g(γ/c_s) - g(β)) ≤ 0`.

use serde::{Deserialize, Serialize};

use crate::dynamics::law::{a4_slack, ContactRateLaw};
use crate::dynamics::EpidemicParams;
use crate::{Error, Result};

/// Absolute tolerance of the adaptive quadrature used for laws without a
/// closed-form log-primitive.
pub const QUADRATURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSample {
    pub p: f64,
    pub beta: f64,
    pub v: f64,
    pub v_dot: f64,
}

/// Endemic point of the log system, precomputed for repeated evaluation.
#[derive(Debug, Clone, Copy)]
pub struct LyapunovFunction<'a, L: ContactRateLaw + ?Sized> {
    law: &'a L,
    params: EpidemicParams,
    c_s: f64,
    p_e: f64,
    beta_e: f64,
    h_e: f64,
}

impl<'a, L: ContactRateLaw + ?Sized> LyapunovFunction<'a, L> {
    pub fn new(law: &'a L, params: &EpidemicParams, c_s: f64) -> Result<Self> {
        let beta_e = params.gamma / c_s;
        let no_endemic = || {
            let img = law.h_image();
            Error::NoEndemicState {
                value: law.g(beta_e),
                lower: img.lower,
                upper: img.upper,
            }
        };
        if a4_slack(law, params.gamma, c_s) <= 0.0 {
            return Err(no_endemic());
        }
        let x_e = law.h_inv(law.g(beta_e)).ok_or_else(no_endemic)?;
        Ok(Self {
            law,
            params: *params,
            c_s,
            p_e: (x_e / params.u).ln(),
            beta_e,
            h_e: law.h(x_e),
        })
    }

    pub fn equilibrium(&self) -> (f64, f64) {
        (self.p_e, self.beta_e)
    }

    fn integral(&self, p: f64) -> f64 {
        let u = self.params.u;
        if let (Some(fp), Some(fe)) = (
            self.law.h_log_primitive(u, p),
            self.law.h_log_primitive(u, self.p_e),
        ) {
            return self.h_e * (p - self.p_e) - (fp - fe);
        }
        let f = |q: f64| self.h_e - self.law.h(u * q.exp());
        adaptive_simpson(&f, self.p_e, p, QUADRATURE_TOL)
    }

    pub fn evaluate(&self, p: f64, beta: f64) -> LyapunovSample {
        let (gamma, alpha) = (self.params.gamma, self.params.alpha);
        let drift = self.c_s * beta - gamma;
        let v = self.integral(p) + drift * drift / (2.0 * self.c_s * alpha);
        let v_dot = drift * (self.law.g(gamma / self.c_s) - self.law.g(beta));
        LyapunovSample { p, beta, v, v_dot }
    }
}

/// Evaluates `V` and `V̇` at `(p, β)`; fails when no endemic state exists.
pub fn lyapunov<L: ContactRateLaw + ?Sized>(
    p: f64,
    beta: f64,
    law: &L,
    params: &EpidemicParams,
    c_s: f64,
) -> Result<LyapunovSample> {
    Ok(LyapunovFunction::new(law, params, c_s)?.evaluate(p, beta))
}

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub(crate) fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
