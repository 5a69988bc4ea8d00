use serde::{Deserialize, Serialize};

use crate::dynamics::law::{a4_slack, ContactRateLaw};
use crate::dynamics::{EpidemicParams, FastState};

/// Real parts within this distance of zero are classified as marginal.
pub const CLASSIFICATION_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SteadyStateKind {
    DiseaseFree,
    Endemic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    ExpStable,
    ExpUnstable,
    Marginal,
}

impl Stability {
    pub fn from_eigenvalues(eigenvalues: &[Eigenvalue]) -> Self {
        let max_re = eigenvalues
            .iter()
            .map(|e| e.re)
            .fold(f64::NEG_INFINITY, f64::max);
        if max_re > CLASSIFICATION_MARGIN {
            Stability::ExpUnstable
        } else if max_re < -CLASSIFICATION_MARGIN {
            Stability::ExpStable
        } else {
            Stability::Marginal
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateInfo {
    pub kind: SteadyStateKind,
    pub i: f64,
    pub beta: f64,
    pub eigenvalues: [Eigenvalue; 2],
    pub classification: Stability,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionMargins {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

/// Sampled verification of the standing assumptions on a law:
/// A1 continuity/differentiability, A2 `h` positive and strictly decreasing,
/// A3 `g` nonnegative and strictly increasing, A4 `g(γ/c_s)` interior to
/// the image of `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub a1: bool,
    pub a2: bool,
    pub a3: bool,
    pub a4: bool,
    pub margins: AssumptionMargins,
}

impl AssumptionReport {
    pub fn all(&self) -> bool {
        self.a1 && self.a2 && self.a3 && self.a4
    }
}

const JUMP_TOLERANCE: f64 = 1e-4;

fn sample_grid(scale: f64, upper: f64) -> Vec<f64> {
    let mut grid = vec![0.0];
    grid.extend(
        (0..=160)
            .map(|k| scale * 10f64.powf(-8.0 + 0.1 * k as f64))
            .filter(|&x| x <= upper),
    );
    grid
}

/// Worst relative departure of `f(x + δ)` from its linear prediction
/// `f(x) + f'(x) δ`, or infinity if a value or derivative is non-finite.
fn continuity_defect(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, grid: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for &x in grid {
        let (v, d) = (f(x), df(x));
        let step = 1e-9 * x.max(1e-12);
        let w = f(x + step);
        if !(v.is_finite() && d.is_finite() && w.is_finite()) {
            return f64::INFINITY;
        }
        let scale = (v.abs() + w.abs() + (d * step).abs()).max(f64::MIN_POSITIVE);
        worst = worst.max((w - v - d * step).abs() / scale);
    }
    worst
}

pub fn check_assumptions<L: ContactRateLaw + ?Sized>(
    law: &L,
    params: &EpidemicParams,
    c_s: f64,
) -> AssumptionReport {
    let upper = law.domain_upper();
    let beta_grid = sample_grid(params.gamma / c_s, upper);
    let x_grid = sample_grid(1.0, upper);

    let defect = continuity_defect(|b| law.g(b), |b| law.g_prime(b), &beta_grid)
        .max(continuity_defect(|x| law.h(x), |x| law.h_prime(x), &x_grid));
    let a1_margin = JUMP_TOLERANCE - defect;

    let h: Vec<f64> = x_grid.iter().map(|&x| law.h(x)).collect();
    let h_positive = h.iter().copied().fold(f64::INFINITY, f64::min);
    let h_drop = h
        .windows(2)
        .map(|w| (w[0] - w[1]) / w[0].abs().max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);
    let a2_margin = h_positive.min(h_drop);

    let g: Vec<f64> = beta_grid.iter().map(|&b| law.g(b)).collect();
    let g_nonneg = g.iter().copied().fold(f64::INFINITY, f64::min);
    let g_rise = g
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[1].abs().max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);

    let a4_margin = a4_slack(law, params.gamma, c_s);
    AssumptionReport {
        a1: a1_margin > 0.0,
        a2: a2_margin > 0.0,
        a3: g_nonneg >= 0.0 && g_rise > 0.0,
        a4: a4_margin > 0.0,
        margins: AssumptionMargins {
            a1: a1_margin,
            a2: a2_margin,
            a3: if g_nonneg < 0.0 { g_nonneg } else { g_rise },
            a4: a4_margin,
        },
    }
}

/// Roots of `λ² + a1 λ + a0 = 0`.
pub fn quadratic_roots(a1: f64, a0: f64) -> [Eigenvalue; 2] {
    let disc = a1 * a1 - 4.0 * a0;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // avoid cancellation in the smaller root
        let q = -0.5 * (a1 + a1.signum() * sq);
        if q == 0.0 {
            return [Eigenvalue::real(0.0), Eigenvalue::real(-a1)];
        }
        let (r1, r2) = (q, a0 / q);
        let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
        [Eigenvalue::real(hi), Eigenvalue::real(lo)]
    } else {
        let re = -0.5 * a1;
        let im = 0.5 * (-disc).sqrt();
        [Eigenvalue { re, im }, Eigenvalue { re, im: -im }]
    }
}

pub fn eigenvalues_2x2(m: &[[f64; 2]; 2]) -> [Eigenvalue; 2] {
    let trace = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    quadratic_roots(-trace, det)
}

/// Analytic Jacobian of the fast subsystem with respect to `(I, β)`.
pub fn fast_jacobian<L: ContactRateLaw + ?Sized>(
    state: &FastState,
    params: &EpidemicParams,
    law: &L,
) -> [[f64; 2]; 2] {
    let x = params.u * state.i;
    [
        [state.c_s * state.beta - params.gamma, state.c_s * state.i],
        [
            params.alpha * params.u * law.h_prime(x),
            -params.alpha * law.g_prime(state.beta),
        ],
    ]
}

/// Disease-free state `(0, g⁻¹(h(0)))`; exists iff `h(0)` is in the image of `g`.
pub fn disease_free_state<L: ContactRateLaw + ?Sized>(
    law: &L,
    params: &EpidemicParams,
    c_s: f64,
) -> Option<SteadyStateInfo> {
    let beta = law.g_inv(law.h(0.0))?;
    // triangular Jacobian: eigenvalues are the diagonal entries
    let eigenvalues = [
        Eigenvalue::real(c_s * beta - params.gamma),
        Eigenvalue::real(-params.alpha * law.g_prime(beta)),
    ];
    Some(SteadyStateInfo {
        kind: SteadyStateKind::DiseaseFree,
        i: 0.0,
        beta,
        eigenvalues,
        classification: Stability::from_eigenvalues(&eigenvalues),
    })
}

/// Endemic state `(h⁻¹(g(γ/c_s))/u, γ/c_s)`, present only when A4 holds.
pub fn endemic_state<L: ContactRateLaw + ?Sized>(
    law: &L,
    params: &EpidemicParams,
    c_s: f64,
) -> Option<SteadyStateInfo> {
    if a4_slack(law, params.gamma, c_s) <= 0.0 {
        return None;
    }
    let beta = params.gamma / c_s;
    let x = law.h_inv(law.g(beta))?;
    let i = x / params.u;
    // characteristic polynomial λ² + α g'(β_e) λ - c_s I_e α d/dI[h(uI)] = 0
    let a1 = params.alpha * law.g_prime(beta);
    let a0 = -c_s * i * params.alpha * params.u * law.h_prime(x);
    let eigenvalues = quadratic_roots(a1, a0);
    Some(SteadyStateInfo {
        kind: SteadyStateKind::Endemic,
        i,
        beta,
        eigenvalues,
        classification: Stability::from_eigenvalues(&eigenvalues),
    })
}

/// Slowest local decay rate `min(α, γ, |Re λ|)` of the endemic state.
pub fn slowest_rate<L: ContactRateLaw + ?Sized>(law: &L, params: &EpidemicParams, c_s: f64) -> f64 {
    let base = params.alpha.min(params.gamma);
    match endemic_state(law, params, c_s) {
        Some(e) => e
            .eigenvalues
            .iter()
            .map(|l| l.re.abs())
            .fold(base, f64::min),
        None => base,
    }
}
