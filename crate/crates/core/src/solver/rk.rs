use super::trajectory::{IntegratorConfig, Method, Trajectory, TrajectoryMeta};
use crate::{Error, Result};

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b*: fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_HALVINGS: u32 = 30;

#[inline]
fn axpy<const N: usize>(x: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *x;
    for (w, k) in terms {
        for j in 0..N {
            out[j] += h * w * k[j];
        }
    }
    out
}

fn eval<const N: usize, F>(rhs: &mut F, t: f64, x: &[f64; N]) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let d = rhs(t, x)?;
    if d.iter().all(|v| v.is_finite()) {
        Ok(d)
    } else {
        Err(Error::NonFiniteRhs { t })
    }
}

enum Positivity {
    Ok,
    Clamped,
    Violated,
}

fn enforce_floor<const N: usize>(x: &mut [f64; N], floor: Option<f64>, atol: f64) -> Positivity {
    let Some(floor) = floor else {
        return Positivity::Ok;
    };
    let mut clamped = false;
    for v in x.iter_mut() {
        if *v < floor {
            if *v < floor - atol {
                return Positivity::Violated;
            }
            *v = floor;
            clamped = true;
        }
    }
    if clamped {
        Positivity::Clamped
    } else {
        Positivity::Ok
    }
}

/// Integrates `dx/dt = rhs(t, x)` over `t_span`.
///
/// With [`Method::Rk45`] the samples are the accepted steps; with
/// [`Method::Rk4`] they are the uniform grid `t0 + k dt` (the last step is
/// shortened to land on `t1`). Components that drop below the positivity
/// floor by less than `atol` are clamped; larger violations reject the step
/// and halve it.
pub fn integrate<const N: usize, F>(
    mut rhs: F,
    x0: [f64; N],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    cfg.validate()?;
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::InvalidParameter(format!(
            "time span must satisfy t0 <= t1, got [{t0}, {t1}]"
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "initial state must be finite: {x0:?}"
        )));
    }
    let k0 = eval(&mut rhs, t0, &x0)?;
    let meta = TrajectoryMeta::from(cfg);
    if t1 == t0 {
        return Ok(Trajectory::from_parts_unchecked(
            vec![t0],
            vec![x0],
            vec![k0],
            meta,
        ));
    }
    match cfg.method {
        Method::Rk45 => dopri5(&mut rhs, x0, k0, t0, t1, cfg, meta),
        Method::Rk4 => rk4_fixed(&mut rhs, x0, k0, t0, t1, cfg, meta),
    }
}

fn dopri5<const N: usize, F>(
    rhs: &mut F,
    x0: [f64; N],
    k0: [f64; N],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    meta: TrajectoryMeta,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut times = vec![t0];
    let mut states = vec![x0];
    let mut derivs = vec![k0];

    let (mut t, mut x, mut k1) = (t0, x0, k0);
    let mut h = cfg.dt.min(t1 - t0);
    let mut steps = 0usize;
    let mut last_rejected = false;

    while t < t1 {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::Divergence {
                t,
                steps: steps - 1,
                state: x.to_vec(),
            });
        }
        if h <= 1e-13 * t.abs().max(1.0) {
            return Err(Error::Divergence {
                t,
                steps,
                state: x.to_vec(),
            });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }

        let k2 = eval(rhs, t + C2 * h, &axpy(&x, h, &[(A21, &k1)]))?;
        let k3 = eval(rhs, t + C3 * h, &axpy(&x, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = eval(
            rhs,
            t + C4 * h,
            &axpy(&x, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        )?;
        let k5 = eval(
            rhs,
            t + C5 * h,
            &axpy(&x, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = eval(
            rhs,
            t + h,
            &axpy(
                &x,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        )?;
        let mut x_new = axpy(
            &x,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let t_new = if last { t1 } else { t + h };
        let k7 = eval(rhs, t_new, &x_new)?;

        let mut err = 0.0_f64;
        for j in 0..N {
            let e =
                h * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j] + E6 * k6[j] + E7 * k7[j]);
            let scale = cfg.atol + cfg.rtol * x[j].abs().max(x_new[j].abs());
            err = err.max(e.abs() / scale);
        }
        if !err.is_finite() {
            h *= MIN_FACTOR;
            last_rejected = true;
            continue;
        }

        if err > 1.0 {
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
            last_rejected = true;
            continue;
        }

        let k_new = match enforce_floor(&mut x_new, cfg.positivity_floor, cfg.atol) {
            Positivity::Ok => k7,
            Positivity::Clamped => eval(rhs, t_new, &x_new)?,
            Positivity::Violated => {
                h *= 0.5;
                last_rejected = true;
                continue;
            }
        };

        t = t_new;
        x = x_new;
        k1 = k_new;
        times.push(t);
        states.push(x);
        derivs.push(k1);

        let mut factor = if err == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        };
        if last_rejected {
            factor = factor.min(1.0);
        }
        last_rejected = false;
        h *= factor;
    }

    Ok(Trajectory::from_parts_unchecked(
        times, states, derivs, meta,
    ))
}

fn rk4_step<const N: usize, F>(
    rhs: &mut F,
    t: f64,
    x: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let k2 = eval(rhs, t + 0.5 * h, &axpy(x, h, &[(0.5, k1)]))?;
    let k3 = eval(rhs, t + 0.5 * h, &axpy(x, h, &[(0.5, &k2)]))?;
    let k4 = eval(rhs, t + h, &axpy(x, h, &[(1.0, &k3)]))?;
    Ok(axpy(
        x,
        h,
        &[
            (1.0 / 6.0, k1),
            (1.0 / 3.0, &k2),
            (1.0 / 3.0, &k3),
            (1.0 / 6.0, &k4),
        ],
    ))
}

fn rk4_fixed<const N: usize, F>(
    rhs: &mut F,
    x0: [f64; N],
    k0: [f64; N],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    meta: TrajectoryMeta,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let span = t1 - t0;
    let n = ((span / cfg.dt) - 1e-9).ceil().max(1.0) as usize;
    if n > cfg.max_steps {
        return Err(Error::Divergence {
            t: t0,
            steps: 0,
            state: x0.to_vec(),
        });
    }
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut derivs = Vec::with_capacity(n + 1);
    times.push(t0);
    states.push(x0);
    derivs.push(k0);

    let (mut x, mut k1) = (x0, k0);
    for step in 1..=n {
        let t = times[step - 1];
        let t_next = if step == n {
            t1
        } else {
            t0 + step as f64 * cfg.dt
        };
        let h = t_next - t;

        let mut x_new = rk4_step(rhs, t, &x, &k1, h)?;
        let mut status = enforce_floor(&mut x_new, cfg.positivity_floor, cfg.atol);
        // on a violation, retry the interval with 2^m substeps
        let mut m = 0;
        while matches!(status, Positivity::Violated) {
            m += 1;
            if m > MAX_HALVINGS {
                return Err(Error::Divergence {
                    t,
                    steps: step,
                    state: x.to_vec(),
                });
            }
            let sub = 1usize << m;
            let hs = h / sub as f64;
            let (mut ts, mut xs, mut ks) = (t, x, k1);
            status = Positivity::Ok;
            for _ in 0..sub {
                xs = rk4_step(rhs, ts, &xs, &ks, hs)?;
                ts += hs;
                match enforce_floor(&mut xs, cfg.positivity_floor, cfg.atol) {
                    Positivity::Violated => {
                        status = Positivity::Violated;
                        break;
                    }
                    _ => ks = eval(rhs, ts, &xs)?,
                }
            }
            x_new = xs;
        }

        x = x_new;
        k1 = eval(rhs, t_next, &x)?;
        times.push(t_next);
        states.push(x);
        derivs.push(k1);
    }
    Ok(Trajectory::from_parts_unchecked(
        times, states, derivs, meta,
    ))
}
