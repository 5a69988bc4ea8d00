use super::trajectory::Trajectory;
use crate::{Error, Result};

/// Cubic Hermite interpolation of the trajectory (states and derivatives)
/// at the requested times, which must lie within its span.
pub fn sample_at<const N: usize>(traj: &Trajectory<N>, at: &[f64]) -> Result<Trajectory<N>> {
    let times = traj.times();
    let (t_lo, t_hi) = (traj.t_start(), traj.t_end());
    let slack = 1e-12 * t_lo.abs().max(t_hi.abs()).max(1.0);
    let mut out_states = Vec::with_capacity(at.len());
    let mut out_derivs = Vec::with_capacity(at.len());
    for &t in at {
        if !(t >= t_lo - slack && t <= t_hi + slack) {
            return Err(Error::Domain(format!(
                "sample time {t} outside trajectory span [{t_lo}, {t_hi}]"
            )));
        }
        let (x, d) = hermite(traj, times, t.clamp(t_lo, t_hi));
        out_states.push(x);
        out_derivs.push(d);
    }
    Trajectory::new(at.to_vec(), out_states, out_derivs, traj.meta().clone())
}

/// Values at every integer day inside the trajectory's span.
pub fn sample_daily<const N: usize>(traj: &Trajectory<N>) -> Result<Trajectory<N>> {
    let first = traj.t_start().ceil() as i64;
    let last = traj.t_end().floor() as i64;
    if last < first {
        return Err(Error::Domain(format!(
            "trajectory [{}, {}] contains no integer day",
            traj.t_start(),
            traj.t_end()
        )));
    }
    let days: Vec<f64> = (first..=last).map(|d| d as f64).collect();
    sample_at(traj, &days)
}

fn hermite<const N: usize>(traj: &Trajectory<N>, times: &[f64], t: f64) -> ([f64; N], [f64; N]) {
    let states = traj.states();
    let derivs = traj.derivatives();
    // index of the first sample >= t
    let j = times.partition_point(|&s| s < t);
    if j < times.len() && times[j] == t {
        return (states[j], derivs[j]);
    }
    let (a, b) = (j - 1, j);
    let h = times[b] - times[a];
    let s = (t - times[a]) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    // derivatives of the basis with respect to t
    let d00 = (6.0 * s2 - 6.0 * s) / h;
    let d10 = 3.0 * s2 - 4.0 * s + 1.0;
    let d01 = (-6.0 * s2 + 6.0 * s) / h;
    let d11 = 3.0 * s2 - 2.0 * s;
    let mut x = [0.0; N];
    let mut d = [0.0; N];
    for k in 0..N {
        let (xa, xb, da, db) = (states[a][k], states[b][k], derivs[a][k], derivs[b][k]);
        x[k] = h00 * xa + h10 * h * da + h01 * xb + h11 * h * db;
        d[k] = d00 * xa + d10 * da + d01 * xb + d11 * db;
    }
    (x, d)
}
