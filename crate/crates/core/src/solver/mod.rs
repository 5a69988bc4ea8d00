//! Explicit Runge–Kutta integration shared by every simulation.

mod interp;
mod rk;
mod trajectory;

pub use interp::{sample_at, sample_daily};
pub use rk::integrate;
pub use trajectory::{IntegratorConfig, Method, Trajectory, TrajectoryMeta};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;
    use approx::assert_relative_eq;

    fn decay(_t: f64, x: &[f64; 1]) -> crate::Result<[f64; 1]> {
        Ok([-x[0]])
    }

    #[test]
    fn exponential_decay_rk45() {
        let cfg = IntegratorConfig::rk45(1e-9, 1e-12);
        let traj = integrate(decay, [1.0], (0.0, 1.0), &cfg).unwrap();
        assert_eq!(traj.t_end(), 1.0);
        assert!((traj.last_state()[0] - (-1.0f64).exp()).abs() < 1e-8);
        assert!(traj.times().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn constant_field_gives_constant_trajectory() {
        for cfg in [IntegratorConfig::default(), IntegratorConfig::rk4(0.3)] {
            let traj = integrate(
                |_, _: &[f64; 2]| Ok([0.0, 0.0]),
                [2.0, -1.0],
                (0.0, 5.0),
                &cfg.with_floor(None),
            )
            .unwrap();
            assert!(traj.states().iter().all(|x| *x == [2.0, -1.0]));
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        let err = |dt: f64| {
            let traj = integrate(decay, [1.0], (0.0, 2.0), &IntegratorConfig::rk4(dt)).unwrap();
            (traj.last_state()[0] - (-2.0f64).exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((8.0..=32.0).contains(&ratio), "ratio {ratio}");
        let traj = integrate(decay, [1.0], (0.0, 1.0), &IntegratorConfig::rk4(0.3)).unwrap();
        assert_eq!(traj.times(), &[0.0, 0.3, 0.6, 0.8999999999999999, 1.0][..]);
    }

    #[test]
    fn time_span_and_config_are_checked() {
        let cfg = IntegratorConfig::default();
        assert!(integrate(decay, [1.0], (1.0, 0.0), &cfg).is_err());
        assert!(integrate(decay, [f64::NAN], (0.0, 1.0), &cfg).is_err());
        let bad = IntegratorConfig { rtol: 0.0, ..cfg };
        assert!(integrate(decay, [1.0], (0.0, 1.0), &bad).is_err());
        let single = integrate(decay, [3.0], (2.0, 2.0), &cfg).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.last_state(), [3.0]);
    }

    #[test]
    fn nan_from_rhs_is_an_evaluation_error() {
        let err = integrate(
            |t, _: &[f64; 1]| Ok([if t > 0.5 { f64::NAN } else { 1.0 }]),
            [0.0],
            (0.0, 1.0),
            &IntegratorConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFiniteRhs { .. }));
    }

    #[test]
    fn step_cap_reports_divergence_with_state() {
        let cfg = IntegratorConfig::rk45(1e-10, 1e-12).with_max_steps(5);
        let err = integrate(decay, [1.0], (0.0, 100.0), &cfg).unwrap_err();
        match err {
            Error::Divergence { state, steps, .. } => {
                assert_eq!(steps, 5);
                assert_eq!(state.len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
        // finite-time blow-up
        let err = integrate(
            |_, x: &[f64; 1]| Ok([x[0] * x[0]]),
            [1.0],
            (0.0, 2.0),
            &IntegratorConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::Divergence { .. } | Error::NonFiniteRhs { .. }
        ));
    }

    #[test]
    fn positivity_floor() {
        let cfg = IntegratorConfig::rk45(1e-6, 1e-9);
        // fast decay toward zero never dips below the floor
        let traj = integrate(
            |_, x: &[f64; 1]| Ok([-3.0 * x[0]]),
            [1.0],
            (0.0, 40.0),
            &cfg,
        )
        .unwrap();
        assert!(traj.states().iter().all(|x| x[0] >= 0.0));
        // a field that genuinely leaves the orthant is not masked by clamping
        let err = integrate(
            |_, x: &[f64; 1]| Ok([-5.0 * (x[0] + 1.0)]),
            [1.0],
            (0.0, 3.0),
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
        let err = integrate(
            |_, x: &[f64; 1]| Ok([-5.0 * (x[0] + 1.0)]),
            [1.0],
            (0.0, 3.0),
            &IntegratorConfig::rk4(0.1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn daily_sampling_of_uniform_grid_is_identity() {
        let traj = integrate(decay, [1.0], (0.0, 6.0), &IntegratorConfig::rk4(1.0)).unwrap();
        let daily = sample_daily(&traj).unwrap();
        assert_eq!(daily.times(), traj.times());
        assert_eq!(daily.states(), traj.states());
    }

    #[test]
    fn daily_sampling_is_exact_for_linear_state() {
        let traj = integrate(
            |_, _: &[f64; 1]| Ok([0.75]),
            [2.0],
            (0.3, 9.7),
            &IntegratorConfig::rk45(1e-9, 1e-12),
        )
        .unwrap();
        let daily = sample_daily(&traj).unwrap();
        assert_eq!(daily.times().first(), Some(&1.0));
        assert_eq!(daily.times().last(), Some(&9.0));
        for (t, x) in daily.iter() {
            assert_relative_eq!(x[0], 2.0 + 0.75 * (t - 0.3), max_relative = 1e-13);
        }
    }

    #[test]
    fn daily_sampling_of_sine() {
        let traj = integrate(
            |t, _: &[f64; 1]| Ok([t.cos()]),
            [0.0],
            (0.0, 20.0),
            &IntegratorConfig::rk4(0.1).with_floor(None),
        )
        .unwrap();
        let daily = sample_daily(&traj).unwrap();
        assert_eq!(daily.len(), 21);
        for (t, x) in daily.iter() {
            assert!((x[0] - t.sin()).abs() < 1e-6, "t = {t}");
        }
        assert!(sample_at(&traj, &[20.5]).is_err());
    }

    #[test]
    fn integration_is_deterministic() {
        let cfg = IntegratorConfig::default();
        let f = |t: f64, x: &[f64; 2]| Ok([x[1], -x[0] - 0.1 * x[1] + t.sin()]);
        let a = integrate(f, [1.0, 0.0], (0.0, 50.0), &cfg.with_floor(None)).unwrap();
        let b = integrate(f, [1.0, 0.0], (0.0, 50.0), &cfg.with_floor(None)).unwrap();
        assert_eq!(a, b);
    }
}
