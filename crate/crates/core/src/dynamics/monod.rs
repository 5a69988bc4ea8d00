//! Closed-form slow dynamics under the Monod law.
//!
//! Above the threshold `S* = γ/(c̃K)` the reduced susceptibles obey the
//! linear equation `dS̃/dτ = γ/u - (c̃K/u) S̃`, so in the original time scale
//! `S̃(t) = S* + (S̃(0) - S*) exp(-c̃Kεt/u)`.

use super::law::MonodLaw;
use super::model::EpidemicParams;
use crate::{Error, Result};

/// Minimum rescaled susceptible population sustaining an endemic state.
pub fn monod_threshold(params: &EpidemicParams, law: &MonodLaw) -> f64 {
    params.gamma / (params.c_tilde() * law.k)
}

/// Decay rate (1/day) of the slow Monod solution.
pub fn monod_slow_rate(params: &EpidemicParams, law: &MonodLaw) -> f64 {
    params.c_tilde() * law.k * params.epsilon / params.u
}

fn check_above_threshold(s0: f64, s_star: f64) -> Result<()> {
    if s0 > s_star {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "closed form needs S̃(0) > S* = {s_star}, got {s0}"
        )))
    }
}

pub fn monod_closed_form_susceptibles(
    t: f64,
    s0: f64,
    params: &EpidemicParams,
    law: &MonodLaw,
) -> Result<f64> {
    let s_star = monod_threshold(params, law);
    check_above_threshold(s0, s_star)?;
    Ok(s_star + (s0 - s_star) * (-monod_slow_rate(params, law) * t).exp())
}

/// Infectives on the slow manifold, `I(t) = I_e(S̃(t))`.
///
/// Substituting the closed-form `S̃(t)` into `I_e(S̃) = (c̃S̃K/γ - 1)/u` gives
/// `(c̃K/(γu)) (S̃(0) - S*) exp(-c̃Kεt/u)`. The gain `c̃K/γ = 1/S*` in front is
/// what makes this agree with the quasi-steady-state relation; see
/// [`monod_infectives_prefactor_gap`].
pub fn monod_closed_form_infectives(
    t: f64,
    s0: f64,
    params: &EpidemicParams,
    law: &MonodLaw,
) -> Result<f64> {
    let s_star = monod_threshold(params, law);
    check_above_threshold(s0, s_star)?;
    Ok((s0 - s_star) / (s_star * params.u) * (-monod_slow_rate(params, law) * t).exp())
}

/// Ratio between the slow-manifold infectives and the shorter expression
/// `(1/u)(S̃(0) - S*) exp(-c̃Kεt/u)`; constant in time and equal to `c̃K/γ`.
pub fn monod_infectives_prefactor_gap(params: &EpidemicParams, law: &MonodLaw) -> f64 {
    1.0 / monod_threshold(params, law)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::law::ContactRateLaw;
    use approx::assert_relative_eq;

    fn setup() -> (EpidemicParams, MonodLaw, f64) {
        // c S(0) = 17.5392 at 80M people, S̃ in millions
        let eps = 1e-6;
        let c = 17.5392 / 80e6;
        let p = EpidemicParams::new(c, 0.091, 0.0679, 0.0008, eps).unwrap();
        (p, MonodLaw::new(0.0229).unwrap(), 80.0)
    }

    #[test]
    fn susceptibles_limits() {
        let (p, law, s0) = setup();
        assert_eq!(
            monod_closed_form_susceptibles(0.0, s0, &p, &law).unwrap(),
            s0
        );
        let s_star = monod_threshold(&p, &law);
        let late = monod_closed_form_susceptibles(1e9, s0, &p, &law).unwrap();
        assert_relative_eq!(late, s_star, max_relative = 1e-12);
        let mut prev = s0;
        for day in 1..400 {
            let s = monod_closed_form_susceptibles(day as f64, s0, &p, &law).unwrap();
            assert!(s < prev);
            prev = s;
        }
    }

    #[test]
    fn below_threshold_is_a_domain_error() {
        let (p, law, _) = setup();
        let s_star = monod_threshold(&p, &law);
        assert!(monod_closed_form_susceptibles(1.0, s_star, &p, &law).is_err());
        assert!(monod_closed_form_infectives(1.0, 0.5 * s_star, &p, &law).is_err());
    }

    #[test]
    fn infectives_follow_the_qss_curve() {
        let (p, law, s0) = setup();
        for t in [0.0, 10.0, 200.0, 5000.0] {
            let s = monod_closed_form_susceptibles(t, s0, &p, &law).unwrap();
            let qss = (p.c_tilde() * s * law.k / p.gamma - 1.0) / p.u;
            let i = monod_closed_form_infectives(t, s0, &p, &law).unwrap();
            assert_relative_eq!(i, qss, max_relative = 1e-9);
        }
        // at t = 0 this is the nominal plateau value
        let i0 = monod_closed_form_infectives(0.0, s0, &p, &law).unwrap();
        assert_relative_eq!(i0, 4267.138_461_538_46, max_relative = 1e-9);
        assert!(monod_closed_form_infectives(1e10, s0, &p, &law).unwrap() < 1e-6);
    }

    #[test]
    fn short_prefactor_differs_by_constant_gain() {
        let (p, law, s0) = setup();
        let gap = monod_infectives_prefactor_gap(&p, &law);
        assert_relative_eq!(gap, p.c_tilde() * law.k / p.gamma, max_relative = 1e-14);
        for t in [0.0, 50.0, 300.0] {
            let s_star = monod_threshold(&p, &law);
            let short = (s0 - s_star) / p.u * (-monod_slow_rate(&p, &law) * t).exp();
            let full = monod_closed_form_infectives(t, s0, &p, &law).unwrap();
            assert_relative_eq!(full / short, gap, max_relative = 1e-12);
        }
        assert!(law.h(0.0) > 0.0);
    }

    #[test]
    fn larger_gain_prolongs_the_epidemic() {
        let (p, law, _) = setup();
        let slower = p.with_u(2.0 * p.u).unwrap();
        assert!(monod_slow_rate(&slower, &law) < monod_slow_rate(&p, &law));
        assert_relative_eq!(
            monod_slow_rate(&slower, &law),
            0.5 * monod_slow_rate(&p, &law),
            max_relative = 1e-14
        );
    }
}
