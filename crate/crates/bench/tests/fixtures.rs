use regsir_bench::{fit_case, scenario, C_S};
use regsir_core::analysis::endemic_state;
use regsir_core::fitting::simulate_fit_output;

#[test]
fn scenario_has_an_endemic_state() {
    let (params, law) = scenario();
    let e = endemic_state(&law, &params, C_S).expect("endemic state");
    assert!((e.i - 4267.138461538462).abs() < 1e-6);
}

#[test]
fn fit_case_produces_a_finite_curve() {
    let (p, init, s_tilde) = fit_case();
    let y = simulate_fit_output(&p, &init, s_tilde, 200).unwrap();
    assert!(y.iter().all(|v| v.is_finite() && *v >= 0.0));
}
