//! Shared benchmark fixtures.

use regsir_core::fitting::{FitInit, NormalizedParams};
use regsir_core::{EpidemicParams, MonodLaw};

/// Composite rate `c S(0)` of the 80-million-person scenario.
pub const C_S: f64 = 17.5392;

pub fn scenario() -> (EpidemicParams, MonodLaw) {
    let params =
        EpidemicParams::new(C_S / 80e6, 0.091, 0.0679, 0.0008, 1e-6).expect("valid parameters");
    (params, MonodLaw::new(0.0229).expect("valid K"))
}

/// Normalized-model parameters, initial state and `S̃` of a New-York-sized fit.
pub fn fit_case() -> (NormalizedParams, FitInit, f64) {
    (
        NormalizedParams {
            gamma: 0.071,
            alpha: 0.0575,
            k: 0.0104,
            u: 0.8e-4,
        },
        FitInit {
            i0: 5.0,
            beta_hat0: 0.02,
        },
        19.45,
    )
}
