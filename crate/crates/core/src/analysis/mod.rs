//! Steady states and their stability, the Lyapunov certificate, the control
//! experiments, the singular-perturbation check and identifiability.

pub mod experiments;
pub mod identifiability;
pub mod lyapunov;
pub mod steady;
pub mod sweep;
pub mod tikhonov;

pub use experiments::{
    adaptation_experiment, assign_u, experiment_config, fcd_experiment, settling_horizon,
    simulate_fast, AdaptationReport, FcdReport, UStep, SETTLING_BAND,
};
pub use identifiability::{
    identifiability_rank, identifiability_rank_with_c_tilde, IdentifiabilityReport, RANK_THRESHOLD,
};
pub use lyapunov::{lyapunov, LyapunovFunction, LyapunovSample};
pub use steady::{
    check_assumptions, disease_free_state, eigenvalues_2x2, endemic_state, fast_jacobian,
    quadratic_roots, slowest_rate, AssumptionMargins, AssumptionReport, Eigenvalue, Stability,
    SteadyStateInfo, SteadyStateKind, CLASSIFICATION_MARGIN,
};
pub use sweep::{population_sweep, run_population, SweepCase, SweepSettings};
pub use tikhonov::{boundary_layer_width, tikhonov_sweep, TikhonovError, TikhonovInit};
