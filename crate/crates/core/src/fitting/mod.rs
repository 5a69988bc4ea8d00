//! Estimation of the normalized model from daily-incidence data.

pub mod data;
pub mod fit;
pub mod model;
pub mod nelder_mead;

pub use data::{load_incidence, moving_average, parse_incidence, IncidenceSeries, SeriesFormat};
pub use fit::{fit, loss_at, Bounds, FitOptions, FitProblem, FitResult, FitTarget, LossSpace};
pub use model::{simulate_fit_output, simulate_normalized, FitInit, NormalizedParams, FIT_DT};
