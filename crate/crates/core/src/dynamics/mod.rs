//! Model equations: the full regulated SIR system, its fast subsystem (in
//! linear and log coordinates), the reduced slow equation, and the Monod
//! closed forms.

pub mod law;
pub mod model;
pub mod monod;

pub use law::{
    a4_holds, a4_slack, endemic_scaled_infectives, ContactRateLaw, FnLaw, ImageBounds, MonodLaw,
};
pub use model::{
    contact_rate_derivative, measured_output, r0, rhs_fast, rhs_full, rhs_log_fast, rhs_slow,
    EpidemicParams, FastDerivative, FastState, FullDerivative, FullState, LogFastDerivative,
    LogFastState,
};
pub use monod::{
    monod_closed_form_infectives, monod_closed_form_susceptibles, monod_infectives_prefactor_gap,
    monod_slow_rate, monod_threshold,
};
