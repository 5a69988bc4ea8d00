//! Regulated SIR epidemics with adaptive contact-rate feedback.
//!
//! The contact rate `β` relaxes toward a target that falls as infectives
//! rise, `dβ/dt = -α (g(β) - h(u I))`. For large populations the
//! susceptibles drift slowly and the infectives settle onto a
//! quasi-steady state (QSS) of the two-dimensional fast subsystem. This crate
//! integrates the full, fast and reduced systems, computes and classifies the
//! steady states, checks the control properties of the feedback (global
//! stability, adaptation, fold-change detection, QSS assignment) and fits the
//! normalized model to daily-incidence data.

// NaN must fail validation, hence `!(x > 0.0)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod fitting;
pub mod solver;

pub use dynamics::{ContactRateLaw, EpidemicParams, FastState, FullState, LogFastState, MonodLaw};
pub use error::{Error, Result};
pub use solver::{integrate, sample_at, sample_daily, IntegratorConfig, Method, Trajectory};
