//! Run configuration, initial data, the reference case matrix and
//! convergence drivers.

mod config;
mod convergence;
mod initial;
mod presets;
mod run;

pub use config::{RunConfig, DEFAULT_AMPLITUDE};
pub use convergence::{
    convergence_study, observed_order, rayleigh_quotients, spatial_study, temporal_study, ConvergenceReport,
    StudyKind, TemporalSetup,
};
pub use initial::{make_initial_u, InitialCondition};
pub use presets::{
    preset, preset_name, presets, reference_outcome, ReferenceOutcome, Scale, PRESET_K, PRESET_SIGMA,
    REFERENCE_OUTCOMES,
};
pub use run::{
    classify, find_spikes, initial_state, run_case, run_case_with, CaseResult, Pattern, Spike, StepContext,
    ANTIPODAL_COS,
};
