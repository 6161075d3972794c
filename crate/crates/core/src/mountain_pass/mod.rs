//! Ray maximisation, the thresholds `c_P` and `c_A`, mountain-pass geometry, a path-based
//! solver for approximate critical points, and Palais–Smale diagnostics.

pub mod geometry;
pub mod ps;
pub mod solver;
pub mod threshold;
pub mod tmax;

pub use geometry::{random_direction, verify_geometry, EscapePoint, GeometryReport, SphereSample};
pub use ps::{ps_diagnostics, PsEntry, PsReport};
pub use solver::{endpoint_scale, mountain_pass_solve, LogEntry, PathState, SolveOutcome, SolverOptions};
pub use threshold::{
    build_test_function, certify_ca_below_cp, check_cutoff, lambda_for, magnetic_radius,
    pure_critical_run, sigma_window, threshold_cp, CertifyOptions, EpsilonEvidence, LambdaChoice,
    LambdaPolicy, PureCriticalReport, ThresholdReport, C_SMALL,
};
pub use tmax::{audit_ray, fit_ray, fit_tmax, RayProfile, TMaxResult, ROOT_TOL, T_MAX, T_MIN};
