//! Eulerian and Lagrangian integration of the model family.

mod integrator;
mod model;
mod rhs;

pub use integrator::{
    cross_validate, convergence_study, fit_order, tail_ratio, BlowupTrigger, ConvergenceReport, DiagnosticRow,
    EulerianState, FlowState, LagrangianState, OrderEstimate, Solver, Termination, Trajectory, DRIFT_TOL,
};
pub use model::{
    initial_velocity, Formulation, Inertia, ModeSpec, ModelParams, SolverConfig, DEFAULT_AMPLITUDE_CAP,
    DEFAULT_BLOWUP_SUP_UX, DEFAULT_BLOWUP_TAIL,
};
pub use rhs::{
    eulerian_rhs, generalized_omega_rhs, generalized_velocity, omega_rhs, spray, spray_at_identity,
    BRACKET_MEAN_RTOL, OMEGA_MEAN_TOL,
};
