//! Nonlocal LWR traffic flow with a leading-vehicle control.
//!
//! * [`model`]: speed laws, look-ahead kernels and their cell weights.
//! * [`macro_solver`]: upwind finite-volume scheme on a truncated grid.
//! * [`micro_solver`]: follow-the-leader particle counterpart.
//! * [`diagnostics`]: moving-window Lyapunov functionals, the exponential
//!   decay bound and the audits run on every simulation.
//! * [`scenario`] / [`config`]: scenario description, presets and file format.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod macro_solver;
pub mod micro_solver;
pub mod model;
pub mod quadrature;
pub mod scenario;

pub use config::{load_config, parse_config, to_config_text};
pub use diagnostics::{
    check_mass, check_max_principle, exp_bound, identity_residuals, lyapunov_density,
    lyapunov_velocity, nonlocal_argument_r, window, DiagnosticsRecord, DiagnosticsSeries,
    WindowParams,
};
pub use error::{Assumption, Error, Result};
pub use macro_solver::{
    cfl_dt, godunov_step, nonlocal_velocities, run_macro, GridSpec, MacroRun, MacroSolver,
    MacroState, Snapshot,
};
pub use micro_solver::{
    micro_init, micro_lyapunov, micro_step, micro_velocities, run_micro, MicroRun, MicroState,
};
pub use model::{
    kernel_weights, validate_kernel, Kernel, KernelKind, VelocityKind, VelocityModel, WeightTable,
};
pub use scenario::{InitialProfile, ScenarioConfig, SolverKind, PRESETS};
