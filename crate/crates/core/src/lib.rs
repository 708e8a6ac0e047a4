//! Numerical core for a predator–prey system in which the predator occupies
//! an expanding habitat `[g(t), h(t)]` whose fronts move by a Stefan
//! condition, while the prey diffuses on the whole line.
//!
//! The crate provides the closed-form thresholds and long-time limits, a
//! front-tracking solver, a comparison supersolution, steady-state boundary
//! value problems and classification of simulated runs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod grid;
pub mod interp;
pub mod model;
pub mod profile;
pub mod quad;
pub mod solver;
pub mod steady;
pub mod tolerances;
pub mod tridiag;

pub use analysis::{
    build_supersolution, check_domination, classify, estimate_mu_star, verify_limits, MuBracket, Supersolution,
    Verdict, VerdictKind,
};
pub use error::{Error, Result};
pub use grid::{FrontState, LineGrid, StraightGrid};
pub use model::{
    a_priori_bounds, lambda_threshold, limit_iteration, limit_iteration_converged, mu_upper_bound, spreading_limits,
    LimitIterates, ModelParams, Regime,
};
pub use profile::{Profile, SampledProfile};
pub use solver::{
    boundary_flux, simulate, step, Diagnostics, FieldState, FrontSample, NumericsConfig, ResolvedNumerics, Side,
    SimulationResult, Snapshot, Termination,
};
pub use steady::{existence_threshold, ode_upper_v, solve_bvp, LogisticBvp, SteadyProfile};
pub use tolerances::ClassifyTols;
