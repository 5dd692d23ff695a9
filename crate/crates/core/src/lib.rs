//! Exit-time moments of Brownian motion on rotationally symmetric model
//! manifolds, Dirichlet eigenvalue bounds on spherical caps, finiteness
//! criteria for submanifolds of cylinders, cones and wedges, and a Monte Carlo
//! oracle for the radial diffusion.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod error;
pub mod mc;
pub mod moments;
pub mod quadrature;
pub mod spectral;
pub mod table;
pub mod verify;
pub mod warping;

pub use error::{Error, Result};
pub use moments::{
    exit_moment, mean_exit_time, moment_table, theorem1_bound, tower_bound, BoundSpec, Method,
    ModelBall, MomentTable,
};
pub use warping::{solve_warping, ClosedForm, CurvatureProfile, WarpingFunction};
pub use spectral::{
    barta_lower_bound, cap_eigenvalue_shooting, compare_caps, cone_finite_met, warped_cone_condition,
    warped_cone_supersolution, CapComparison, CapSpec, ConeWarp, EigenEstimate, EigenKind, WarpedConeSpec,
    WarpedConeVerdict,
};
pub use criteria::{
    check_cone, check_theorem1, check_theorem2, check_wedge, run_batch, Comparison, CriterionCase,
    CriterionReport, CylinderCase, WedgeCase,
};
pub use mc::{
    convergence_sweep, monte_carlo_table, simulate_exit, MomentEstimate, SimConfig, SimResult,
};
pub use verify::{run_verification, VerifyCheck, VerifyOptions};
