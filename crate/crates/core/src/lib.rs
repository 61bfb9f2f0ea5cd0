//! Feasibility of linearly constrained quadratic programs.
//!
//! The constraint set `{u : S(P)Aᵀu <= S(P)B}` of a QP is nonempty exactly
//! when the linear program `max -Bᵀλ` over the sign-restricted nullspace of
//! `A` is bounded. [`check_feasibility`] decides that with a dense simplex and
//! returns a Farkas certificate when it is not. [`phase1_check`] is the
//! classical elastic Phase-1 LP for comparison, [`solve_qp`] is an exact
//! enumeration oracle for small instances, and [`greedy_maxfs`] /
//! [`heuristic_maxfs`] search configurations of disregarded soft constraints.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod feasibility;
pub mod instance;
pub mod linalg;
pub mod problem_file;
pub mod qp_oracle;
pub mod scenario;
pub mod search;
pub mod simplex;

pub use error::{Error, Result};
pub use feasibility::{
    build_dual_lp, certificate_defects, check_feasibility, phase1_check, solve_cone_lp,
    validate_hard, verdicts_agree, Certificate, DualCheck, FeasibilityStatus, FeasibilityVerdict,
    Phase1Check, INFEASIBILITY_THRESHOLD,
};
pub use instance::{Configuration, ConstraintKind, QpInstance};
pub use linalg::{cholesky_spd, solve_linear, DenseMatrix, DenseVector};
pub use problem_file::{parse_problem, ProblemFile};
pub use qp_oracle::{
    dual_value, flip_equals_delete, solve_qp, unconstrained_minimizer, QpOutcome, QpSolution,
};
pub use scenario::{cbf_scenario, random_instance, GridSpec, TimedInstance};
pub use search::{greedy_maxfs, heuristic_maxfs, level, ConfigGraph, ConfigSearchResult};
pub use simplex::{presolve_rows, solve_standard_lp, LpOutcome, LpStatus, StandardLp};
