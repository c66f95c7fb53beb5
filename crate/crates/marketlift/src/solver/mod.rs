//! Solver backends behind a common interface.
//!
//! [`milp`] drives HiGHS for models with integrality marks; [`conic`]
//! drives Clarabel for LPs, SOCPs, and SDPs and is the only source of
//! duals. Both return [`crate::model::SolveResult`] with duals normalized
//! to dV*/d(rhs), independent of backend sign conventions.

pub mod conic;
pub mod milp;

use crate::error::Result;
use crate::model::{LiftedModel, SolveResult, SolverConfig};

/// Solve honoring integrality marks (HiGHS) when present, conic otherwise.
pub fn solve(m: &LiftedModel, cfg: &SolverConfig) -> Result<SolveResult> {
    if !m.integers.is_empty() {
        milp::solve_milp(m, cfg)
    } else {
        conic::solve_conic(m, cfg)
    }
}

/// Solve the continuous relaxation (integrality marks ignored).
pub fn solve_relaxed(m: &LiftedModel, cfg: &SolverConfig) -> Result<SolveResult> {
    conic::solve_conic(m, cfg)
}
