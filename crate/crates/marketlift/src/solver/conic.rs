//! Clarabel backend for LP / SOCP / SDP models, including the DNN lifting.
//!
//! Variable layout: scalar variables first, then one column per lifted
//! cell (block cells, capped cells, referenced cells). Bordered PSD blocks
//! are emitted as svec-scaled PSD-triangle cones with the constant 1 pinned
//! at position (0,0) through the b vector.
//!
//! Dual normalization: Clarabel solves min q'x s.t. Ax + s = b, s in K and
//! reports z with dV*/db = -z. Rows are recorded so that the returned dual
//! of a row equals dV*/d(rhs as written): -z for Eq and Le rows, +z for Ge
//! rows (which are emitted negated). This convention is pinned by a
//! finite-difference property test.

use crate::error::{Error, Result};
use crate::model::{
    ConstraintId, LiftedModel, Sense, SolveResult, SolveStatus, SolverConfig, VarRef,
};
use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use std::collections::BTreeMap;
use std::time::Instant;

const SQRT2: f64 = std::f64::consts::SQRT_2;

struct RowBuilder {
    triplets: Vec<(usize, usize, f64)>,
    b: Vec<f64>,
    /// Per row: constraint id and the sign mapping z to dV/d(rhs).
    dual_tags: Vec<Option<(ConstraintId, f64)>>,
}

impl RowBuilder {
    fn new() -> Self {
        RowBuilder {
            triplets: Vec::new(),
            b: Vec::new(),
            dual_tags: Vec::new(),
        }
    }

    fn push_row(
        &mut self,
        entries: impl IntoIterator<Item = (usize, f64)>,
        rhs: f64,
        tag: Option<(ConstraintId, f64)>,
    ) {
        let r = self.b.len();
        for (col, val) in entries {
            if val != 0.0 {
                self.triplets.push((r, col, val));
            }
        }
        self.b.push(rhs);
        self.dual_tags.push(tag);
    }

    fn to_csc(&self, ncols: usize) -> CscMatrix<f64> {
        let nrows = self.b.len();
        let mut per_col: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); ncols];
        for &(r, c, v) in &self.triplets {
            *per_col[c].entry(r).or_insert(0.0) += v;
        }
        let mut colptr = Vec::with_capacity(ncols + 1);
        let mut rowval = Vec::new();
        let mut nzval = Vec::new();
        colptr.push(0);
        for col in &per_col {
            for (&r, &v) in col {
                rowval.push(r);
                nzval.push(v);
            }
            colptr.push(rowval.len());
        }
        CscMatrix::new(nrows, ncols, colptr, rowval, nzval)
    }
}

pub fn solve_conic(m: &LiftedModel, cfg: &SolverConfig) -> Result<SolveResult> {
    m.validate()?;
    let n = m.vars.len();
    let cells: Vec<(usize, usize)> = m.lifted_cells()?.into_iter().collect();
    let cell_col: BTreeMap<(usize, usize), usize> = cells
        .iter()
        .enumerate()
        .map(|(k, &c)| (c, n + k))
        .collect();
    let ncols = n + cells.len();
    let col_of = |v: VarRef| -> usize {
        match v {
            VarRef::Scalar(i) => i,
            VarRef::Lifted(i, j) => cell_col[&(i, j)],
        }
    };

    let mut rb = RowBuilder::new();
    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();

    // Zero cone: every equality row.
    let mut eq_count = 0;
    for c in m.constraints.iter().filter(|c| c.sense == Sense::Eq) {
        rb.push_row(
            c.coeffs.iter().map(|(v, a)| (col_of(*v), *a)),
            c.rhs.eval(&m.params),
            Some((c.id.clone(), -1.0)),
        );
        eq_count += 1;
    }
    if eq_count > 0 {
        cones.push(SupportedConeT::ZeroConeT(eq_count));
    }

    // Nonnegative cone: Le/Ge rows, sign restrictions, cell caps.
    let nn_start = rb.b.len();
    for c in m.constraints.iter() {
        match c.sense {
            Sense::Eq => {}
            Sense::Le => rb.push_row(
                c.coeffs.iter().map(|(v, a)| (col_of(*v), *a)),
                c.rhs.eval(&m.params),
                Some((c.id.clone(), -1.0)),
            ),
            Sense::Ge => rb.push_row(
                c.coeffs.iter().map(|(v, a)| (col_of(*v), -*a)),
                -c.rhs.eval(&m.params),
                Some((c.id.clone(), 1.0)),
            ),
        }
    }
    for (i, var) in m.vars.iter().enumerate() {
        if !var.free {
            rb.push_row([(i, -1.0)], 0.0, None);
        }
    }
    for &(i, j) in &cells {
        rb.push_row([(cell_col[&(i, j)], -1.0)], 0.0, None);
        if let Some(&cap) = m.cell_caps.get(&(i, j)) {
            rb.push_row(
                [(cell_col[&(i, j)], 1.0)],
                cap,
                Some((ConstraintId::NonnegCell(i, j), -1.0)),
            );
        }
    }
    let nn_count = rb.b.len() - nn_start;
    if nn_count > 0 {
        cones.push(SupportedConeT::NonnegativeConeT(nn_count));
    }

    // Second-order cones: s_0 = bound, s_k = x_k.
    for soc in &m.soc_rows {
        rb.push_row([], soc.bound, None);
        for &i in &soc.terms {
            rb.push_row([(i, -1.0)], 0.0, None);
        }
        cones.push(SupportedConeT::SecondOrderConeT(soc.terms.len() + 1));
    }

    // Bordered PSD blocks: Y = [[1, x'], [x, X]] in svec (column-major
    // upper triangle, off-diagonals scaled by sqrt(2)).
    for block in &m.psd_blocks {
        let dim = block.len() + 1;
        for c in 0..dim {
            for r in 0..=c {
                if r == 0 && c == 0 {
                    rb.push_row([], 1.0, None);
                } else if r == 0 {
                    rb.push_row([(block[c - 1], -SQRT2)], 0.0, None);
                } else if r == c {
                    let cell = VarRef::lifted(block[r - 1], block[r - 1]);
                    rb.push_row([(col_of(cell), -1.0)], 0.0, None);
                } else {
                    let cell = VarRef::lifted(block[r - 1], block[c - 1]);
                    rb.push_row([(col_of(cell), -SQRT2)], 0.0, None);
                }
            }
        }
        cones.push(SupportedConeT::PSDTriangleConeT(dim));
    }

    // Raw PSD blocks over pre-registered scalar cell variables.
    for raw in &m.raw_blocks {
        let mut k = 0;
        for c in 0..raw.dim {
            for r in 0..=c {
                let scale = if r == c { -1.0 } else { -SQRT2 };
                rb.push_row([(raw.cells[k], scale)], 0.0, None);
                k += 1;
            }
        }
        cones.push(SupportedConeT::PSDTriangleConeT(raw.dim));
    }

    let mut q = vec![0.0; ncols];
    for (v, c) in &m.objective {
        q[col_of(*v)] += c;
    }
    let a = rb.to_csc(ncols);
    let p = CscMatrix::zeros((ncols, ncols));
    let settings = DefaultSettings {
        verbose: cfg.verbose,
        max_iter: cfg.max_iter,
        tol_feas: cfg.conic_tol,
        tol_gap_abs: cfg.conic_tol,
        tol_gap_rel: cfg.conic_tol,
        ..DefaultSettings::default()
    };
    let started = Instant::now();
    let mut solver = DefaultSolver::new(&p, &q, &a, &rb.b, &cones, settings)
        .map_err(|e| Error::SolverFailure(format!("clarabel setup: {:?}", e)))?;
    solver.solve();
    let elapsed = started.elapsed().as_secs_f64();
    let sol = &solver.solution;
    let status = match sol.status {
        SolverStatus::Solved => SolveStatus::Optimal,
        SolverStatus::AlmostSolved => {
            log::warn!("clarabel returned AlmostSolved; treating as optimal");
            SolveStatus::Optimal
        }
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            SolveStatus::Infeasible
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
            SolveStatus::Unbounded
        }
        _ => SolveStatus::NumericalTrouble,
    };
    if status != SolveStatus::Optimal {
        return Ok(SolveResult {
            status,
            objective: f64::NAN,
            x: vec![f64::NAN; n],
            lifted: BTreeMap::new(),
            duals: BTreeMap::new(),
            iterations: solver.info.iterations as usize,
            solve_seconds: elapsed,
            rel_gap: None,
        });
    }
    let scale = sol.obj_val.abs().max(sol.obj_val_dual.abs()).max(1.0);
    let rel_gap = (sol.obj_val - sol.obj_val_dual).abs() / scale;
    let x = sol.x[..n].to_vec();
    let lifted: BTreeMap<(usize, usize), f64> = cells
        .iter()
        .map(|&(i, j)| ((i, j), sol.x[cell_col[&(i, j)]]))
        .collect();
    let mut duals = BTreeMap::new();
    for (r, tag) in rb.dual_tags.iter().enumerate() {
        if let Some((id, sign)) = tag {
            duals.insert(id.clone(), sign * sol.z[r]);
        }
    }
    Ok(SolveResult {
        status,
        objective: sol.obj_val + m.obj_offset,
        x,
        lifted,
        duals,
        iterations: solver.info.iterations as usize,
        solve_seconds: elapsed,
        rel_gap: Some(rel_gap),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rhs::RhsPolynomial;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    /// min x s.t. x >= 2: V(b) = b, so the Ge dual must be +1.
    #[test]
    fn ge_dual_is_marginal_value() {
        let mut m = LiftedModel::new();
        let x = m.add_var("x", None);
        m.objective = vec![(VarRef::Scalar(x), 1.0)];
        m.add_row(
            ConstraintId::Row(0),
            vec![(VarRef::Scalar(x), 1.0)],
            Sense::Ge,
            RhsPolynomial::constant(2.0),
        );
        let r = solve_conic(&m, &cfg()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 2.0).abs() < 1e-7);
        assert!((r.dual(&ConstraintId::Row(0)) - 1.0).abs() < 1e-6);
    }

    /// min -x s.t. x <= 3: V(b) = -b, so the Le dual must be -1.
    #[test]
    fn le_dual_is_marginal_value() {
        let mut m = LiftedModel::new();
        let x = m.add_var("x", None);
        m.objective = vec![(VarRef::Scalar(x), -1.0)];
        m.add_row(
            ConstraintId::Row(0),
            vec![(VarRef::Scalar(x), 1.0)],
            Sense::Le,
            RhsPolynomial::constant(3.0),
        );
        let r = solve_conic(&m, &cfg()).unwrap();
        assert!((r.objective + 3.0).abs() < 1e-7);
        assert!((r.dual(&ConstraintId::Row(0)) + 1.0).abs() < 1e-6);
    }

    /// min 2x s.t. x = 5 via equality: dual = dV/db = 2.
    #[test]
    fn eq_dual_is_marginal_value() {
        let mut m = LiftedModel::new();
        let x = m.add_var("x", None);
        m.objective = vec![(VarRef::Scalar(x), 2.0)];
        m.add_row(
            ConstraintId::Row(0),
            vec![(VarRef::Scalar(x), 1.0)],
            Sense::Eq,
            RhsPolynomial::constant(5.0),
        );
        let r = solve_conic(&m, &cfg()).unwrap();
        assert!((r.objective - 10.0).abs() < 1e-6);
        assert!((r.dual(&ConstraintId::Row(0)) - 2.0).abs() < 1e-6);
    }

    /// Bordered 1-variable block forces X >= x^2: min X with x = 1.5
    /// gives X = 2.25.
    #[test]
    fn bordered_block_enforces_square() {
        let mut m = LiftedModel::new();
        let x = m.add_var("x", Some(2.0));
        m.psd_blocks.push(vec![x]);
        m.objective = vec![(VarRef::lifted(x, x), 1.0)];
        m.add_row(
            ConstraintId::Row(0),
            vec![(VarRef::Scalar(x), 1.0)],
            Sense::Eq,
            RhsPolynomial::constant(1.5),
        );
        let r = solve_conic(&m, &cfg()).unwrap();
        assert!((r.lifted[&(x, x)] - 2.25).abs() < 1e-5);
        assert!((r.objective - 2.25).abs() < 1e-5);
    }

    /// SOC: max a s.t. ||(a, b)|| <= 5, b = 4 gives a = 3.
    #[test]
    fn soc_row_binds() {
        let mut m = LiftedModel::new();
        let a = m.add_free_var("a");
        let b = m.add_free_var("b");
        m.objective = vec![(VarRef::Scalar(a), -1.0)];
        m.add_row(
            ConstraintId::Row(0),
            vec![(VarRef::Scalar(b), 1.0)],
            Sense::Eq,
            RhsPolynomial::constant(4.0),
        );
        m.soc_rows.push(crate::model::SocRow {
            id: ConstraintId::Thermal(0, 1, 0),
            terms: vec![a, b],
            bound: 5.0,
        });
        let r = solve_conic(&m, &cfg()).unwrap();
        assert!((r.x[a] - 3.0).abs() < 1e-6);
    }

    /// A demoted (capped) cell with no PSD home obeys 0 <= X <= cap.
    #[test]
    fn capped_cell_without_block() {
        let mut m = LiftedModel::new();
        let a = m.add_var("a", Some(1.0));
        let b = m.add_var("b", Some(1.0));
        m.cell_caps.insert((a, b), 0.5);
        m.objective = vec![(VarRef::lifted(a, b), -1.0)];
        let r = solve_conic(&m, &cfg()).unwrap();
        assert!((r.lifted[&(a, b)] - 0.5).abs() < 1e-7);
    }

    /// Infeasible LP is reported as such.
    #[test]
    fn infeasible_lp() {
        let mut m = LiftedModel::new();
        let x = m.add_var("x", None);
        m.add_row(
            ConstraintId::Row(0),
            vec![(VarRef::Scalar(x), 1.0)],
            Sense::Le,
            RhsPolynomial::constant(-1.0),
        );
        let r = solve_conic(&m, &cfg()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }
}
