//! HiGHS backend for mixed-integer linear models.
//!
//! Only scalar rows are supported here; lifted cells, SOC rows, and PSD
//! blocks belong to the conic backend. MILP solves return no duals.

use crate::error::{Error, Result};
use crate::model::{LiftedModel, Sense, SolveResult, SolveStatus, SolverConfig, VarRef};
use highs::{HighsModelStatus, RowProblem};
use std::collections::BTreeMap;
use std::time::Instant;

pub fn solve_milp(m: &LiftedModel, cfg: &SolverConfig) -> Result<SolveResult> {
    m.validate()?;
    if m.has_lifting() || !m.soc_rows.is_empty() || !m.raw_blocks.is_empty() {
        return Err(Error::Unsupported(
            "milp backend cannot handle lifted cells, soc rows, or psd blocks".into(),
        ));
    }
    let n = m.vars.len();
    let mut objective = vec![0.0; n];
    for (v, c) in &m.objective {
        match *v {
            VarRef::Scalar(i) => objective[i] += c,
            VarRef::Lifted(_, _) => unreachable!("validated scalar-only"),
        }
    }

    let build = || -> Result<RowProblem> {
        let mut pb = RowProblem::default();
        let mut cols = Vec::with_capacity(n);
        for (i, var) in m.vars.iter().enumerate() {
            let col = if m.integers.contains(&i) {
                let ub = if m.binaries.contains(&i) { 1.0 } else { f64::INFINITY };
                pb.add_integer_column(objective[i], 0.0..ub)
            } else if var.free {
                pb.add_column(objective[i], f64::NEG_INFINITY..f64::INFINITY)
            } else {
                pb.add_column(objective[i], 0.0..f64::INFINITY)
            };
            cols.push(col);
        }
        for c in &m.constraints {
            let rhs = c.rhs.eval(&m.params);
            let mut factors = Vec::with_capacity(c.coeffs.len());
            for (v, coeff) in &c.coeffs {
                match *v {
                    VarRef::Scalar(i) => factors.push((cols[i], *coeff)),
                    VarRef::Lifted(_, _) => unreachable!(),
                }
            }
            if factors.is_empty() {
                return Err(Error::MalformedModel(format!("empty row {:?}", c.id)));
            }
            match c.sense {
                Sense::Eq => pb.add_row(rhs..=rhs, &factors),
                Sense::Le => pb.add_row(f64::NEG_INFINITY..=rhs, &factors),
                Sense::Ge => pb.add_row(rhs..=f64::INFINITY, &factors),
            }
        }
        Ok(pb)
    };

    let started = Instant::now();
    let mut model = build()?.optimise(highs::Sense::Minimise);
    model.set_option("output_flag", cfg.verbose);
    model.set_option("mip_rel_gap", cfg.milp_rel_gap);
    model.set_option("threads", 1);
    let mut solved = model.solve();
    if solved.status() == HighsModelStatus::Infeasible && !m.integers.is_empty() {
        // HiGHS MIP presolve occasionally declares feasible commitment
        // models infeasible; confirm without presolve before reporting.
        log::warn!("highs reported infeasible; re-solving with presolve off to confirm");
        let mut retry = build()?.optimise(highs::Sense::Minimise);
        retry.set_option("output_flag", cfg.verbose);
        retry.set_option("mip_rel_gap", cfg.milp_rel_gap);
        retry.set_option("threads", 1);
        retry.set_option("presolve", "off");
        solved = retry.solve();
    }
    let elapsed = started.elapsed().as_secs_f64();

    let status = match solved.status() {
        HighsModelStatus::Optimal => SolveStatus::Optimal,
        HighsModelStatus::Infeasible => SolveStatus::Infeasible,
        HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => {
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
            iterations: 0,
            solve_seconds: elapsed,
            rel_gap: None,
        });
    }
    let solution = solved.get_solution();
    let x: Vec<f64> = solution.columns().to_vec();
    let objective = m.obj_offset
        + x.iter()
            .zip(objective_vector(m))
            .map(|(xi, ci)| xi * ci)
            .sum::<f64>();
    Ok(SolveResult {
        status,
        objective,
        x,
        lifted: BTreeMap::new(),
        duals: BTreeMap::new(),
        iterations: 0,
        solve_seconds: elapsed,
            rel_gap: None,
    })
}

fn objective_vector(m: &LiftedModel) -> Vec<f64> {
    let mut out = vec![0.0; m.vars.len()];
    for (v, c) in &m.objective {
        if let VarRef::Scalar(i) = *v {
            out[i] += c;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConstraintId;
    use crate::rhs::RhsPolynomial;

    /// min 3a + 2b s.t. a + b >= 1.5, a binary, b in [0, inf).
    /// Enumeration: a=0 -> b=1.5 cost 3.0; a=1 -> b=0.5 cost 4.0. Optimum 3.0.
    #[test]
    fn small_milp_matches_enumeration() {
        let mut m = LiftedModel::new();
        let a = m.add_binary("a");
        let b = m.add_var("b", None);
        m.objective = vec![(VarRef::Scalar(a), 3.0), (VarRef::Scalar(b), 2.0)];
        m.add_row(
            ConstraintId::Row(0),
            vec![(VarRef::Scalar(a), 1.0), (VarRef::Scalar(b), 1.0)],
            Sense::Ge,
            RhsPolynomial::constant(1.5),
        );
        let r = solve_milp(&m, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 3.0).abs() < 1e-9);
        assert!(r.x[a].abs() < 1e-9);
        assert!((r.x[b] - 1.5).abs() < 1e-9);
    }

    /// Binary forced by an equality to a fractional value is infeasible.
    #[test]
    fn infeasible_detected() {
        let mut m = LiftedModel::new();
        let a = m.add_binary("a");
        m.add_row(
            ConstraintId::Row(0),
            vec![(VarRef::Scalar(a), 1.0)],
            Sense::Eq,
            RhsPolynomial::constant(0.5),
        );
        let r = solve_milp(&m, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    /// Objective offset and maximization-free convention: min with offset.
    #[test]
    fn offset_applied() {
        let mut m = LiftedModel::new();
        let a = m.add_var("a", None);
        m.integers.insert(a);
        m.objective = vec![(VarRef::Scalar(a), 1.0)];
        m.obj_offset = 10.0;
        m.add_row(
            ConstraintId::Row(0),
            vec![(VarRef::Scalar(a), 1.0)],
            Sense::Ge,
            RhsPolynomial::constant(2.3),
        );
        let r = solve_milp(&m, &SolverConfig::default()).unwrap();
        // integer a >= 2.3 -> a = 3
        assert!((r.objective - 13.0).abs() < 1e-9);
    }
}
