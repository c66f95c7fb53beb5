//! Generic mixed-binary quadratic program lifting.
//!
//! An [`MbqpModel`] is the normal form every market model reduces to:
//! nonnegative variables, equality rows (inequalities arrive pre-slacked),
//! binaries, and finite bounds on continuous variables. The DNN relaxation
//! replaces x x' by a lifted matrix X constrained by bordered PSD blocks,
//! elementwise nonnegativity, RLT squares of the equalities, and the
//! binary diagonal links x_i = X_ii.

use crate::error::{Error, Result};
use crate::model::{ConstraintId, LiftedModel, Sense, VarRef};
use crate::rhs::{AffineRhs, ParamValues, RhsPolynomial};
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct MbqpEquality {
    pub id: ConstraintId,
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: AffineRhs,
    /// Whether this row also contributes an RLT square.
    pub rlt: bool,
}

#[derive(Debug, Clone)]
pub struct MbqpModel {
    pub names: Vec<String>,
    /// Upper-triangle entries (i <= j) of the symmetric objective matrix Q
    /// in x'Qx; an off-diagonal entry Q_ij contributes 2 Q_ij x_i x_j.
    pub q: Vec<(usize, usize, f64)>,
    pub c: Vec<f64>,
    pub obj_offset: f64,
    pub equalities: Vec<MbqpEquality>,
    pub binaries: BTreeSet<usize>,
    /// Finite bound U_i per continuous variable (binaries implicitly 1).
    pub bounds: Vec<Option<f64>>,
    pub params: ParamValues,
    /// Variables eligible for PSD blocks under block decomposition;
    /// slack variables are typically excluded.
    pub core: Vec<bool>,
    /// Time period of each variable, when the model has a horizon.
    pub period: Vec<Option<usize>>,
}

impl MbqpModel {
    pub fn new() -> Self {
        MbqpModel {
            names: Vec::new(),
            q: Vec::new(),
            c: Vec::new(),
            obj_offset: 0.0,
            equalities: Vec::new(),
            binaries: BTreeSet::new(),
            bounds: Vec::new(),
            params: ParamValues::new(),
            core: Vec::new(),
            period: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, bound: Option<f64>) -> usize {
        self.names.push(name.into());
        self.c.push(0.0);
        self.bounds.push(bound);
        self.core.push(true);
        self.period.push(None);
        self.names.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        let i = self.add_var(name, Some(1.0));
        self.binaries.insert(i);
        i
    }

    pub fn bound(&self, i: usize) -> Result<f64> {
        if self.binaries.contains(&i) {
            return Ok(1.0);
        }
        self.bounds[i].ok_or_else(|| Error::UnboundedContinuousVariable(self.names[i].clone()))
    }
}

impl Default for MbqpModel {
    fn default() -> Self {
        Self::new()
    }
}

/// RLT square of an equality a'x = b: coefficients of Tr(a a' X).
pub(crate) fn rlt_coeffs(coeffs: &[(usize, f64)]) -> Vec<(VarRef, f64)> {
    let mut out = Vec::new();
    for (p, &(i, ai)) in coeffs.iter().enumerate() {
        for &(j, aj) in &coeffs[p..] {
            let c = if i == j { ai * ai } else { 2.0 * ai * aj };
            out.push((VarRef::lifted(i, j), c));
        }
    }
    out
}

/// Build the DNN relaxation: linear rows, RLT squares, binary diagonal
/// links, one full bordered PSD block, elementwise nonnegativity.
pub fn build_dnn_relaxation(m: &MbqpModel) -> Result<LiftedModel> {
    let n = m.n();
    let mut out = LiftedModel::new();
    for i in 0..n {
        let idx = out.add_var(m.names[i].clone(), m.bounds[i]);
        debug_assert_eq!(idx, i);
        // Every variable needs a finite bound for the lifting to be valid.
        m.bound(i)?;
    }
    out.binaries = m.binaries.clone();
    out.params = m.params.clone();
    out.obj_offset = m.obj_offset;
    for (i, &ci) in m.c.iter().enumerate() {
        if ci != 0.0 {
            out.objective.push((VarRef::Scalar(i), ci));
        }
    }
    for &(i, j, qij) in &m.q {
        let coef = if i == j { qij } else { 2.0 * qij };
        out.objective.push((VarRef::lifted(i, j), coef));
    }
    for eq in &m.equalities {
        out.add_row(
            eq.id.clone(),
            eq.coeffs.iter().map(|&(i, a)| (VarRef::Scalar(i), a)).collect(),
            Sense::Eq,
            RhsPolynomial::Affine(eq.rhs.clone()),
        );
    }
    for eq in m.equalities.iter().filter(|e| e.rlt) {
        out.add_row(
            ConstraintId::RltOf(Box::new(eq.id.clone())),
            rlt_coeffs(&eq.coeffs),
            Sense::Eq,
            RhsPolynomial::SquaredAffine(eq.rhs.clone()),
        );
    }
    for &i in &m.binaries {
        out.add_row(
            ConstraintId::BinaryDiagLink(i),
            vec![(VarRef::Scalar(i), 1.0), (VarRef::lifted(i, i), -1.0)],
            Sense::Eq,
            RhsPolynomial::constant(0.0),
        );
    }
    out.psd_blocks = vec![(0..n).collect()];
    out.validate()?;
    Ok(out)
}

/// Add the diagonal strengthening X_ii <= U_i^2 for every continuous
/// variable that lives in a PSD block.
pub fn strengthen_bounds(m: &mut LiftedModel) -> Result<()> {
    let mut in_block: BTreeSet<usize> = BTreeSet::new();
    for block in &m.psd_blocks {
        in_block.extend(block.iter().copied());
    }
    for i in in_block {
        if m.binaries.contains(&i) {
            continue;
        }
        let u = m.lift_bound(i)?;
        m.add_row(
            ConstraintId::DiagBound(i),
            vec![(VarRef::lifted(i, i), 1.0)],
            Sense::Le,
            RhsPolynomial::constant(u * u),
        );
    }
    m.validate()?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CoverageReport {
    /// Cells materialized inside some PSD block.
    pub homed: usize,
    /// Referenced cells outside every block, demoted to nonneg + cap.
    pub demoted: Vec<(usize, usize)>,
}

/// Replace the PSD block list. Referenced cells that fall outside every
/// block are demoted: they stay nonnegative and receive the McCormick cap
/// X_ij <= U_i U_j instead of a PSD home. Rows are never dropped.
pub fn apply_block_structure(
    m: &mut LiftedModel,
    blocks: Vec<Vec<usize>>,
) -> Result<CoverageReport> {
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::EmptyBlock(b));
        }
    }
    m.psd_blocks = blocks;
    let mut homed: BTreeSet<(usize, usize)> = BTreeSet::new();
    for block in &m.psd_blocks {
        for (a, &i) in block.iter().enumerate() {
            for &j in &block[a..] {
                homed.insert(if i <= j { (i, j) } else { (j, i) });
            }
        }
    }
    let mut referenced: BTreeSet<(usize, usize)> = BTreeSet::new();
    for c in &m.constraints {
        for (v, _) in &c.coeffs {
            if let VarRef::Lifted(i, j) = *v {
                referenced.insert((i, j));
            }
        }
    }
    for (v, _) in &m.objective {
        if let VarRef::Lifted(i, j) = *v {
            referenced.insert((i, j));
        }
    }
    m.cell_caps.retain(|cell, _| !homed.contains(cell));
    let mut demoted = Vec::new();
    for &(i, j) in &referenced {
        if !homed.contains(&(i, j)) && !m.cell_caps.contains_key(&(i, j)) {
            let cap = m.lift_bound(i)? * m.lift_bound(j)?;
            m.cell_caps.insert((i, j), cap);
            demoted.push((i, j));
        }
    }
    m.validate()?;
    Ok(CoverageReport {
        homed: homed.len(),
        demoted,
    })
}

/// Envelope-theorem gradient of the optimal value w.r.t. every parameter:
/// sum over rows of dual * d(rhs)/d(param) at the current parameter values.
pub fn envelope_gradient(
    m: &LiftedModel,
    result: &crate::model::SolveResult,
) -> ParamValues {
    let mut out = ParamValues::new();
    for c in &m.constraints {
        let dual = result.dual(&c.id);
        if dual != 0.0 {
            c.rhs.accumulate_grad(&m.params, dual, &mut out);
        }
    }
    out
}
