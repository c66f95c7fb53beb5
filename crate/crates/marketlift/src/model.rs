//! Solver-agnostic constraint store shared by the exact and relaxed models.
//!
//! A [`LiftedModel`] holds scalar variables, optional lifted second-order
//! cells `X_ij`, linear rows with parameterized RHS, second-order-cone rows,
//! and PSD blocks. The same structure serves four roles: MILP (integrality
//! marks on), LP relaxation (marks ignored), DNN/SDP relaxation (lifted
//! cells + PSD blocks), and plain conic models (raw PSD blocks, AC).

use crate::error::{Error, Result};
use crate::rhs::{ParamValues, RhsPolynomial};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Operational-constraint kind, the `e` in `Operational(e, g, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OpKind {
    PMin,
    PMax,
    Logic,
    RampUp,
    RampDown,
    MinUp,
    MinDown,
    UBoundU,
    UBoundV,
    UBoundZ,
    QMin,
    QMax,
}

/// Real/imaginary part selector for AC rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Part {
    Re,
    Im,
}

/// Lower/upper side selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Lower,
    Upper,
}

/// Which member of a triangle-cut family a row instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TriangleForm {
    /// X_{ab} + c >= X_{ac} + X_{bc} with (a,b,c) a rotation of the triple.
    Rot0,
    Rot1,
    Rot2,
    /// X_{ab} + X_{ac} + X_{bc} + 1 >= a + b + c.
    Clique,
}

/// Stable identity of a constraint, used to key duals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstraintId {
    /// System-wide clearing balance in period t (DC).
    MarketClearing(usize),
    /// Lower flow limit of line (i, j) in period t.
    FlowMin(usize, usize, usize),
    /// Upper flow limit of line (i, j) in period t.
    FlowMax(usize, usize, usize),
    /// Operational row of kind e for generator g in period t.
    Operational(OpKind, usize, usize),
    /// RLT square of the named parent row.
    RltOf(Box<ConstraintId>),
    /// x_i = X_ii for binary variable i.
    BinaryDiagLink(usize),
    /// X_ii <= U_i^2 for continuous variable i.
    DiagBound(usize),
    /// PSD cone membership of block b.
    PsdBlock(usize),
    /// Elementwise nonnegativity or cap of lifted cell (i, j).
    NonnegCell(usize, usize),
    /// Per-bus AC power balance at bus k, period t, real or imaginary part.
    FlowBalanceAc(usize, usize, Part),
    /// Rectangular flow definition on directed line (i, j) in period t.
    RectFlow(usize, usize, usize, Part),
    /// Voltage magnitude envelope at bus k, period t.
    VoltageEnvelope(usize, usize, Side),
    /// Apparent-power (thermal) limit on directed line (i, j) in period t.
    Thermal(usize, usize, usize),
    /// Definition of aggregate losses in period t.
    LossDef(usize),
    /// Aggregate real demand balance in period t (appears as an RLT square).
    AggregateDemand(usize),
    /// Triangle cut over binaries (g1, g2, g3) in period t.
    Triangle(usize, usize, usize, usize, TriangleForm),
    /// Generic row, used by free-standing models and tests.
    Row(usize),
}

/// Reference to a scalar variable or a lifted cell X_ij (canonical i <= j).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VarRef {
    Scalar(usize),
    Lifted(usize, usize),
}

impl VarRef {
    /// Canonicalizing constructor for lifted cells.
    pub fn lifted(i: usize, j: usize) -> VarRef {
        if i <= j {
            VarRef::Lifted(i, j)
        } else {
            VarRef::Lifted(j, i)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub id: ConstraintId,
    pub coeffs: Vec<(VarRef, f64)>,
    pub sense: Sense,
    pub rhs: RhsPolynomial,
}

/// ||terms|| <= bound over scalar variables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SocRow {
    pub id: ConstraintId,
    pub terms: Vec<usize>,
    pub bound: f64,
}

/// Unbordered PSD block whose cells are pre-registered scalar variables.
/// `cells` lists the upper triangle in column-major order:
/// (0,0), (0,1), (1,1), (0,2), (1,2), (2,2), ...
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawPsdBlock {
    pub dim: usize,
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalarVar {
    pub name: String,
    /// Finite upper bound used by the lifting; not enforced as a row.
    pub bound: Option<f64>,
    /// Free variables are sign-unrestricted and excluded from the lifting.
    pub free: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LiftedModel {
    pub vars: Vec<ScalarVar>,
    /// Binary variables (bounds fixed to 1, eligible for diag links).
    pub binaries: BTreeSet<usize>,
    /// Integrality marks honored only by the MILP backend.
    pub integers: BTreeSet<usize>,
    pub constraints: Vec<LinearConstraint>,
    pub soc_rows: Vec<SocRow>,
    /// Bordered PSD blocks [[1, x'], [x, X]] over lifting variables.
    pub psd_blocks: Vec<Vec<usize>>,
    pub raw_blocks: Vec<RawPsdBlock>,
    /// Demoted cells: kept nonneg with the stated upper cap, no PSD home.
    pub cell_caps: BTreeMap<(usize, usize), f64>,
    /// Minimization objective.
    pub objective: Vec<(VarRef, f64)>,
    pub obj_offset: f64,
    pub params: ParamValues,
}

impl LiftedModel {
    pub fn new() -> Self {
        LiftedModel::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, bound: Option<f64>) -> usize {
        self.vars.push(ScalarVar {
            name: name.into(),
            bound,
            free: false,
        });
        self.vars.len() - 1
    }

    pub fn add_free_var(&mut self, name: impl Into<String>) -> usize {
        self.vars.push(ScalarVar {
            name: name.into(),
            bound: None,
            free: true,
        });
        self.vars.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        let i = self.add_var(name, Some(1.0));
        self.binaries.insert(i);
        self.integers.insert(i);
        i
    }

    pub fn add_row(
        &mut self,
        id: ConstraintId,
        coeffs: Vec<(VarRef, f64)>,
        sense: Sense,
        rhs: RhsPolynomial,
    ) {
        self.constraints
            .push(LinearConstraint { id, coeffs, sense, rhs });
    }

    /// Upper bound used by the lifting: 1 for binaries, declared otherwise.
    pub fn lift_bound(&self, i: usize) -> Result<f64> {
        if self.binaries.contains(&i) {
            return Ok(1.0);
        }
        self.vars[i]
            .bound
            .ok_or_else(|| Error::UnboundedContinuousVariable(self.vars[i].name.clone()))
    }

    /// True when the model carries a second-order lifting.
    pub fn has_lifting(&self) -> bool {
        !self.psd_blocks.is_empty() || !self.cell_caps.is_empty()
    }

    /// Every lifted cell the conic backend must materialize: all cells of
    /// every PSD block, every capped cell, and every cell referenced by a
    /// row or the objective. Referenced cells without a home are an error.
    pub fn lifted_cells(&self) -> Result<BTreeSet<(usize, usize)>> {
        let mut homed: BTreeSet<(usize, usize)> = BTreeSet::new();
        for block in &self.psd_blocks {
            for (a, &i) in block.iter().enumerate() {
                for &j in &block[a..] {
                    homed.insert(if i <= j { (i, j) } else { (j, i) });
                }
            }
        }
        homed.extend(self.cell_caps.keys().copied());
        let mut referenced: BTreeSet<(usize, usize)> = BTreeSet::new();
        let refs = self
            .constraints
            .iter()
            .flat_map(|c| c.coeffs.iter().map(|(v, _)| *v))
            .chain(self.objective.iter().map(|(v, _)| *v));
        for v in refs {
            if let VarRef::Lifted(i, j) = v {
                referenced.insert((i, j));
            }
        }
        for &(i, j) in &referenced {
            if !homed.contains(&(i, j)) {
                return Err(Error::OrphanCell(i, j));
            }
        }
        Ok(homed)
    }

    /// Structural checks shared by every builder.
    pub fn validate(&self) -> Result<()> {
        let n = self.vars.len();
        let mut ids = BTreeSet::new();
        for c in self.constraints.iter() {
            if !ids.insert(&c.id) {
                return Err(Error::MalformedModel(format!(
                    "duplicate constraint id {:?}",
                    c.id
                )));
            }
            if let ConstraintId::RltOf(parent) = &c.id {
                if !self.constraints.iter().any(|o| o.id == **parent) {
                    return Err(Error::MalformedModel(format!(
                        "rlt row references missing parent {:?}",
                        parent
                    )));
                }
            }
            for (v, _) in &c.coeffs {
                match *v {
                    VarRef::Scalar(i) => {
                        if i >= n {
                            return Err(Error::MalformedModel(format!(
                                "row {:?} references scalar {} out of range",
                                c.id, i
                            )));
                        }
                    }
                    VarRef::Lifted(i, j) => {
                        if i > j || j >= n {
                            return Err(Error::MalformedModel(format!(
                                "row {:?} references malformed cell ({}, {})",
                                c.id, i, j
                            )));
                        }
                        if self.vars[i].free || self.vars[j].free {
                            return Err(Error::MalformedModel(format!(
                                "row {:?} lifts free variable ({}, {})",
                                c.id, i, j
                            )));
                        }
                    }
                }
            }
        }
        for (b, block) in self.psd_blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::EmptyBlock(b));
            }
            for &i in block {
                if i >= n || self.vars[i].free {
                    return Err(Error::MalformedModel(format!(
                        "psd block {} contains invalid variable {}",
                        b, i
                    )));
                }
                self.lift_bound(i)?;
            }
        }
        for raw in &self.raw_blocks {
            if raw.cells.len() != raw.dim * (raw.dim + 1) / 2 {
                return Err(Error::MalformedModel(
                    "raw psd block cell count does not match its dimension".into(),
                ));
            }
        }
        self.lifted_cells()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalTrouble,
}

/// Solution of one solve, with duals keyed by constraint identity.
/// Dual convention: `duals[id]` is dV*/d(rhs of the row as written).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    pub lifted: BTreeMap<(usize, usize), f64>,
    pub duals: BTreeMap<ConstraintId, f64>,
    pub iterations: usize,
    pub solve_seconds: f64,
    /// Relative primal-dual gap reported by the conic backend; None for
    /// MILP solves.
    pub rel_gap: Option<f64>,
}

impl SolveResult {
    pub fn require_optimal(&self) -> Result<()> {
        if self.status == SolveStatus::Optimal {
            Ok(())
        } else {
            Err(Error::NotOptimal(self.status))
        }
    }

    pub fn dual(&self, id: &ConstraintId) -> f64 {
        self.duals.get(id).copied().unwrap_or(0.0)
    }

    pub fn value(&self, v: VarRef) -> f64 {
        match v {
            VarRef::Scalar(i) => self.x[i],
            VarRef::Lifted(i, j) => self.lifted.get(&(i, j)).copied().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub milp_rel_gap: f64,
    pub conic_tol: f64,
    pub max_iter: u32,
    pub verbose: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            milp_rel_gap: 1e-6,
            conic_tol: 1e-8,
            max_iter: 500,
            verbose: false,
        }
    }
}

impl SolverConfig {
    /// Tightened profile used to adjudicate near-zero relaxation gaps.
    pub fn tight() -> Self {
        SolverConfig {
            conic_tol: 1e-10,
            ..SolverConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rhs::RhsPolynomial;

    #[test]
    fn lifted_ref_is_canonical() {
        assert_eq!(VarRef::lifted(3, 1), VarRef::Lifted(1, 3));
        assert_eq!(VarRef::lifted(1, 3), VarRef::Lifted(1, 3));
    }

    #[test]
    fn orphan_cell_is_rejected() {
        let mut m = LiftedModel::new();
        let a = m.add_var("a", Some(1.0));
        let b = m.add_var("b", Some(1.0));
        m.add_row(
            ConstraintId::Row(0),
            vec![(VarRef::lifted(a, b), 1.0)],
            Sense::Le,
            RhsPolynomial::constant(1.0),
        );
        match m.validate() {
            Err(Error::OrphanCell(0, 1)) => {}
            other => panic!("expected orphan cell error, got {:?}", other),
        }
        m.psd_blocks.push(vec![a, b]);
        m.validate().unwrap();
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let mut m = LiftedModel::new();
        let a = m.add_var("a", Some(1.0));
        for _ in 0..2 {
            m.add_row(
                ConstraintId::Row(7),
                vec![(VarRef::Scalar(a), 1.0)],
                Sense::Le,
                RhsPolynomial::constant(1.0),
            );
        }
        assert!(matches!(m.validate(), Err(Error::MalformedModel(_))));
    }

    #[test]
    fn rlt_parent_must_exist() {
        let mut m = LiftedModel::new();
        let a = m.add_var("a", Some(1.0));
        m.add_row(
            ConstraintId::RltOf(Box::new(ConstraintId::MarketClearing(0))),
            vec![(VarRef::Scalar(a), 1.0)],
            Sense::Eq,
            RhsPolynomial::constant(1.0),
        );
        assert!(matches!(m.validate(), Err(Error::MalformedModel(_))));
    }

    #[test]
    fn unbounded_block_variable_is_rejected() {
        let mut m = LiftedModel::new();
        let a = m.add_var("a", None);
        m.psd_blocks.push(vec![a]);
        assert!(matches!(
            m.validate(),
            Err(Error::UnboundedContinuousVariable(_))
        ));
    }
}
